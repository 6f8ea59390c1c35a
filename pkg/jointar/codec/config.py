from traitlets import HasTraits, Integer, TraitError, validate


class CodecConfig(HasTraits):

    """
    Seeds of the frozen visual codec and understanding encoder.
    Both are recorded in the run config and thereby in checkpoints.
    """

    codec_seed = Integer(0)
    enc_seed = Integer(1)
    image_size = Integer(16)

    @validate('image_size')
    def _check_image_size(self, proposal):
        if proposal['value'] <= 0 or proposal['value'] % 4:
            raise TraitError('image_size must be a positive multiple of 4, got %d'
                             % proposal['value'])
        return proposal['value']
