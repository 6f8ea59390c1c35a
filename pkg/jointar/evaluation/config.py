from traitlets import HasTraits, Integer, Enum, TraitError, validate


class EvalConfig(HasTraits):

    """
    Sizes and seeds of an evaluation pass.
    """

    n_gen_samples = Integer(1000)
    n_heldout_samples = Integer(100)
    eval_seed = Integer(0)
    sample_order = Enum(['raster', 'random'], default_value='raster')
    max_answer_tokens = Integer(16)

    @validate('n_gen_samples', 'max_answer_tokens')
    def _check_positive(self, proposal):
        if proposal['value'] < 1:
            raise TraitError('%s must be positive' % proposal['trait'].name)
        return proposal['value']

    @validate('n_heldout_samples')
    def _check_nonnegative(self, proposal):
        if proposal['value'] < 0:
            raise TraitError('n_heldout_samples must be non-negative')
        return proposal['value']
