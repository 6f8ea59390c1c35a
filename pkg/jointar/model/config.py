import numpy as np

from traitlets import (HasTraits,
                       Integer,
                       Float,
                       Enum,
                       TraitError,
                       validate)


class ModelConfig(HasTraits):

    """
    Sizes of the backbone, its embeddings and both output heads.

    The defaults give the desk-scale model: a 4-layer, 128-wide
    pre-norm transformer over a 64-word vocabulary and a 4 x 4 grid
    of 16-dimensional continuous image tokens.
    """

    # backbone
    vocab_size = Integer(64)
    d_model = Integer(128)
    n_layers = Integer(4)
    n_heads = Integer(4)
    d_ff = Integer(512)
    max_seq = Integer(128)

    # image tokens
    grid_rows = Integer(4)
    grid_cols = Integer(4)
    token_dim = Integer(16)
    n_enc = Integer(16)

    # diffusion head
    head_width = Integer(256)
    d_time = Integer(64)
    T_train = Integer(1000)
    sample_steps = Integer(100)
    x0_clip = Float(5.)

    init_std = Float(0.02)
    precision = Enum(['f32', 'f64'], default_value='f32')

    @validate('d_model')
    def _check_d_model(self, proposal):
        value = proposal['value']
        if value < 1:
            raise TraitError('d_model must be positive')
        return value

    @validate('d_time')
    def _check_d_time(self, proposal):
        if proposal['value'] % 2:
            raise TraitError('d_time must be even, got %d' % proposal['value'])
        return proposal['value']

    @validate('T_train')
    def _check_T(self, proposal):
        if proposal['value'] < 10:
            raise TraitError('T_train must be at least 10')
        return proposal['value']

    def check(self):
        """
        Invariants spanning several traits.
        """
        if self.d_model % self.n_heads:
            raise TraitError('d_model (%d) must be divisible by n_heads (%d)'
                             % (self.d_model, self.n_heads))
        if not 1 <= self.sample_steps <= self.T_train:
            raise TraitError('sample_steps must be in [1, T_train]')
        return self

    @property
    def n_img(self):
        return self.grid_rows * self.grid_cols

    @property
    def grid(self):
        return (self.grid_rows, self.grid_cols)

    @property
    def d_head(self):
        return self.d_model // self.n_heads

    @property
    def dtype(self):
        return np.float64 if self.precision == 'f64' else np.float32

    def copy(self, **changes):
        values = dict((name, getattr(self, name)) for name in self.trait_names())
        values.update(changes)
        return ModelConfig(**values).check()


def tiny_config(**changes):
    """
    One-layer, 16-wide model used by gradient checks and fast tests.
    """
    values = dict(d_model=16, n_layers=1, n_heads=2, d_ff=32,
                  head_width=16, d_time=8, T_train=50, sample_steps=10,
                  init_std=0.3, precision='f64')
    values.update(changes)
    return ModelConfig(**values).check()
