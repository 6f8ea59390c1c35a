from traitlets import (HasTraits,
                       Integer,
                       Float,
                       TraitError,
                       validate)


class TrainConfig(HasTraits):

    """
    Joint training recipe.

    Schedule constants are fractions of `total_steps`: warmup ends at
    `warmup_frac`, orders are all random before `order_random_frac`
    and all raster from `order_anneal_end_frac` on.
    """

    lambda_text = Float(0.005)
    total_steps = Integer(20000)
    warmup_frac = Float(0.065)
    lr = Float(1e-4)
    batch_size = Integer(32)
    task_mix_gen = Float(0.5)
    order_random_frac = Float(0.3)
    order_anneal_end_frac = Float(0.6)
    beta1 = Float(0.9)
    beta2 = Float(0.95)
    adam_eps = Float(1e-8)
    weight_decay = Float(0.01)
    seed = Integer(0)
    log_every = Integer(100)
    save_every = Integer(1000)

    @validate('lambda_text', 'lr', 'weight_decay')
    def _check_nonnegative(self, proposal):
        if proposal['value'] < 0:
            raise TraitError('%s must be non-negative, got %s'
                             % (proposal['trait'].name, proposal['value']))
        return proposal['value']

    @validate('warmup_frac', 'task_mix_gen', 'order_random_frac',
              'order_anneal_end_frac', 'beta1', 'beta2')
    def _check_fraction(self, proposal):
        if not 0 <= proposal['value'] <= 1:
            raise TraitError('%s must be in [0, 1], got %s'
                             % (proposal['trait'].name, proposal['value']))
        return proposal['value']

    @validate('total_steps', 'batch_size', 'log_every', 'save_every')
    def _check_positive(self, proposal):
        if proposal['value'] < 1:
            raise TraitError('%s must be positive, got %s'
                             % (proposal['trait'].name, proposal['value']))
        return proposal['value']

    def check(self):
        if self.order_random_frac > self.order_anneal_end_frac:
            raise TraitError('order_random_frac (%s) exceeds order_anneal_end_frac (%s)'
                             % (self.order_random_frac, self.order_anneal_end_frac))
        return self

    @property
    def warmup_steps(self):
        return int(round(self.warmup_frac * self.total_steps))

    def copy(self, **changes):
        values = dict((name, getattr(self, name)) for name in self.trait_names())
        values.update(changes)
        return TrainConfig(**values).check()
