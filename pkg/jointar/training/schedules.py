"""
Learning-rate and generation-order schedules.
"""
from ..sequence.permutations import RASTER, RANDOM


def lr_at(step, config):
    """
    Linear warmup from 0 to `config.lr` over the warmup steps, then constant.
    """
    if step < 0:
        raise ValueError('step must be non-negative')
    warmup = config.warmup_steps
    if warmup == 0 or step >= warmup:
        return config.lr
    return config.lr * step / warmup


def random_order_probability(step, config):
    """
    Probability that a training example uses a random order at `step`.

    One before `order_random_frac`, zero from `order_anneal_end_frac`
    on, linear in between.
    """
    frac = step / config.total_steps
    start, end = config.order_random_frac, config.order_anneal_end_frac
    if frac < start:
        return 1.
    if frac >= end:
        return 0.
    return (end - frac) / (end - start)


def order_mode(step, config, rng):
    """
    Draw the order of one example.

    Parameters
    ----------

    step : int
        In [0, total_steps).

    config : TrainConfig

    rng : np.random.Generator

    Returns
    -------

    mode : str
        'random' or 'raster'.
    """
    if not 0 <= step < config.total_steps:
        raise ValueError('step %d outside [0, %d)' % (step, config.total_steps))
    p = random_order_probability(step, config)
    if p == 1.:
        return RANDOM
    if p == 0.:
        return RASTER
    return RANDOM if rng.random() < p else RASTER
