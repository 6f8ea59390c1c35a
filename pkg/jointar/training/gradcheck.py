"""
Finite-difference check of the hand-written gradients.

For every parameter tensor a few random coordinates are perturbed by
+-h and the central difference of the unified loss is compared to the
analytic gradient. The diffusion timesteps and noise are redrawn from
the same seed at every evaluation so the loss is a deterministic
function of the parameters.
"""
import logging

import numpy as np
import pandas as pd

from ..errors import GradientCheckFailure
from ..model.diffusion import DiffusionSchedule
from ..model.params import init_params
from ..sequence.batching import collate
from ..sequence.permutations import sample_permutation, RANDOM
from ..sequence.streams import build_generation_sequence, build_understanding_sequence
from ..codec.vocab import SPECIALS
from .objective import unified_loss

logger = logging.getLogger(__name__)

STEP = 1e-5
TOLERANCE = 1e-4
# below this magnitude errors are measured in absolute terms
FLOOR = 1e-5


def relative_error(analytic, numeric, floor=FLOOR):
    return np.fabs(analytic - numeric) / max(np.fabs(analytic), np.fabs(numeric), floor)


def random_streams(config, rng, n_gen=1, n_und=1, prompt_len=3, question_len=3, answer_len=2):
    """
    Random generation and understanding items for a model config.
    """
    low = len(SPECIALS)
    items = []
    for _ in range(n_gen):
        prompt = rng.integers(low, config.vocab_size, size=prompt_len)
        tokens = rng.standard_normal((config.n_img, config.token_dim))
        perm = sample_permutation(RANDOM, config.n_img, rng)
        items.append(build_generation_sequence(prompt, tokens, perm, config.grid))
    for _ in range(n_und):
        feats = rng.standard_normal((config.n_enc, config.d_model))
        question = rng.integers(low, config.vocab_size, size=question_len)
        answer = rng.integers(low, config.vocab_size, size=answer_len)
        items.append(build_understanding_sequence(feats, question, answer))
    return items


class GradCheckReport(object):

    def __init__(self, table, tolerance):
        self.table = table
        self.tolerance = tolerance

    @property
    def passed(self):
        return bool((self.table['max_rel_error'] < self.tolerance).all())

    @property
    def max_error(self):
        return float(self.table['max_rel_error'].max())

    def failures(self):
        return self.table[self.table['max_rel_error'] >= self.tolerance]

    def check(self):
        """
        Raise `GradientCheckFailure` for the worst tensor if any fails.
        """
        if not self.passed:
            worst = self.table.loc[self.table['max_rel_error'].idxmax()]
            raise GradientCheckFailure(worst['name'], worst['coordinate'], worst['max_rel_error'])
        return self

    def __str__(self):
        return '%s\n%s (max relative error %.3e)' % (self.table.to_string(index=False),
                                                     'PASS' if self.passed else 'FAIL',
                                                     self.max_error)


def grad_check(config,
               params=None,
               items=None,
               lambda_text=1.,
               seed=0,
               n_coords=10,
               h=STEP,
               tolerance=TOLERANCE,
               names=None):
    """
    Compare analytic and central finite-difference gradients.

    Parameters
    ----------

    config : ModelConfig
        Should be float64; `tiny_config()` is the intended size.

    params : ModelParams (optional)
        Initialized from `seed` when omitted.

    items : list of (TokenStream, AttentionMask) (optional)
        Defaults to one generation and one understanding stream.

    lambda_text : float

    seed : int

    n_coords : int
        Coordinates checked per tensor (all of them for small tensors).

    h : float

    tolerance : float

    names : list of str (optional)
        Restrict the check to these tensors.

    Returns
    -------

    report : GradCheckReport
    """
    if config.precision != 'f64':
        logger.warning('gradient check in %s; finite differences need f64', config.precision)
    rng = np.random.default_rng([seed, 1])
    if params is None:
        params = init_params(config, np.random.default_rng([seed, 0]))
    params = params.copy()
    if items is None:
        items = random_streams(config, rng)
    batch = collate(items, config.token_dim, config.d_model, config.dtype)
    schedule = DiffusionSchedule.from_config(config)

    def loss(p):
        noise = np.random.default_rng([seed, 2])
        return unified_loss(p, batch, config, lambda_text, schedule, noise, mode='func')[0]

    grads = unified_loss(params, batch, config, lambda_text, schedule,
                         np.random.default_rng([seed, 2]), mode='grad')

    rows = []
    for name in (names or list(params)):
        value = params[name]
        analytic = grads[name] if name in grads else np.zeros_like(value)
        k = min(n_coords, value.size)
        coords = rng.choice(value.size, k, replace=False)
        worst, worst_coord = 0., None
        for i in coords:
            orig = value.flat[i]
            value.flat[i] = orig + h
            f_plus = loss(params)
            value.flat[i] = orig - h
            f_minus = loss(params)
            value.flat[i] = orig
            numeric = (f_plus - f_minus) / (2 * h)
            err = relative_error(analytic.flat[i], numeric)
            if worst_coord is None or err > worst:
                worst = err
                worst_coord = np.unravel_index(i, value.shape)
        rows.append((name, worst, tuple(int(c) for c in worst_coord)))
        logger.debug('%s: max relative error %.3e', name, worst)

    table = pd.DataFrame.from_records(rows, columns=['name', 'max_rel_error', 'coordinate'])
    return GradCheckReport(table, tolerance)
