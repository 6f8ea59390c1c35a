"""
Categorical text head.
"""
import numpy as np
from scipy.special import log_softmax, softmax

from ..errors import NoLossPositions, ShapeMismatch
from .layers import linear_grads
from .params import TEXT_HEAD_PREFIX

WEIGHT = TEXT_HEAD_PREFIX + 'weight'
BIAS = TEXT_HEAD_PREFIX + 'bias'


def text_logits(params, z):
    """
    Logits over the vocabulary for one or more backbone outputs.

    Parameters
    ----------

    params : ModelParams

    z : np.float((..., d_model))

    Returns
    -------

    logits : np.float((..., V))
    """
    return np.asarray(z).dot(params[WEIGHT]) + params[BIAS]


def text_probabilities(logits):
    return softmax(logits, axis=-1)


def text_loss(logits_seq, target_ids, loss_flags=None, return_grad=False):
    """
    Mean cross-entropy over flagged positions.

    Parameters
    ----------

    logits_seq : np.float((n, V))

    target_ids : np.int(n)

    loss_flags : np.bool(n) (optional)
        Defaults to every position.

    return_grad : bool
        Also return the gradient with respect to `logits_seq`.

    Returns
    -------

    loss : float

    dlogits : np.float((n, V))
        Only when `return_grad`.
    """
    logits_seq = np.asarray(logits_seq)
    target_ids = np.asarray(target_ids)
    if loss_flags is None:
        loss_flags = np.ones(target_ids.shape, bool)
    loss_flags = np.asarray(loss_flags, bool)
    if logits_seq.shape[:-1] != target_ids.shape or target_ids.shape != loss_flags.shape:
        raise ShapeMismatch('logits %s, targets %s and flags %s do not agree'
                            % (logits_seq.shape, target_ids.shape, loss_flags.shape))
    count = loss_flags.sum()
    if count == 0:
        raise NoLossPositions('text loss needs at least one flagged position')

    logp = log_softmax(logits_seq[loss_flags], axis=-1)
    targets = target_ids[loss_flags]
    rows = np.arange(targets.shape[0])
    loss = -logp[rows, targets].sum() / count
    if not return_grad:
        return loss

    dflag = np.exp(logp)
    dflag[rows, targets] -= 1
    dlogits = np.zeros_like(logits_seq)
    dlogits[loss_flags] = dflag / count
    return loss, dlogits


def text_head_backward(z, dlogits, params):
    """
    Gradients of the text head and of its inputs.

    Returns
    -------

    grads : dict
        Gradients of the head weight and bias.

    dz : np.float((..., d_model))
    """
    dW, db = linear_grads(z, dlogits)
    return {WEIGHT: dW, BIAS: db}, dlogits.dot(params[WEIGHT].T)
