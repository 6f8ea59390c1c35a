r"""
The unified training objective

.. math::

    L = L_{Visual} + \lambda L_{Text}

where $L_{Visual}$ is the mean diffusion loss over flagged image
positions and $L_{Text}$ the mean cross-entropy over flagged text
positions of the batch. A term with no flagged positions is zero.
"""
import numpy as np

from ..errors import EmptyBatch
from ..model.backbone import forward_batch, backward
from ..model.diffusion import DiffusionHead, diffusion_loss
from ..model.heads import text_logits, text_loss, text_head_backward
from ..model.params import ModelParams


def unified_loss(params, batch, config, lambda_text, schedule, rng, mode='func'):
    """
    Evaluate the unified loss and/or its gradient.

    Parameters
    ----------

    params : ModelParams

    batch : Batch

    config : ModelConfig

    lambda_text : float

    schedule : DiffusionSchedule

    rng : np.random.Generator
        Draws the diffusion timesteps and noise, one pair per
        flagged image position.

    mode : str
        'func', 'grad' or 'both'.

    Returns
    -------

    losses : (float, float, float)
        (L, L_Visual, L_Text), for 'func' and 'both'.

    grads : ModelParams
        For 'grad' and 'both'. Tensors off every active loss path
        (the text head when lambda_text is zero or the batch has no
        understanding examples, the diffusion head without generation
        examples) are absent.
    """
    if mode not in ('func', 'grad', 'both'):
        raise ValueError('mode incorrectly specified')
    if len(batch.tasks) == 0:
        raise EmptyBatch('unified loss of an empty batch')
    need_grad = mode != 'func'

    z, cache = forward_batch(params, batch.fields, batch.allow, config)
    dz = np.zeros_like(z)
    head_grads = {}
    loss_text, loss_visual = 0., 0.

    if batch.text_pred.any():
        zt = z[batch.text_pred]
        logits = text_logits(params, zt)
        targets = batch.text_target[batch.text_pred]
        if need_grad and lambda_text > 0:
            loss_text, dlogits = text_loss(logits, targets, return_grad=True)
            g, dzt = text_head_backward(zt, lambda_text * dlogits, params)
            head_grads.update(g)
            dz[batch.text_pred] += dzt
        else:
            loss_text = text_loss(logits, targets)

    if batch.image_pred.any():
        head = DiffusionHead.from_params(params, config)
        zi = z[batch.image_pred]
        x0 = batch.image_target[batch.image_pred]
        if need_grad:
            loss_visual, g, dzi = diffusion_loss(head, schedule, x0, zi, rng, return_grad=True)
            head_grads.update(g)
            dz[batch.image_pred] += dzi
        else:
            loss_visual = diffusion_loss(head, schedule, x0, zi, rng)

    loss_text, loss_visual = float(loss_text), float(loss_visual)
    losses = (loss_visual + lambda_text * loss_text, loss_visual, loss_text)
    if not need_grad:
        return losses

    grads = backward(params, cache, dz, config)
    grads.update(head_grads)
    # in parameter order
    grads = ModelParams((name, grads[name]) for name in params if name in grads)
    if mode == 'grad':
        return grads
    return losses, grads
