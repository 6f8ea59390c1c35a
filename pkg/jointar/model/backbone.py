r"""
Decoder-only pre-norm transformer over packed multimodal streams.

Each block computes

.. math::

    h = x + \text{Attn}(\text{LN}_1(x)), \qquad
    x' = h + W_2\,\text{GELU}(W_1 \text{LN}_2(h) + b_1) + b_2

and the output $z$ is the final layer norm of the residual stream.
The output at position $p$ is the condition for the entry at $p+1$.
"""
import logging

import numpy as np

from ..errors import ShapeMismatch, NonFiniteActivation
from ..sequence.batching import (TEXT_CODE,
                                 BOI_CODE,
                                 IMAGE_CODE,
                                 ENCFEAT_CODE,
                                 entry_fields)
from ..utils.tools import timethis
from .layers import (layer_norm_forward,
                     layer_norm_backward,
                     gelu_forward,
                     gelu_backward,
                     attention_forward,
                     attention_backward,
                     linear_grads)
from .params import ModelParams

logger = logging.getLogger(__name__)


def _check_fields(fields, config):
    mod = fields['modality']
    if mod.ndim != 2:
        raise ShapeMismatch('expected (batch, length) fields, got %s' % (mod.shape,))
    B, n = mod.shape
    if n > config.max_seq:
        raise ShapeMismatch('sequence of length %d exceeds max_seq=%d' % (n, config.max_seq))
    if fields['image_in'].shape[-1] != config.token_dim:
        raise ShapeMismatch('image tokens of dimension %d, model expects %d'
                            % (fields['image_in'].shape[-1], config.token_dim))
    if fields['features'].shape[-1] != config.d_model:
        raise ShapeMismatch('encoder features of dimension %d, model expects d_model=%d'
                            % (fields['features'].shape[-1], config.d_model))
    if n == 0:
        return
    if fields['pos1d'].max() >= config.max_seq:
        raise ShapeMismatch('1D position %d out of range' % fields['pos1d'].max())
    if fields['pos2d'].max() >= config.n_img:
        raise ShapeMismatch('2D position %d outside the %dx%d grid'
                            % ((fields['pos2d'].max(),) + config.grid))
    if fields['target2d'].max() > config.n_img:
        raise ShapeMismatch('target position %d out of range' % fields['target2d'].max())
    if fields['token_ids'].max() >= config.vocab_size:
        raise ShapeMismatch('token id %d outside vocabulary of size %d'
                            % (fields['token_ids'].max(), config.vocab_size))


def embed(params, fields, config):
    """
    Map per-position inputs into the shared embedding space.

    Text and BOI entries use the token table plus the 1D position;
    BOI additionally carries the target position of the first image
    token. Image entries use the continuous-token projection plus the
    2D position of their own cell and the target position of the
    next cell. Encoder features enter unchanged plus the 1D position.
    Padding embeds to zero.

    Returns
    -------

    x : np.float((B, n, d_model))

    cache : dict
    """
    _check_fields(fields, config)
    dtype = config.dtype
    mod = fields['modality']
    B, n = mod.shape
    x = np.zeros((B, n, config.d_model), dtype)

    is_tok = (mod == TEXT_CODE) | (mod == BOI_CODE)
    is_img = mod == IMAGE_CODE
    is_enc = mod == ENCFEAT_CODE
    uses_1d = is_tok | is_enc
    has_target = fields['target2d'] >= 0

    ids = fields['token_ids'][is_tok]
    x[is_tok] += params['embed.token'][ids]
    x[uses_1d] += params['embed.pos1d'][fields['pos1d'][uses_1d]]
    img_in = fields['image_in'][is_img].astype(dtype)
    x[is_img] += img_in.dot(params['embed.image_in'])
    x[is_img] += params['embed.pos2d'][fields['pos2d'][is_img]]
    x[has_target] += params['embed.target2d'][fields['target2d'][has_target]]
    x[is_enc] += fields['features'][is_enc].astype(dtype)

    cache = dict(fields=fields, is_tok=is_tok, is_img=is_img,
                 uses_1d=uses_1d, has_target=has_target, img_in=img_in)
    return x, cache


def embed_backward(params, cache, dx, grads):
    fields = cache['fields']
    is_tok, is_img = cache['is_tok'], cache['is_img']
    uses_1d, has_target = cache['uses_1d'], cache['has_target']

    g = np.zeros_like(params['embed.token'])
    np.add.at(g, fields['token_ids'][is_tok], dx[is_tok])
    grads['embed.token'] = g

    grads['embed.image_in'] = cache['img_in'].T.dot(dx[is_img])

    g = np.zeros_like(params['embed.pos1d'])
    np.add.at(g, fields['pos1d'][uses_1d], dx[uses_1d])
    grads['embed.pos1d'] = g

    g = np.zeros_like(params['embed.pos2d'])
    np.add.at(g, fields['pos2d'][is_img], dx[is_img])
    grads['embed.pos2d'] = g

    g = np.zeros_like(params['embed.target2d'])
    np.add.at(g, fields['target2d'][has_target], dx[has_target])
    grads['embed.target2d'] = g
    return grads


def block_forward(params, l, x, allow, config):
    pre = 'blocks.%d.' % l
    a1, ln1 = layer_norm_forward(x, params[pre + 'ln1.gain'], params[pre + 'ln1.bias'])
    att, att_cache = attention_forward(a1, allow,
                                       params[pre + 'attn.wq'],
                                       params[pre + 'attn.wk'],
                                       params[pre + 'attn.wv'],
                                       params[pre + 'attn.wo'],
                                       config.n_heads)
    h = x + att
    a2, ln2 = layer_norm_forward(h, params[pre + 'ln2.gain'], params[pre + 'ln2.bias'])
    pre_act = a2.dot(params[pre + 'ffn.w1']) + params[pre + 'ffn.b1']
    act, gelu_cache = gelu_forward(pre_act)
    out = h + act.dot(params[pre + 'ffn.w2']) + params[pre + 'ffn.b2']
    return out, (ln1, att_cache, ln2, a2, gelu_cache, act)


def block_backward(params, l, cache, dout, grads):
    pre = 'blocks.%d.' % l
    ln1, att_cache, ln2, a2, gelu_cache, act = cache

    grads[pre + 'ffn.w2'], grads[pre + 'ffn.b2'] = linear_grads(act, dout)
    dpre = gelu_backward(gelu_cache, dout.dot(params[pre + 'ffn.w2'].T))
    grads[pre + 'ffn.w1'], grads[pre + 'ffn.b1'] = linear_grads(a2, dpre)
    da2 = dpre.dot(params[pre + 'ffn.w1'].T)
    dh_ln, grads[pre + 'ln2.gain'], grads[pre + 'ln2.bias'] = layer_norm_backward(ln2, da2)
    dh = dout + dh_ln

    (da1,
     grads[pre + 'attn.wq'],
     grads[pre + 'attn.wk'],
     grads[pre + 'attn.wv'],
     grads[pre + 'attn.wo']) = attention_backward(att_cache, dh,
                                                  params[pre + 'attn.wq'],
                                                  params[pre + 'attn.wk'],
                                                  params[pre + 'attn.wv'],
                                                  params[pre + 'attn.wo'])
    dx_ln, grads[pre + 'ln1.gain'], grads[pre + 'ln1.bias'] = layer_norm_backward(ln1, da1)
    return dh + dx_ln


def _check_finite(x, layer, where):
    if not np.all(np.isfinite(x)):
        logger.error('non-finite activation in %s at layer %d', where, layer)
        raise NonFiniteActivation(layer, where)


@timethis
def forward_batch(params, fields, allow, config):
    """
    Full forward pass over a padded batch.

    Parameters
    ----------

    params : ModelParams

    fields : dict
        Per-position inputs as produced by `collate` or `entry_fields`.

    allow : np.bool((B, n, n))

    config : ModelConfig

    Returns
    -------

    z : np.float((B, n, d_model))

    cache : tuple
        Everything `backward` needs.
    """
    allow = np.asarray(allow, bool)
    B, n = fields['modality'].shape
    if allow.shape != (B, n, n):
        raise ShapeMismatch('mask of shape %s for a batch of shape %s'
                            % (allow.shape, (B, n)))
    x, embed_cache = embed(params, fields, config)
    _check_finite(x, -1, 'embedding')
    block_caches = []
    for l in range(config.n_layers):
        x, c = block_forward(params, l, x, allow, config)
        _check_finite(x, l, 'block')
        block_caches.append(c)
    z, final = layer_norm_forward(x, params['final_norm.gain'], params['final_norm.bias'])
    _check_finite(z, config.n_layers, 'final norm')
    return z, (embed_cache, block_caches, final)


@timethis
def backward(params, cache, dz, config):
    """
    Gradients of the backbone parameters given the gradient of a
    scalar loss with respect to the outputs `z`.

    Returns
    -------

    grads : ModelParams
        Entries for the embedding tables, every block and the final norm.
    """
    embed_cache, block_caches, final = cache
    grads = ModelParams()
    dx, grads['final_norm.gain'], grads['final_norm.bias'] = layer_norm_backward(final, dz)
    for l in reversed(range(config.n_layers)):
        dx = block_backward(params, l, block_caches[l], dx, grads)
    embed_backward(params, embed_cache, dx, grads)
    return grads


def forward(params, stream, mask, config):
    """
    Outputs of the backbone for one stream.

    Parameters
    ----------

    params : ModelParams

    stream : TokenStream

    mask : AttentionMask

    config : ModelConfig

    Returns
    -------

    z : np.float((len(stream), d_model))
        Row `p` is the output at stream position `p`.
    """
    if mask.shape != (len(stream), len(stream)):
        raise ShapeMismatch('mask of shape %s for a stream of length %d'
                            % (mask.shape, len(stream)))
    fields = entry_fields(stream.entries, stream.grid or config.grid,
                          config.token_dim, config.d_model, config.dtype)
    z, _ = forward_batch(params, fields, mask.allow[None], config)
    return z[0]
