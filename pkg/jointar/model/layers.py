r"""
Forward and backward passes of the building blocks.

Each `*_forward` returns its output and a cache; the matching
`*_backward` takes the cache and the gradient of the output and
returns gradients of the inputs and parameters.
"""
import math

import numpy as np
from scipy.special import expit, softmax

LN_EPS = 1e-5
_GELU_C = math.sqrt(2. / math.pi)
_GELU_A = 0.044715


def linear_grads(x, dy):
    """
    Weight and bias gradients of y = x W + b, summed over leading axes.
    """
    x2 = x.reshape((-1, x.shape[-1]))
    dy2 = dy.reshape((-1, dy.shape[-1]))
    return x2.T.dot(dy2), dy2.sum(0)


def layer_norm_forward(x, gain, bias, eps=LN_EPS):
    mu = x.mean(-1, keepdims=True)
    xc = x - mu
    var = (xc**2).mean(-1, keepdims=True)
    rstd = 1. / np.sqrt(var + eps)
    xhat = xc * rstd
    return xhat * gain + bias, (xhat, rstd, gain)


def layer_norm_backward(cache, dy):
    xhat, rstd, gain = cache
    axes = tuple(range(dy.ndim - 1))
    dgain = (dy * xhat).sum(axes)
    dbias = dy.sum(axes)
    dxhat = dy * gain
    dx = rstd * (dxhat
                 - dxhat.mean(-1, keepdims=True)
                 - xhat * (dxhat * xhat).mean(-1, keepdims=True))
    return dx, dgain, dbias


def gelu_forward(x):
    """
    GELU, tanh approximation.
    """
    t = np.tanh(_GELU_C * (x + _GELU_A * x**3))
    return 0.5 * x * (1 + t), (x, t)


def gelu_backward(cache, dy):
    x, t = cache
    dt = _GELU_C * (1 + 3 * _GELU_A * x**2)
    return dy * (0.5 * (1 + t) + 0.5 * x * (1 - t**2) * dt)


def silu_forward(x):
    s = expit(x)
    return x * s, (x, s)


def silu_backward(cache, dy):
    x, s = cache
    return dy * s * (1 + x * (1 - s))


def split_heads(x, n_heads):
    # (..., n, d) -> (..., H, n, d/H)
    shape = x.shape[:-1] + (n_heads, x.shape[-1] // n_heads)
    return np.moveaxis(x.reshape(shape), -2, -3)


def merge_heads(x):
    # (..., H, n, dh) -> (..., n, H*dh)
    x = np.moveaxis(x, -3, -2)
    return x.reshape(x.shape[:-2] + (x.shape[-2] * x.shape[-1],))


def attention_forward(a, allow, wq, wk, wv, wo, n_heads):
    r"""
    Masked multi-head self-attention.

    Disallowed scores are set to $-\infty$ before the softmax, so their
    weights are exactly zero and the output at $i$ depends only on
    positions $j$ with `allow[i, j]`.

    Parameters
    ----------

    a : np.float((B, n, d))
        Normalized input.

    allow : np.bool((B, n, n))

    wq, wk, wv, wo : np.float((d, d))

    n_heads : int

    Returns
    -------

    out : np.float((B, n, d))

    cache : tuple
    """
    q = split_heads(a.dot(wq), n_heads)
    k = split_heads(a.dot(wk), n_heads)
    v = split_heads(a.dot(wv), n_heads)
    scale = 1. / math.sqrt(q.shape[-1])
    scores = np.matmul(q, np.swapaxes(k, -1, -2)) * scale
    scores = np.where(allow[:, None], scores, -np.inf)
    P = softmax(scores, axis=-1)
    o = merge_heads(np.matmul(P, v))
    return o.dot(wo), (a, q, k, v, P, o, scale, n_heads)


def attention_backward(cache, dout, wq, wk, wv, wo):
    a, q, k, v, P, o, scale, n_heads = cache
    dwo = linear_grads(o, dout)[0]
    do = split_heads(dout.dot(wo.T), n_heads)
    dP = np.matmul(do, np.swapaxes(v, -1, -2))
    dv = np.matmul(np.swapaxes(P, -1, -2), do)
    ds = P * (dP - (dP * P).sum(-1, keepdims=True))
    dq = merge_heads(np.matmul(ds, k) * scale)
    dk = merge_heads(np.matmul(np.swapaxes(ds, -1, -2), q) * scale)
    dv = merge_heads(dv)
    dwq = linear_grads(a, dq)[0]
    dwk = linear_grads(a, dk)[0]
    dwv = linear_grads(a, dv)[0]
    da = dq.dot(wq.T) + dk.dot(wk.T) + dv.dot(wv.T)
    return da, dwq, dwk, dwv, dwo


def cached_attention(q, K, V, allow, n_heads):
    """
    Attention of new queries against cached keys and values.

    Parameters
    ----------

    q : np.float((m, d))
        Queries of the new positions.

    K, V : np.float((L, d))
        Keys and values of all positions up to and including the new ones.

    allow : np.bool((m, L))

    n_heads : int

    Returns
    -------

    o : np.float((m, d))
        Attention output before the output projection.
    """
    qh = split_heads(q, n_heads)
    kh = split_heads(K, n_heads)
    vh = split_heads(V, n_heads)
    scale = 1. / math.sqrt(qh.shape[-1])
    scores = np.matmul(qh, np.swapaxes(kh, -1, -2)) * scale
    scores = np.where(allow[None], scores, -np.inf)
    P = softmax(scores, axis=-1)
    return merge_heads(np.matmul(P, vh))
