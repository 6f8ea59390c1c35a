"""
Key/value cache for incremental decoding.

The prefix of a stream is appended in one bidirectional call; every
later entry is appended causally, one or more at a time. The outputs
equal the matching rows of a full forward over the concatenated stream.
"""
import numpy as np

from ..errors import CacheOverflow, PolicyViolation, ShapeMismatch
from ..sequence.batching import entry_fields
from .backbone import embed, _check_finite
from .layers import layer_norm_forward, gelu_forward, cached_attention

BIDIRECTIONAL, CAUSAL = 'bidirectional', 'causal'


class KVCache(object):

    """
    Per-layer keys and values of positions [0, fill).

    A cache belongs to one decode session; positions below `fill`
    are never rewritten.
    """

    def __init__(self, config):
        self.config = config
        shape = (config.max_seq, config.d_model)
        self.keys = [np.zeros(shape, config.dtype) for _ in range(config.n_layers)]
        self.values = [np.zeros(shape, config.dtype) for _ in range(config.n_layers)]
        self.fill = 0

    def __len__(self):
        return self.fill

    @property
    def capacity(self):
        return self.config.max_seq


def forward_incremental(params, cache, new_entries, policy, config=None, grid=None):
    """
    Append entries to the cache and return their outputs.

    Parameters
    ----------

    params : ModelParams

    cache : KVCache

    new_entries : list of Entry
        Entries at stream positions [cache.fill, cache.fill + m).

    policy : str
        'bidirectional' for the prefix (only on an empty cache),
        'causal' for everything after it.

    config : ModelConfig (optional)
        Defaults to the cache's config.

    grid : (int, int) (optional)
        Token grid used to index 2D positions.

    Returns
    -------

    z : np.float((m, d_model))
    """
    config = config or cache.config
    m = len(new_entries)
    start = cache.fill
    if start + m > cache.capacity:
        raise CacheOverflow('cannot append %d entries to a cache holding %d of %d'
                            % (m, start, cache.capacity))
    if policy == BIDIRECTIONAL:
        if start != 0:
            raise PolicyViolation('the bidirectional prefix must be appended to an empty cache')
        allow = np.ones((m, m), bool)
    elif policy == CAUSAL:
        if start == 0:
            raise PolicyViolation('causal entries appended before the prefix')
        allow = np.tril(np.ones((m, start + m), bool), k=start)
    else:
        raise ValueError("policy should be one of ['bidirectional', 'causal'], got %r" % (policy,))
    if m == 0:
        return np.zeros((0, config.d_model), config.dtype)

    fields = entry_fields(new_entries, grid or config.grid,
                          config.token_dim, config.d_model, config.dtype)
    if np.any(fields['pos1d'] != start + np.arange(m)):
        raise ShapeMismatch('entries do not continue the cached stream at position %d' % start)
    x, _ = embed(params, fields, config)
    x = x[0]
    stop = start + m
    for l in range(config.n_layers):
        pre = 'blocks.%d.' % l
        a1, _ = layer_norm_forward(x, params[pre + 'ln1.gain'], params[pre + 'ln1.bias'])
        q = a1.dot(params[pre + 'attn.wq'])
        cache.keys[l][start:stop] = a1.dot(params[pre + 'attn.wk'])
        cache.values[l][start:stop] = a1.dot(params[pre + 'attn.wv'])
        o = cached_attention(q, cache.keys[l][:stop], cache.values[l][:stop],
                             allow, config.n_heads)
        h = x + o.dot(params[pre + 'attn.wo'])
        a2, _ = layer_norm_forward(h, params[pre + 'ln2.gain'], params[pre + 'ln2.bias'])
        act, _ = gelu_forward(a2.dot(params[pre + 'ffn.w1']) + params[pre + 'ffn.b1'])
        x = h + act.dot(params[pre + 'ffn.w2']) + params[pre + 'ffn.b2']
        _check_finite(x, l, 'block')
    cache.fill = stop
    z, _ = layer_norm_forward(x, params['final_norm.gain'], params['final_norm.bias'])
    return z
