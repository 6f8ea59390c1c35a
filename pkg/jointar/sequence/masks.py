r"""
Prefix-LM attention masks.

`allow[i, j]` is True when position $i$ may attend to position $j$.
The first `prefix_len` positions see each other; every later
position sees the whole prefix, the suffix positions before it and
itself.
"""
import numpy as np

from ..errors import ShapeMismatch


class AttentionMask(object):

    def __init__(self, allow, prefix_len=None):
        allow = np.asarray(allow, dtype=bool)
        if allow.ndim != 2 or allow.shape[0] != allow.shape[1]:
            raise ShapeMismatch('attention mask must be square, got %s' % (allow.shape,))
        if not allow.diagonal().all():
            raise ValueError('every position must attend to itself')
        self.allow = allow
        self.prefix_len = prefix_len

    @staticmethod
    def prefix_lm(n, prefix_len):
        """
        Bidirectional block over positions [0, prefix_len), causal after.
        """
        if not 0 <= prefix_len <= n:
            raise ValueError('prefix_len %d outside [0, %d]' % (prefix_len, n))
        allow = np.tril(np.ones((n, n), dtype=bool))
        allow[:prefix_len, :prefix_len] = True
        return AttentionMask(allow, prefix_len)

    @staticmethod
    def causal(n):
        return AttentionMask.prefix_lm(n, 0)

    @property
    def shape(self):
        return self.allow.shape

    def __len__(self):
        return self.allow.shape[0]

    def __getitem__(self, idx):
        return self.allow[idx]
