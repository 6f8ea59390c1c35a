"""
Per-dimension standardization of continuous image tokens.
"""
from collections import OrderedDict

import numpy as np

from ..errors import ShapeMismatch

MIN_STD = 1e-6
STATS_PREFIX = 'latent.'


class LatentStats(object):

    def __init__(self, mean, std):
        mean = np.array(mean, np.float64)
        std = np.array(std, np.float64)
        if mean.shape != std.shape or mean.ndim != 1:
            raise ShapeMismatch('mean %s and std %s must be equal-length vectors'
                                % (mean.shape, std.shape))
        if np.any(std <= 0) or not np.all(np.isfinite(std)):
            raise ValueError('std must be positive and finite in every dimension')
        mean.setflags(write=False)
        std.setflags(write=False)
        self.mean = mean
        self.std = std

    @staticmethod
    def from_tokens(tokens):
        """
        Statistics over every token of a set of images.

        Parameters
        ----------

        tokens : np.float((..., token_dim))
        """
        tokens = np.asarray(tokens, np.float64)
        flat = tokens.reshape((-1, tokens.shape[-1]))
        return LatentStats(flat.mean(0), np.maximum(flat.std(0), MIN_STD))

    def standardize(self, tokens):
        return (tokens - self.mean) / self.std

    def destandardize(self, tokens):
        return tokens * self.std + self.mean

    def to_tensors(self):
        return OrderedDict([(STATS_PREFIX + 'mean', self.mean),
                            (STATS_PREFIX + 'std', self.std)])

    @staticmethod
    def from_tensors(tensors):
        return LatentStats(tensors[STATS_PREFIX + 'mean'], tensors[STATS_PREFIX + 'std'])
