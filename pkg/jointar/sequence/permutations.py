"""
Generation orders of the image-token grid.
"""
import numpy as np

from ..errors import InvalidPermutation

RASTER, RANDOM = 'raster', 'random'


class Permutation(object):

    def __init__(self, order):
        """
        Parameters
        ----------

        order : sequence of int
            order[k] is the grid cell (row-major index) generated
            k-th. Must be a bijection on {0, ..., n-1}.
        """
        order = np.asarray(order)
        if (order.ndim != 1 or order.size == 0 or
            not np.issubdtype(order.dtype, np.integer) or
            not np.array_equal(np.sort(order), np.arange(order.size))):
            raise InvalidPermutation('not a bijection on {0,...,n-1}: %s' % (order,))
        self.order = order.astype(np.int64)
        self.order.setflags(write=False)

    @staticmethod
    def identity(n):
        return Permutation(np.arange(n))

    def __len__(self):
        return self.order.size

    def __getitem__(self, k):
        return int(self.order[k])

    def __eq__(self, other):
        return isinstance(other, Permutation) and np.array_equal(self.order, other.order)

    def __repr__(self):
        return 'Permutation(%s)' % list(self.order)

    @property
    def is_raster(self):
        return np.array_equal(self.order, np.arange(self.order.size))

    def inverse(self):
        inv = np.empty_like(self.order)
        inv[self.order] = np.arange(self.order.size)
        return Permutation(inv)


def sample_permutation(mode, n_img, rng):
    """
    Draw a generation order.

    Parameters
    ----------

    mode : str
        'raster' gives the identity; 'random' a uniform draw over
        all n_img! orders.

    n_img : int

    rng : np.random.Generator

    Returns
    -------

    perm : Permutation
    """
    if n_img < 1:
        raise ValueError('n_img must be at least 1')
    if mode == RASTER:
        return Permutation.identity(n_img)
    elif mode == RANDOM:
        return Permutation(rng.permutation(n_img))
    raise ValueError("mode should be one of ['raster', 'random'], got %r" % (mode,))
