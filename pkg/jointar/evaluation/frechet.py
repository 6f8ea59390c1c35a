r"""
Fréchet distance between Gaussian fits of feature sets.

.. math::

    d^2 = \|\mu_1 - \mu_2\|^2 + \text{tr}(\Sigma_1 + \Sigma_2)
          - 2\,\text{tr}\big((\Sigma_1 \Sigma_2)^{1/2}\big)

The trace term is computed as $\text{tr}\,(A \Sigma_2 A)^{1/2}$ with
$A = \Sigma_1^{1/2}$, which has the same eigenvalues as
$(\Sigma_1\Sigma_2)^{1/2}$ but is symmetric, so both square roots
come from symmetric eigendecompositions.
"""
import warnings

import numpy as np
from scipy import linalg

from ..errors import NumericalFailure, ShapeMismatch

RIDGE = 1e-6


class FeatureMoments(object):

    def __init__(self, mean, cov):
        mean = np.atleast_1d(np.asarray(mean, np.float64))
        cov = np.atleast_2d(np.asarray(cov, np.float64))
        if cov.shape != (mean.shape[0], mean.shape[0]):
            raise ShapeMismatch('covariance %s does not match mean %s' % (cov.shape, mean.shape))
        self.mean = mean
        self.cov = (cov + cov.T) / 2.

    @property
    def dim(self):
        return self.mean.shape[0]

    @staticmethod
    def from_features(features, ridge=RIDGE):
        """
        Sample mean and covariance of the rows of `features`.

        With fewer than dim + 1 rows the covariance is singular and
        `ridge` is added to its diagonal.
        """
        features = np.asarray(features, np.float64)
        if features.ndim != 2 or features.shape[0] == 0:
            raise ShapeMismatch('need a non-empty (n, d) feature array, got %s'
                                % (features.shape,))
        n, d = features.shape
        mean = features.mean(0)
        centered = features - mean
        cov = centered.T.dot(centered) / max(n - 1, 1)
        if n < d + 1:
            warnings.warn('%d feature vectors for dimension %d; adding %s to the diagonal'
                          % (n, d, ridge))
            cov = cov + ridge * np.identity(d)
        return FeatureMoments(mean, cov)


def _psd_sqrt(mat):
    try:
        evals, evecs = linalg.eigh(mat)
    except (linalg.LinAlgError, ValueError) as e:
        raise NumericalFailure('eigendecomposition failed: %s' % e)
    if not np.all(np.isfinite(evals)):
        raise NumericalFailure('non-finite eigenvalues')
    return (evecs * np.sqrt(np.maximum(evals, 0))).dot(evecs.T), evals


def trace_sqrt_product(cov1, cov2):
    """
    tr((cov1 cov2)^{1/2}) for symmetric PSD matrices.
    """
    A, _ = _psd_sqrt(cov1)
    M = A.dot(cov2).dot(A)
    _, evals = _psd_sqrt((M + M.T) / 2.)
    return np.sqrt(np.maximum(evals, 0)).sum()


def frechet_distance(m1, m2):
    """
    Squared Fréchet distance between two `FeatureMoments`.

    Raises
    ------

    ShapeMismatch
        If the dimensions differ.

    NumericalFailure
        If an eigendecomposition fails.
    """
    if m1.dim != m2.dim:
        raise ShapeMismatch('moments of dimension %d and %d' % (m1.dim, m2.dim))
    diff = m1.mean - m2.mean
    value = (diff.dot(diff) + np.trace(m1.cov) + np.trace(m2.cov)
             - 2 * trace_sqrt_product(m1.cov, m2.cov))
    return float(value)
