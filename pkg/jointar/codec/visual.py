r"""
Deterministic linear stand-ins for the visual tokenizer and the
understanding encoder.

The generation codec maps each non-overlapping $2\times 2$ RGB patch
(12 reals) to 4 reals by a matrix $E$ with orthonormal rows,

.. math::

    \ell = E x, \qquad \hat{x} = \text{clip}_{[0,1]}(E^T \ell).

The row space of $E$ contains the three per-channel patch means, so
patches of uniform colour survive the round trip exactly; the fourth
row is a seeded random direction orthogonal to them, and the four
rows are mixed by a seeded random rotation.

The understanding encoder is a frozen seeded projection of $4\times 4$
patches to the backbone width; nothing is ever learned in this module.
"""
from functools import lru_cache

import numpy as np
from scipy import linalg

from ..errors import DimensionMismatch

PATCH = 2            # pixel patch of the generation codec
LATENT_CHANNELS = 4
MERGE = 2            # latent cells merged into one continuous token
ENC_PATCH = 4        # pixel patch of the understanding encoder


def _patchify(img, patch):
    H, W, C = img.shape
    return (img.reshape(H // patch, patch, W // patch, patch, C)
               .transpose(0, 2, 1, 3, 4)
               .reshape(H // patch, W // patch, patch * patch * C))


def _unpatchify(patches, patch, channels=3):
    h, w, _ = patches.shape
    return (patches.reshape(h, w, patch, patch, channels)
                   .transpose(0, 2, 1, 3, 4)
                   .reshape(h * patch, w * patch, channels))


def _check_image(img, divisor):
    img = np.asarray(img)
    if not np.issubdtype(img.dtype, np.floating):
        img = img.astype(np.float64)
    if img.ndim != 3 or img.shape[2] != 3:
        raise DimensionMismatch('expecting an H x W x 3 image, got shape %s'
                                % (img.shape,))
    H, W, _ = img.shape
    if H % divisor or W % divisor:
        raise DimensionMismatch('image dimensions %dx%d are not divisible by %d'
                                % (H, W, divisor))
    return img


@lru_cache(maxsize=16)
def codec_matrix(codec_seed):
    """
    The 4 x 12 matrix $E$ with orthonormal rows used by
    `encode_image` and `decode_image`.
    """
    rng = np.random.default_rng(codec_seed)
    dim = PATCH * PATCH * 3
    means = np.zeros((3, dim))
    for c in range(3):
        means[c, c::3] = 1. / PATCH
    extra = rng.standard_normal(dim)
    extra -= means.T.dot(means.dot(extra))
    extra /= np.linalg.norm(extra)
    basis = np.vstack([means, extra])
    rotation = linalg.qr(rng.standard_normal((LATENT_CHANNELS, LATENT_CHANNELS)))[0]
    E = rotation.dot(basis)
    E.setflags(write=False)
    return E


@lru_cache(maxsize=16)
def encoder_matrix(enc_seed, out_dim):
    """
    Frozen projection of flattened 4 x 4 RGB patches (48 reals)
    to `out_dim` features.
    """
    rng = np.random.default_rng([enc_seed, out_dim])
    dim = ENC_PATCH * ENC_PATCH * 3
    P = rng.standard_normal((dim, out_dim)) / np.sqrt(dim)
    P.setflags(write=False)
    return P


def encode_image(img, codec_seed):
    """
    Encode a toy image into a latent grid.

    Parameters
    ----------

    img : np.float((H, W, 3))
        Pixels in [0,1], H and W even.

    codec_seed : int
        Seed determining $E$.

    Returns
    -------

    grid : np.float((H/2, W/2, 4))
    """
    img = _check_image(img, PATCH)
    E = codec_matrix(codec_seed)
    return _patchify(img, PATCH).dot(E.T.astype(img.dtype, copy=False))


def decode_image(grid, codec_seed, clip=True):
    """
    Map a latent grid back to pixels with $E^T$, clamping to [0,1]
    unless `clip` is False.
    """
    grid = np.asarray(grid)
    if grid.ndim != 3 or grid.shape[2] != LATENT_CHANNELS:
        raise DimensionMismatch('expecting an h x w x %d latent grid, got shape %s'
                                % (LATENT_CHANNELS, grid.shape))
    E = codec_matrix(codec_seed)
    img = _unpatchify(grid.dot(E.astype(grid.dtype, copy=False)), PATCH)
    if clip:
        img = np.clip(img, 0, 1)
    return img


def encode_for_understanding(img, enc_seed, out_dim):
    """
    Frozen encoder features of a toy image.

    Parameters
    ----------

    img : np.float((H, W, 3))
        H and W divisible by 4.

    enc_seed : int

    out_dim : int
        Feature width, equal to the backbone width so features
        enter the embedding space unchanged.

    Returns
    -------

    features : np.float((H/4 * W/4, out_dim))
        One row per 4 x 4 patch, in row-major patch order.
    """
    img = _check_image(img, ENC_PATCH)
    P = encoder_matrix(enc_seed, out_dim)
    patches = _patchify(img, ENC_PATCH)
    patches = patches.reshape((-1, patches.shape[-1]))
    return patches.dot(P.astype(img.dtype, copy=False))


def grid_to_tokens(grid, merge=MERGE):
    """
    Merge `merge` x `merge` latent cells into one continuous token.

    An (h, w, c) grid becomes (h/merge * w/merge) tokens of dimension
    merge*merge*c, in row-major order.
    """
    grid = np.asarray(grid)
    h, w, c = grid.shape
    if h % merge or w % merge:
        raise DimensionMismatch('latent grid %dx%d is not divisible by %d'
                                % (h, w, merge))
    return _patchify(grid, merge).reshape((-1, merge * merge * c))


def tokens_to_grid(tokens, grid_shape, merge=MERGE):
    """
    Inverse of `grid_to_tokens`.
    """
    tokens = np.asarray(tokens)
    h, w, c = grid_shape
    if tokens.shape != ((h // merge) * (w // merge), merge * merge * c):
        raise DimensionMismatch('cannot place tokens of shape %s on a %s grid'
                                % (tokens.shape, (h, w, c)))
    return _unpatchify(tokens.reshape(h // merge, w // merge, -1), merge, channels=c)


def encode_tokens(img, codec_seed, merge=MERGE):
    """
    Image to continuous tokens: `encode_image` followed by patch merging.
    """
    return grid_to_tokens(encode_image(img, codec_seed), merge=merge)


def decode_tokens(tokens, codec_seed, image_size, merge=MERGE, clip=True):
    """
    Continuous tokens back to an image of shape (image_size, image_size, 3).
    """
    h = image_size // PATCH
    grid = tokens_to_grid(tokens, (h, h, LATENT_CHANNELS), merge=merge)
    return decode_image(grid, codec_seed, clip=clip)


def psnr(reference, estimate):
    """
    Peak signal-to-noise ratio in dB for images in [0,1].
    """
    mse = np.mean((np.asarray(reference, float) - np.asarray(estimate, float))**2)
    if mse == 0:
        return np.inf
    return 10 * np.log10(1. / mse)
