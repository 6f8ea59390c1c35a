"""
Frozen oracle feature map for toy-FID.

Images go through the understanding encoder of the codec at width
`D_FEAT`, and the per-patch features are averaged over the image.
Nothing here is trained, so generated and reference sets are always
compared in the same space.
"""
import numpy as np

from ..codec.config import CodecConfig
from ..codec.visual import ENC_PATCH, encode_for_understanding
from ..errors import DimensionMismatch

D_FEAT = 16
FEATURE_ENC_SEED = CodecConfig().enc_seed


def oracle_features(images, enc_seed=FEATURE_ENC_SEED):
    """
    Parameters
    ----------

    images : np.float((N, S, S, 3)) or np.float((S, S, 3))
        S divisible by 4.

    enc_seed : int
        Seed of the frozen encoder projection.

    Returns
    -------

    features : np.float((N, D_FEAT))
    """
    images = np.asarray(images, np.float64)
    if images.ndim == 3:
        images = images[None]
    if images.ndim != 4:
        raise DimensionMismatch('expecting a stack of H x W x 3 images, got shape %s'
                                % (images.shape,))
    if images.shape[0] == 0:
        return np.zeros((0, D_FEAT))
    H, W = images.shape[1:3]
    if H % ENC_PATCH or W % ENC_PATCH:
        raise DimensionMismatch('images of shape %s are not divisible into %dx%d patches'
                                % (images.shape[1:], ENC_PATCH, ENC_PATCH))
    return np.array([encode_for_understanding(img, enc_seed, D_FEAT).mean(0)
                     for img in images])
