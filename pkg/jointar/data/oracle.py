"""
Analytic attribute oracle.

Recovers the scene attributes of an image without any learned
component: dominant non-white colour, position from the bounding
box centre, size from the pixel count, and shape by template
matching against the rendered prototypes. On clean renders every
attribute is recovered exactly; the same checks score generated
images.
"""
import numpy as np

from ..codec.vocab import SHAPES, POSITIONS
from .scenes import (IMAGE_SIZE,
                     PALETTE,
                     SceneSpec,
                     anchor,
                     shape_mask)

# a pixel belongs to the object when its darkest channel is below this
FOREGROUND_LEVEL = 0.5

# pixel-count threshold between small (at most 16 px) and large (at least 32 px)
# objects on the 16 x 16 canvas; scaled with the canvas area
SIZE_THRESHOLD = 24


def foreground(img):
    return np.asarray(img).min(axis=2) < FOREGROUND_LEVEL


def extract_attributes(img):
    """
    Oracle attributes of an image.

    Returns
    -------

    spec : SceneSpec
        Fields are None when the image has no foreground pixels.
    """
    img = np.asarray(img, dtype=float)
    image_size = img.shape[0]
    mask = foreground(img)
    count = mask.sum()
    if count == 0:
        return SceneSpec(None, None, None, None)

    mean_color = img[mask].mean(0)
    colors = list(PALETTE)
    distances = [np.sum((mean_color - np.asarray(PALETTE[c]))**2) for c in colors]
    color = colors[int(np.argmin(distances))]

    threshold = SIZE_THRESHOLD * (image_size / float(IMAGE_SIZE))**2
    size = 'large' if count >= threshold else 'small'

    rows = np.nonzero(mask.any(1))[0]
    cols = np.nonzero(mask.any(0))[0]
    centre = np.array([(rows[0] + rows[-1] + 1) / 2., (cols[0] + cols[-1] + 1) / 2.])
    position = min(POSITIONS,
                   key=lambda p: np.sum((centre - np.asarray(anchor(p, image_size)))**2))

    def iou(shape):
        proto = shape_mask(shape, position, size, image_size)
        return (proto & mask).sum() / float((proto | mask).sum())
    shape = max(SHAPES, key=iou)

    return SceneSpec(shape=shape, color=color, position=position, size=size)


def attribute_hits(spec, img):
    """
    Per-attribute agreement between a prompted spec and the oracle
    reading of an image.

    Returns
    -------

    hits : dict
        Maps 'shape', 'color', 'position', 'size' to bool.
    """
    found = extract_attributes(img)
    return dict((field, getattr(found, field) == getattr(spec, field))
                for field in SceneSpec._fields)
