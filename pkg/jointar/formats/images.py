"""
Binary PPM (P6, maxval 255) image dumps.
"""
import re

import numpy as np

from ..errors import FormatError

_header = re.compile(rb'^P6\s+(?:#[^\n]*\s+)*(\d+)\s+(?:#[^\n]*\s+)*(\d+)\s+(?:#[^\n]*\s+)*(\d+)\s')


def to_bytes(img):
    """
    Quantize an image in [0,1] to 8 bits: round(255 * clamp(x)).
    """
    img = np.clip(np.asarray(img, dtype=np.float64), 0, 1)
    return np.round(255 * img).astype(np.uint8)


def write_ppm(path, img):
    data = to_bytes(img)
    if data.ndim != 3 or data.shape[2] != 3:
        raise FormatError('PPM images must be H x W x 3, got %s' % (data.shape,))
    H, W, _ = data.shape
    with open(path, 'wb') as fobj:
        fobj.write(b'P6\n%d %d\n255\n' % (W, H))
        fobj.write(data.tobytes())


def read_ppm(path):
    """
    Read a P6 file written by `write_ppm` and re-normalize to [0,1].
    """
    with open(path, 'rb') as fobj:
        raw = fobj.read()
    match = _header.match(raw)
    if match is None:
        raise FormatError('%s is not a binary PPM (P6) file' % path)
    W, H, maxval = [int(v) for v in match.groups()]
    if maxval != 255:
        raise FormatError('%s: only maxval 255 is supported, got %d' % (path, maxval))
    payload = raw[match.end():]
    if len(payload) != H * W * 3:
        raise FormatError('%s: expected %d bytes of pixels, got %d'
                          % (path, H * W * 3, len(payload)))
    return np.frombuffer(payload, dtype=np.uint8).reshape((H, W, 3)) / 255.
