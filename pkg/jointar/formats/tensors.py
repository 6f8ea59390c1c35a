"""
Raw tensor records.

A record is the magic ``UFT0``, the rank as u8, each dimension as a
little-endian u32 and then the float32 little-endian payload in C
order. The same reader and writer are used for corpus images and any
other standalone tensor file.
"""
import struct

import numpy as np

from ..errors import FormatError

TENSOR_MAGIC = b'UFT0'

_rank_segment = struct.Struct('<B')
_dim_segment = struct.Struct('<I')


def _read_exact(fobj, nbytes, what):
    data = fobj.read(nbytes)
    if len(data) != nbytes:
        raise FormatError('truncated %s: expected %d bytes, got %d'
                          % (what, nbytes, len(data)))
    return data


def tensor_bytes(array):
    """
    Serialize an array as one UFT0 record.
    """
    array = np.asarray(array)
    if array.ndim > 255:
        raise FormatError('rank %d does not fit in a u8' % array.ndim)
    header = [TENSOR_MAGIC, _rank_segment.pack(array.ndim)]
    header.extend(_dim_segment.pack(d) for d in array.shape)
    payload = np.ascontiguousarray(array, dtype='<f4').tobytes()
    return b''.join(header) + payload


def write_tensor(fobj, array):
    fobj.write(tensor_bytes(array))


def read_tensor(fobj):
    """
    Read one UFT0 record from a binary file object.

    Returns
    -------

    array : np.float32
    """
    magic = _read_exact(fobj, 4, 'tensor magic')
    if magic != TENSOR_MAGIC:
        raise FormatError('bad tensor magic %r' % magic)
    rank = _rank_segment.unpack(_read_exact(fobj, 1, 'tensor rank'))[0]
    shape = tuple(_dim_segment.unpack(_read_exact(fobj, 4, 'tensor dims'))[0]
                  for _ in range(rank))
    count = int(np.prod(shape, dtype=np.int64))
    payload = _read_exact(fobj, 4 * count, 'tensor payload')
    return np.frombuffer(payload, dtype='<f4').reshape(shape).astype(np.float32)


def save_tensor(path, array):
    with open(path, 'wb') as fobj:
        write_tensor(fobj, array)


def load_tensor(path):
    with open(path, 'rb') as fobj:
        return read_tensor(fobj)
