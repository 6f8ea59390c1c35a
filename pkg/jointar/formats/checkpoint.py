"""
Checkpoint files.

Layout (all integers little-endian)::

    "UFLD"                      4 bytes magic
    version                     u32
    config length, config blob  u32 + ASCII
    tensor count                u32
    per tensor:
        name length, name       u16 + bytes
        rank                    u8
        dtype                   u8   (0 = float32, 1 = float64)
        dims                    u32 each
        data                    little-endian, C order
    CRC32 of everything above   u32

Tensors are stored in the precision of the run, so a float64 run
resumes bitwise. The dtype byte is what distinguishes version 2 from
the float32-only version 1 layout; version 1 files are refused with a
`FormatError` naming both versions.
"""
from collections import OrderedDict
import struct
import zlib

import numpy as np

from ..errors import ChecksumError, FormatError

CHECKPOINT_MAGIC = b'UFLD'
FORMAT_VERSION = 2

_u32 = struct.Struct('<I')
_u16 = struct.Struct('<H')
_u8 = struct.Struct('<B')

_dtype_codes = {0: np.dtype('<f4'), 1: np.dtype('<f8')}
_code_of = {np.dtype(np.float32): 0, np.dtype(np.float64): 1}
_native = {0: np.float32, 1: np.float64}


class Checkpoint(object):

    def __init__(self, config_text, tensors, crc=None):
        """
        Parameters
        ----------

        config_text : str
            The run configuration, verbatim.

        tensors : OrderedDict
            Name to array. Names must be unique ASCII.

        crc : int (optional)
            CRC32 read from disk; set by `load_checkpoint`.
        """
        self.config_text = config_text
        self.tensors = OrderedDict(tensors)
        self.crc = crc

    @property
    def hash(self):
        """
        Eight hex digits of the stored CRC32.
        """
        if self.crc is None:
            self.crc = zlib.crc32(checkpoint_payload(self.config_text, self.tensors))
        return '%08x' % self.crc

    def subset(self, prefix):
        """
        Tensors whose name starts with `prefix`, with the prefix removed.
        """
        return OrderedDict((k[len(prefix):], v) for k, v in self.tensors.items()
                           if k.startswith(prefix))


def checkpoint_payload(config_text, tensors):
    blob = config_text.encode('ascii')
    parts = [CHECKPOINT_MAGIC,
             _u32.pack(FORMAT_VERSION),
             _u32.pack(len(blob)),
             blob,
             _u32.pack(len(tensors))]
    for name, value in tensors.items():
        value = np.asarray(value)
        if value.dtype not in _code_of:
            value = value.astype(np.float32)
        code = _code_of[value.dtype]
        bname = name.encode('ascii')
        parts.append(_u16.pack(len(bname)))
        parts.append(bname)
        parts.append(_u8.pack(value.ndim))
        parts.append(_u8.pack(code))
        parts.extend(_u32.pack(d) for d in value.shape)
        parts.append(np.ascontiguousarray(value, dtype=_dtype_codes[code]).tobytes())
    return b''.join(parts)


def save_checkpoint(path, config_text, tensors):
    """
    Write a checkpoint; returns its CRC32.
    """
    payload = checkpoint_payload(config_text, tensors)
    crc = zlib.crc32(payload)
    with open(path, 'wb') as fobj:
        fobj.write(payload)
        fobj.write(_u32.pack(crc))
    return crc


class _Reader(object):

    def __init__(self, payload):
        self.payload = payload
        self.offset = 0

    def take(self, nbytes):
        if self.offset + nbytes > len(self.payload):
            raise FormatError('truncated checkpoint at byte %d' % self.offset)
        chunk = self.payload[self.offset:self.offset + nbytes]
        self.offset += nbytes
        return chunk

    def unpack(self, segment):
        return segment.unpack(self.take(segment.size))[0]


def load_checkpoint(path):
    """
    Read and verify a checkpoint.

    Raises
    ------

    ChecksumError
        If the trailing CRC32 does not match the payload.

    FormatError
        On bad magic, unsupported version or truncation.
    """
    with open(path, 'rb') as fobj:
        raw = fobj.read()
    if len(raw) < 8 or raw[:4] != CHECKPOINT_MAGIC:
        raise FormatError('%s is not a checkpoint (bad magic)' % path)
    payload, stored = raw[:-4], _u32.unpack(raw[-4:])[0]
    if zlib.crc32(payload) != stored:
        raise ChecksumError('%s: CRC32 mismatch (stored %08x, computed %08x)'
                            % (path, stored, zlib.crc32(payload)))

    reader = _Reader(payload)
    reader.take(4)
    version = reader.unpack(_u32)
    if version != FORMAT_VERSION:
        raise FormatError('%s: checkpoint format version %d, expected %d'
                          % (path, version, FORMAT_VERSION))
    config_text = reader.take(reader.unpack(_u32)).decode('ascii')
    ntensor = reader.unpack(_u32)
    tensors = OrderedDict()
    for _ in range(ntensor):
        name = reader.take(reader.unpack(_u16)).decode('ascii')
        rank = reader.unpack(_u8)
        code = reader.unpack(_u8)
        if code not in _dtype_codes:
            raise FormatError('%s: unknown dtype code %d for tensor %s' % (path, code, name))
        dtype = _dtype_codes[code]
        shape = tuple(reader.unpack(_u32) for _ in range(rank))
        count = int(np.prod(shape, dtype=np.int64))
        data = reader.take(count * dtype.itemsize)
        if name in tensors:
            raise FormatError('%s: duplicate tensor name %s' % (path, name))
        tensors[name] = np.frombuffer(data, dtype=dtype).reshape(shape).astype(_native[code])
    if reader.offset != len(payload):
        raise FormatError('%s: %d trailing bytes before CRC' % (path, len(payload) - reader.offset))
    return Checkpoint(config_text, tensors, crc=stored)
