"""Binary tensor files (".vt").

Layout: magic `VTEN`, version u32, ndim u32, one u64 per extent, dtype code
u32 (1 = float32), then the row-major little-endian payload. Everything is
little-endian regardless of host byte order.
"""

import os
import struct

import numpy as np

from ..errors import ShapeError

MAGIC = b"VTEN"
VERSION = 1
DTYPE_F32 = 1


def save_tensor(path: str | os.PathLike, array: np.ndarray) -> None:
    """Write a float32 tensor. Non-float32 input is converted."""
    arr = np.ascontiguousarray(array, dtype=np.float32)
    if not np.all(np.isfinite(arr)):
        raise ShapeError("refusing to serialize non-finite values")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<II", VERSION, arr.ndim))
        fh.write(struct.pack("<%dQ" % arr.ndim, *arr.shape))
        fh.write(struct.pack("<I", DTYPE_F32))
        fh.write(arr.astype("<f4", copy=False).tobytes())


def load_tensor(path: str | os.PathLike) -> np.ndarray:
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != MAGIC:
            raise ShapeError(f"{path}: bad magic {magic!r}")
        version, ndim = struct.unpack("<II", fh.read(8))
        if version != VERSION:
            raise ShapeError(f"{path}: unsupported version {version}")
        shape = struct.unpack("<%dQ" % ndim, fh.read(8 * ndim)) if ndim else ()
        (dtype_code,) = struct.unpack("<I", fh.read(4))
        if dtype_code != DTYPE_F32:
            raise ShapeError(f"{path}: unsupported dtype code {dtype_code}")
        count = int(np.prod(shape, dtype=np.int64)) if ndim else 1
        payload = fh.read(4 * count)
        if len(payload) != 4 * count:
            raise ShapeError(f"{path}: truncated payload")
    arr = np.frombuffer(payload, dtype="<f4").astype(np.float32).reshape(shape)
    return arr
