"""TFRW binary named-tensor file format.

Layout (little-endian):
    magic   4 bytes  "TFRW"
    version u32      currently 1
    count   u32      number of tensors
    per tensor:
        name_len u32, name (UTF-8), dtype u8 (0 = f32), ndim u8,
        ndim x u64 dims, row-major f32 payload
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from texwarp.errors import (
    BadMagicError,
    TruncatedFileError,
    UnsupportedVersionError,
    WeightFormatError,
)

MAGIC = b"TFRW"
VERSION = 1
DTYPE_F32 = 0


def write_tensors(path: str | Path, tensors: dict[str, np.ndarray]) -> None:
    """Serialize ``tensors`` (insertion order preserved) to ``path``."""
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<II", VERSION, len(tensors)))
        for name, arr in tensors.items():
            arr = np.ascontiguousarray(arr, dtype=np.float32)
            encoded = name.encode("utf-8")
            fh.write(struct.pack("<I", len(encoded)))
            fh.write(encoded)
            fh.write(struct.pack("<BB", DTYPE_F32, arr.ndim))
            fh.write(struct.pack(f"<{arr.ndim}Q", *arr.shape))
            fh.write(arr.tobytes())


def read_tensors(path: str | Path) -> dict[str, np.ndarray]:
    """Parse a TFRW file into name -> float32 ndarray (read-only)."""
    data = Path(path).read_bytes()
    if len(data) < 12:
        raise TruncatedFileError(f"{path}: file shorter than header")
    if data[:4] != MAGIC:
        raise BadMagicError(f"{path}: bad magic {data[:4]!r}")
    version, count = struct.unpack_from("<II", data, 4)
    if version != VERSION:
        raise UnsupportedVersionError(f"{path}: version {version}, expected {VERSION}")

    tensors: dict[str, np.ndarray] = {}
    off = 12

    def take(n: int) -> int:
        nonlocal off
        if off + n > len(data):
            raise TruncatedFileError(f"{path}: truncated at offset {off}")
        off += n
        return off - n

    for _ in range(count):
        (name_len,) = struct.unpack_from("<I", data, take(4))
        name = data[take(name_len) : off].decode("utf-8")
        dtype, ndim = struct.unpack_from("<BB", data, take(2))
        if dtype != DTYPE_F32:
            raise WeightFormatError(f"{path}: tensor {name!r} has unknown dtype {dtype}")
        dims = struct.unpack_from(f"<{ndim}Q", data, take(8 * ndim))
        n_elem = 1
        for d in dims:
            n_elem *= d
        start = take(4 * n_elem)
        arr = np.frombuffer(data, dtype="<f4", count=n_elem, offset=start).reshape(dims)
        arr.flags.writeable = False
        tensors[name] = arr
    return tensors
