"""TFRW writer/reader for the engine's weight-file interface.

Format: magic "TFRW", u32 version 1, u32 tensor count; per tensor
u32 name_len, UTF-8 name, u8 dtype (0 = f32), u8 ndim, ndim x u64 dims,
row-major f32 payload. Little-endian throughout.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

MAGIC = b"TFRW"
VERSION = 1


def write(path, tensors: dict[str, np.ndarray]) -> None:
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<II", VERSION, len(tensors)))
        for name, arr in tensors.items():
            arr = np.ascontiguousarray(arr, dtype=np.float32)
            encoded = name.encode("utf-8")
            fh.write(struct.pack("<I", len(encoded)))
            fh.write(encoded)
            fh.write(struct.pack("<BB", 0, arr.ndim))
            fh.write(struct.pack(f"<{arr.ndim}Q", *arr.shape))
            fh.write(arr.tobytes())


def read(path) -> dict[str, np.ndarray]:
    data = Path(path).read_bytes()
    if data[:4] != MAGIC:
        raise ValueError(f"{path}: not a TFRW file")
    version, count = struct.unpack_from("<II", data, 4)
    if version != VERSION:
        raise ValueError(f"{path}: unsupported TFRW version {version}")
    off = 12
    tensors = {}
    for _ in range(count):
        (name_len,) = struct.unpack_from("<I", data, off)
        off += 4
        name = data[off : off + name_len].decode("utf-8")
        off += name_len
        dtype, ndim = struct.unpack_from("<BB", data, off)
        off += 2
        if dtype != 0:
            raise ValueError(f"{path}: tensor {name!r} has unsupported dtype {dtype}")
        dims = struct.unpack_from(f"<{ndim}Q", data, off)
        off += 8 * ndim
        n = int(np.prod(dims)) if ndim else 1
        tensors[name] = np.frombuffer(data, dtype="<f4", count=n, offset=off).reshape(dims)
        off += 4 * n
    return tensors
