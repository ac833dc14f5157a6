"""Pure-numpy kernel backend.

Mirrors the signatures of the compiled module ``texwarp._kernels_cy``.
Everything here works on float32 arrays in (channel, row, column) layout.
"""

from __future__ import annotations

import numpy as np


def im2col(x: np.ndarray, kh: int, kw: int, sh: int, sw: int) -> np.ndarray:
    """Unfold ``x`` (C, H, W) into columns of shape (C*kh*kw, n_positions).

    Rows are ordered (channel, kernel row, kernel col); columns enumerate
    output positions row-major. No padding is applied here.
    """
    c, h, w = x.shape
    oh = (h - kh) // sh + 1
    ow = (w - kw) // sw + 1
    sc, srow, scol = x.strides
    view = np.lib.stride_tricks.as_strided(
        x,
        shape=(c, kh, kw, oh, ow),
        strides=(sc, srow, scol, sh * srow, sw * scol),
        writeable=False,
    )
    return view.reshape(c * kh * kw, oh * ow)


def col2im_add(
    cols: np.ndarray, c: int, h: int, w: int, kh: int, kw: int, sh: int, sw: int
) -> np.ndarray:
    """Scatter-add columns (C*kh*kw, n_positions) back onto a (C, H, W) map."""
    oh = (h - kh) // sh + 1
    ow = (w - kw) // sw + 1
    out = np.zeros((c, h, w), dtype=cols.dtype)
    patches = cols.reshape(c, kh, kw, oh, ow)
    for i in range(kh):
        for j in range(kw):
            out[:, i : i + sh * oh : sh, j : j + sw * ow : sw] += patches[:, i, j]
    return out


def maxpool2d(x: np.ndarray, size: int, stride: int) -> np.ndarray:
    c, h, w = x.shape
    oh = (h - size) // stride + 1
    ow = (w - size) // stride + 1
    out = x[:, : stride * oh : stride, : stride * ow : stride].copy()
    for i in range(size):
        for j in range(size):
            if i == 0 and j == 0:
                continue
            np.maximum(
                out,
                x[:, i : i + stride * oh : stride, j : j + stride * ow : stride],
                out=out,
            )
    return out


def upsample_nearest(x: np.ndarray, factor: int) -> np.ndarray:
    if factor == 1:
        return x.copy()
    return np.repeat(np.repeat(x, factor, axis=1), factor, axis=2)
