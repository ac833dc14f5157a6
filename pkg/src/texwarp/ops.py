"""Dense-tensor primitives: convolution, pooling, upsampling, statistics.

A feature map is a float32 ndarray of shape (channels, height, width); a
convolution kernel is a float32 ndarray of shape (out_channels,
in_channels, k_h, k_w) with an optional per-out-channel bias vector.
All functions are pure and deterministic.

Convolutions run as im2col followed by one BLAS matmul per row block;
the unfold/scatter loops live in the kernel backend (compiled or numpy).
"""

from __future__ import annotations

from typing import Literal, Optional

import numpy as np

from texwarp import backend
from texwarp.errors import ShapeMismatchError, TexwarpError

PadMode = Literal["zero", "reflect"]

# Cap on the im2col scratch buffer; blocks of output rows are sized to fit.
_COL_BUFFER_BYTES = 64 * 1024 * 1024


def _as_f32(x: np.ndarray) -> np.ndarray:
    return np.ascontiguousarray(x, dtype=np.float32)


def _pad(x: np.ndarray, padding: int, mode: PadMode) -> np.ndarray:
    if padding == 0:
        return x
    spec = ((0, 0), (padding, padding), (padding, padding))
    if mode == "zero":
        return np.pad(x, spec)
    if mode == "reflect":
        return np.pad(x, spec, mode="reflect")
    raise TexwarpError(f"unknown padding mode {mode!r}")


def conv2d(
    x: np.ndarray,
    weight: np.ndarray,
    bias: Optional[np.ndarray] = None,
    stride: int = 1,
    padding: int = 0,
    pad_mode: PadMode = "zero",
) -> np.ndarray:
    """Cross-correlate ``x`` (C, H, W) with ``weight`` (O, C, kh, kw).

    Output spatial dims are floor((dim + 2*padding - k) / stride) + 1.
    """
    x = _as_f32(x)
    weight = _as_f32(weight)
    c, h, w = x.shape
    oc, ic, kh, kw = weight.shape
    if ic != c:
        raise ShapeMismatchError("conv2d input channels vs kernel", weight.shape, x.shape)
    if pad_mode not in ("zero", "reflect"):
        raise TexwarpError(f"unknown padding mode {pad_mode!r}")
    hp, wp = h + 2 * padding, w + 2 * padding
    if kh > hp or kw > wp:
        raise ShapeMismatchError("conv2d kernel vs padded input", (kh, kw), (hp, wp))
    oh = (hp - kh) // stride + 1
    ow = (wp - kw) // stride + 1

    wmat = weight.reshape(oc, ic * kh * kw)
    out = np.empty((oc, oh * ow), dtype=np.float32)
    bytes_per_row = ic * kh * kw * ow * 4
    rows_per_block = min(oh, max(1, _COL_BUFFER_BYTES // max(1, bytes_per_row)))

    if hasattr(backend.kernels, "im2col_pad"):
        # fused path: unfold with virtual padding straight into one
        # reused block buffer, then a BLAS matmul per block
        reflect = 1 if pad_mode == "reflect" else 0
        colbuf = np.empty((ic * kh * kw, rows_per_block * ow), dtype=np.float32)
        for r0 in range(0, oh, rows_per_block):
            nrows = min(rows_per_block, oh - r0)
            block = colbuf if nrows == rows_per_block else np.empty(
                (ic * kh * kw, nrows * ow), dtype=np.float32
            )
            backend.kernels.im2col_pad(
                x, kh, kw, stride, stride, padding, padding, reflect, r0, nrows, block, ow
            )
            np.matmul(wmat, block, out=out[:, r0 * ow : (r0 + nrows) * ow])
    else:
        xp = np.ascontiguousarray(_pad(x, padding, pad_mode))
        for r0 in range(0, oh, rows_per_block):
            r1 = min(r0 + rows_per_block, oh)
            sub = xp[:, r0 * stride : (r1 - 1) * stride + kh, :]
            cols = backend.im2col(np.ascontiguousarray(sub), kh, kw, stride, stride)
            np.matmul(wmat, cols, out=out[:, r0 * ow : r1 * ow])

    out = out.reshape(oc, oh, ow)
    if bias is not None:
        out += np.asarray(bias, dtype=np.float32).reshape(oc, 1, 1)
    return out


def conv_transpose2d(
    x: np.ndarray,
    weight: np.ndarray,
    bias: Optional[np.ndarray] = None,
    stride: int = 1,
) -> np.ndarray:
    """Adjoint of :func:`conv2d` (no padding).

    ``x`` has shape (K, H, W) and ``weight`` (K, C, kh, kw): each input
    channel selects one filter, whose stride-spaced copies are scaled by
    the activations and summed. Output is (C, (H-1)*stride + kh, ...).
    """
    x = _as_f32(x)
    weight = _as_f32(weight)
    k, h, w = x.shape
    kf, c, kh, kw = weight.shape
    if kf != k:
        raise ShapeMismatchError(
            "conv_transpose2d input channels vs filter bank", weight.shape, x.shape
        )
    oh = (h - 1) * stride + kh
    ow = (w - 1) * stride + kw
    wmat = weight.reshape(k, c * kh * kw)
    cols = wmat.T @ x.reshape(k, h * w)
    out = backend.col2im_add(np.ascontiguousarray(cols), c, oh, ow, kh, kw, stride, stride)
    if bias is not None:
        out += np.asarray(bias, dtype=np.float32).reshape(c, 1, 1)
    return out


def max_pool2d(x: np.ndarray, size: int = 2, stride: int = 2) -> np.ndarray:
    """Windowed max with floor semantics (odd trailing rows/cols dropped)."""
    x = _as_f32(x)
    _, h, w = x.shape
    if size > h or size > w:
        raise ShapeMismatchError("max_pool2d window vs input", (size, size), (h, w))
    return backend.maxpool2d(x, size, stride)


def upsample_nearest(x: np.ndarray, factor: int) -> np.ndarray:
    """Replicate each pixel into a factor x factor block."""
    if factor < 1:
        raise TexwarpError(f"upsample factor must be >= 1, got {factor}")
    return backend.upsample_nearest(_as_f32(x), factor)


def relu(x: np.ndarray) -> np.ndarray:
    return np.maximum(_as_f32(x), np.float32(0.0))


def channel_stats(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-channel mean and population standard deviation over space.

    Accumulates in float64; returns two float64 vectors of length C.
    """
    x = np.asarray(x)
    mean = x.mean(axis=(1, 2), dtype=np.float64)
    std = x.std(axis=(1, 2), dtype=np.float64)
    return mean, std
