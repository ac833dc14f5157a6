# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled kernel backend: the memory-bound inner loops of the engine.

Same contracts as ``texwarp._kernels_py`` plus ``im2col_pad``, a fused
unfold that reads the source array with virtual zero or reflection
padding and copies contiguous spans with memcpy. float32, (C, H, W).
"""

import numpy as np

cimport numpy as cnp
from libc.string cimport memcpy, memset

cnp.import_array()

ctypedef cnp.float32_t f32


cdef inline Py_ssize_t _reflect(Py_ssize_t i, Py_ssize_t n) nogil:
    if i < 0:
        return -i
    if i >= n:
        return 2 * n - 2 - i
    return i


def im2col_pad(cnp.ndarray[f32, ndim=3, mode="c"] x,
               int kh, int kw, int sh, int sw,
               int ph, int pw, int reflect,
               Py_ssize_t row0, Py_ssize_t nrows,
               cnp.ndarray[f32, ndim=2, mode="c"] out,
               Py_ssize_t ow):
    """Unfold output rows [row0, row0+nrows) into ``out`` (C*kh*kw, nrows*ow).

    Input indices map as (row0+oi)*sh + ki - ph; out-of-range reads are
    zero (reflect=0) or reflected without edge repeat (reflect=1).
    """
    cdef Py_ssize_t c = x.shape[0], h = x.shape[1], w = x.shape[2]
    cdef f32[:, :, ::1] xv = x
    cdef f32[:, ::1] ov = out
    cdef Py_ssize_t ch, ki, kj, oi, oj, ii, jj, row, off, lo, hi
    cdef f32 *dst
    cdef const f32 *src
    with nogil:
        for ch in range(c):
            for ki in range(kh):
                for kj in range(kw):
                    row = (ch * kh + ki) * kw + kj
                    off = kj - pw
                    for oi in range(nrows):
                        dst = &ov[row, oi * ow]
                        ii = (row0 + oi) * sh + ki - ph
                        if ii < 0 or ii >= h:
                            if reflect:
                                ii = _reflect(ii, h)
                            else:
                                memset(dst, 0, ow * sizeof(f32))
                                continue
                        src = &xv[ch, ii, 0]
                        if sw == 1:
                            lo = -off if off < 0 else 0
                            if lo > ow:
                                lo = ow
                            hi = w - off
                            if hi > ow:
                                hi = ow
                            if hi < lo:
                                hi = lo
                            for oj in range(lo):
                                dst[oj] = src[_reflect(oj + off, w)] if reflect else 0.0
                            if hi > lo:
                                memcpy(dst + lo, src + lo + off, (hi - lo) * sizeof(f32))
                            for oj in range(hi, ow):
                                dst[oj] = src[_reflect(oj + off, w)] if reflect else 0.0
                        else:
                            for oj in range(ow):
                                jj = oj * sw + off
                                if 0 <= jj < w:
                                    dst[oj] = src[jj]
                                elif reflect:
                                    dst[oj] = src[_reflect(jj, w)]
                                else:
                                    dst[oj] = 0.0
    return out


def im2col(cnp.ndarray[f32, ndim=3, mode="c"] x,
           int kh, int kw, int sh, int sw):
    cdef Py_ssize_t h = x.shape[1], w = x.shape[2]
    cdef Py_ssize_t oh = (h - kh) // sh + 1
    cdef Py_ssize_t ow = (w - kw) // sw + 1
    out = np.empty((x.shape[0] * kh * kw, oh * ow), dtype=np.float32)
    im2col_pad(x, kh, kw, sh, sw, 0, 0, 0, 0, oh, out, ow)
    return out


def im2col_rows(cnp.ndarray[f32, ndim=3, mode="c"] x, int p, int s):
    """Patch-major unfold: (n_positions, C*p*p), rows are whole patches."""
    cdef Py_ssize_t c = x.shape[0], h = x.shape[1], w = x.shape[2]
    cdef Py_ssize_t gh = (h - p) // s + 1
    cdef Py_ssize_t gw = (w - p) // s + 1
    out_arr = np.empty((gh * gw, c * p * p), dtype=np.float32)
    cdef f32[:, ::1] out = out_arr
    cdef f32[:, :, ::1] xv = x
    cdef Py_ssize_t oi, oj, ch, ki, pos
    cdef f32 *dst
    with nogil:
        for oi in range(gh):
            for oj in range(gw):
                pos = oi * gw + oj
                dst = &out[pos, 0]
                for ch in range(c):
                    for ki in range(p):
                        memcpy(dst, &xv[ch, oi * s + ki, oj * s], p * sizeof(f32))
                        dst += p
    return out_arr


def col2im_add_rows(cnp.ndarray[f32, ndim=2, mode="c"] rows,
                    Py_ssize_t c, Py_ssize_t h, Py_ssize_t w,
                    int p, int s, Py_ssize_t gh, Py_ssize_t gw):
    """Scatter-add patch-major rows (n_positions, C*p*p) onto (C, H, W)."""
    out_arr = np.zeros((c, h, w), dtype=np.float32)
    cdef f32[:, :, ::1] out = out_arr
    cdef f32[:, ::1] rv = rows
    cdef Py_ssize_t oi, oj, ch, ki, kj, pos
    cdef f32 *dst
    cdef const f32 *src
    with nogil:
        for oi in range(gh):
            for oj in range(gw):
                pos = oi * gw + oj
                src = &rv[pos, 0]
                for ch in range(c):
                    for ki in range(p):
                        dst = &out[ch, oi * s + ki, oj * s]
                        for kj in range(p):
                            dst[kj] += src[kj]
                        src += p
    return out_arr


def col2im_add(cnp.ndarray[f32, ndim=2, mode="c"] cols,
               Py_ssize_t c, Py_ssize_t h, Py_ssize_t w,
               int kh, int kw, int sh, int sw):
    cdef Py_ssize_t oh = (h - kh) // sh + 1
    cdef Py_ssize_t ow = (w - kw) // sw + 1
    out_arr = np.zeros((c, h, w), dtype=np.float32)
    cdef f32[:, :, ::1] out = out_arr
    cdef f32[:, ::1] cv = cols
    cdef Py_ssize_t ch, ki, kj, oi, oj, row
    cdef f32 *dst
    cdef const f32 *src
    with nogil:
        for ch in range(c):
            for ki in range(kh):
                for kj in range(kw):
                    row = (ch * kh + ki) * kw + kj
                    for oi in range(oh):
                        dst = &out[ch, oi * sh + ki, kj]
                        src = &cv[row, oi * ow]
                        if sw == 1:
                            for oj in range(ow):
                                dst[oj] += src[oj]
                        else:
                            for oj in range(ow):
                                dst[oj * sw] += src[oj]
    return out_arr


def maxpool2d(cnp.ndarray[f32, ndim=3, mode="c"] x, int size, int stride):
    cdef Py_ssize_t c = x.shape[0], h = x.shape[1], w = x.shape[2]
    cdef Py_ssize_t oh = (h - size) // stride + 1
    cdef Py_ssize_t ow = (w - size) // stride + 1
    out_arr = np.empty((c, oh, ow), dtype=np.float32)
    cdef f32[:, :, ::1] out = out_arr
    cdef f32[:, :, ::1] xv = x
    cdef Py_ssize_t ch, oi, oj, i, j
    cdef f32 best, v
    with nogil:
        for ch in range(c):
            for oi in range(oh):
                for oj in range(ow):
                    best = xv[ch, oi * stride, oj * stride]
                    for i in range(size):
                        for j in range(size):
                            v = xv[ch, oi * stride + i, oj * stride + j]
                            if v > best:
                                best = v
                    out[ch, oi, oj] = best
    return out_arr


def upsample_nearest(cnp.ndarray[f32, ndim=3, mode="c"] x, int factor):
    cdef Py_ssize_t c = x.shape[0], h = x.shape[1], w = x.shape[2]
    out_arr = np.empty((c, h * factor, w * factor), dtype=np.float32)
    cdef f32[:, :, ::1] out = out_arr
    cdef f32[:, :, ::1] xv = x
    cdef Py_ssize_t ch, i, j, fi, fj, ow = w * factor
    cdef f32 v
    cdef f32 *row0
    with nogil:
        for ch in range(c):
            for i in range(h):
                row0 = &out[ch, i * factor, 0]
                for j in range(w):
                    v = xv[ch, i, j]
                    for fj in range(factor):
                        row0[j * factor + fj] = v
                for fi in range(1, factor):
                    memcpy(&out[ch, i * factor + fi, 0], row0, ow * sizeof(f32))
    return out_arr
