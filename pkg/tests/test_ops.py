"""Tensor-core primitives against naive loop oracles."""

import numpy as np
import pytest

from texwarp import ops
from texwarp.errors import ShapeMismatchError

# ---------------------------------------------------------------------------
# Naive reference implementations. Plain Python loops, independent of the
# im2col path under test.
# ---------------------------------------------------------------------------


def naive_conv2d(x, weight, bias=None, stride=1, padding=0, pad_mode="zero"):
    c, h, w = x.shape
    oc, ic, kh, kw = weight.shape
    assert ic == c
    if padding:
        if pad_mode == "zero":
            xp = np.pad(x, ((0, 0), (padding, padding), (padding, padding)))
        else:
            xp = np.pad(x, ((0, 0), (padding, padding), (padding, padding)), mode="reflect")
    else:
        xp = x
    hp, wp = xp.shape[1:]
    oh = (hp - kh) // stride + 1
    ow = (wp - kw) // stride + 1
    out = np.zeros((oc, oh, ow), dtype=np.float64)
    for o in range(oc):
        for i in range(oh):
            for j in range(ow):
                acc = 0.0
                for ci in range(c):
                    for a in range(kh):
                        for b in range(kw):
                            acc += float(xp[ci, i * stride + a, j * stride + b]) * float(
                                weight[o, ci, a, b]
                            )
                out[o, i, j] = acc + (float(bias[o]) if bias is not None else 0.0)
    return out


def naive_conv_transpose2d(x, weight, bias=None, stride=1):
    k, h, w = x.shape
    kf, c, kh, kw = weight.shape
    assert kf == k
    oh = (h - 1) * stride + kh
    ow = (w - 1) * stride + kw
    out = np.zeros((c, oh, ow), dtype=np.float64)
    for f in range(k):
        for i in range(h):
            for j in range(w):
                v = float(x[f, i, j])
                for ci in range(c):
                    for a in range(kh):
                        for b in range(kw):
                            out[ci, i * stride + a, j * stride + b] += v * float(
                                weight[f, ci, a, b]
                            )
    if bias is not None:
        out += np.asarray(bias, dtype=np.float64).reshape(c, 1, 1)
    return out


def naive_max_pool2d(x, size, stride):
    c, h, w = x.shape
    oh = (h - size) // stride + 1
    ow = (w - size) // stride + 1
    out = np.empty((c, oh, ow), dtype=x.dtype)
    for ci in range(c):
        for i in range(oh):
            for j in range(ow):
                out[ci, i, j] = x[
                    ci, i * stride : i * stride + size, j * stride : j * stride + size
                ].max()
    return out


def naive_channel_stats(x):
    c = x.shape[0]
    means = np.empty(c)
    stds = np.empty(c)
    for ci in range(c):
        vals = x[ci].astype(np.float64).ravel()
        m = vals.sum() / vals.size
        stds[ci] = np.sqrt(((vals - m) ** 2).sum() / vals.size)
        means[ci] = m
    return means, stds


def rel_err(got, ref):
    ref = np.asarray(ref, dtype=np.float64)
    scale = max(1e-12, np.abs(ref).max())
    return np.abs(np.asarray(got, dtype=np.float64) - ref).max() / scale


# ---------------------------------------------------------------------------
# conv2d
# ---------------------------------------------------------------------------


class TestConv2d:
    def test_identity_kernel(self):
        rng = np.random.default_rng(0)
        x = rng.standard_normal((1, 5, 5)).astype(np.float32)
        k = np.zeros((1, 1, 3, 3), dtype=np.float32)
        k[0, 0, 1, 1] = 1.0
        out = ops.conv2d(x, k, stride=1, padding=1)
        np.testing.assert_array_equal(out, x)

    def test_full_window_sum(self):
        x = np.array([[[1.0, 2.0], [3.0, 4.0]]], dtype=np.float32)
        k = np.ones((1, 1, 2, 2), dtype=np.float32)
        out = ops.conv2d(x, k)
        assert out.shape == (1, 1, 1)
        assert out[0, 0, 0] == 10.0

    def test_matches_naive_oracle(self):
        rng = np.random.default_rng(1)
        x = rng.standard_normal((4, 8, 8)).astype(np.float32)
        k = rng.standard_normal((6, 4, 3, 3)).astype(np.float32)
        ref = naive_conv2d(x, k)
        got = ops.conv2d(x, k)
        assert rel_err(got, ref) <= 1e-5

    @pytest.mark.parametrize("pad_mode", ["zero", "reflect"])
    def test_random_instances(self, pad_mode):
        rng = np.random.default_rng(2)
        for _ in range(20):
            c = int(rng.integers(1, 5))
            oc = int(rng.integers(1, 5))
            kh = int(rng.integers(1, 4))
            kw = int(rng.integers(1, 4))
            h = int(rng.integers(kh + 1, 10))
            w = int(rng.integers(kw + 1, 10))
            stride = int(rng.integers(1, 3))
            padding = int(rng.integers(0, 2)) if min(h, w) > 1 else 0
            x = rng.standard_normal((c, h, w)).astype(np.float32)
            k = rng.standard_normal((oc, c, kh, kw)).astype(np.float32)
            b = rng.standard_normal(oc).astype(np.float32)
            ref = naive_conv2d(x, k, b, stride, padding, pad_mode)
            got = ops.conv2d(x, k, b, stride, padding, pad_mode)
            assert got.shape == ref.shape
            assert rel_err(got, ref) <= 1e-5

    def test_channel_mismatch_raises(self):
        x = np.zeros((3, 4, 4), dtype=np.float32)
        k = np.zeros((2, 4, 3, 3), dtype=np.float32)
        with pytest.raises(ShapeMismatchError) as ei:
            ops.conv2d(x, k)
        assert "(3, 4, 4)" in str(ei.value) and "(2, 4, 3, 3)" in str(ei.value)

    def test_kernel_larger_than_input_raises(self):
        x = np.zeros((1, 2, 2), dtype=np.float32)
        k = np.zeros((1, 1, 3, 3), dtype=np.float32)
        with pytest.raises(ShapeMismatchError):
            ops.conv2d(x, k)

    def test_deterministic(self):
        rng = np.random.default_rng(3)
        x = rng.standard_normal((3, 16, 16)).astype(np.float32)
        k = rng.standard_normal((5, 3, 3, 3)).astype(np.float32)
        a = ops.conv2d(x, k, padding=1, pad_mode="reflect")
        b = ops.conv2d(x, k, padding=1, pad_mode="reflect")
        np.testing.assert_array_equal(a, b)


# ---------------------------------------------------------------------------
# conv_transpose2d
# ---------------------------------------------------------------------------


class TestConvTranspose2d:
    def test_one_hot_selects_filter(self):
        x = np.zeros((2, 1, 1), dtype=np.float32)
        x[1, 0, 0] = 1.0
        bank = np.arange(8, dtype=np.float32).reshape(2, 1, 2, 2)
        out = ops.conv_transpose2d(x, bank)
        np.testing.assert_array_equal(out, bank[1])

    def test_overlap_count_map(self):
        x = np.ones((1, 3, 3), dtype=np.float32)
        k = np.ones((1, 1, 2, 2), dtype=np.float32)
        out = ops.conv_transpose2d(x, k, stride=1)
        expected = naive_conv_transpose2d(x, k, stride=1)
        np.testing.assert_array_equal(out, expected.astype(np.float32))
        # interior cells overlap 4 ways, corners once
        assert out[0, 0, 0] == 1.0 and out[0, 1, 1] == 4.0

    def test_random_instances(self):
        rng = np.random.default_rng(4)
        for _ in range(20):
            k = int(rng.integers(1, 5))
            c = int(rng.integers(1, 5))
            kh = int(rng.integers(1, 4))
            kw = int(rng.integers(1, 4))
            h = int(rng.integers(1, 7))
            w = int(rng.integers(1, 7))
            stride = int(rng.integers(1, 3))
            x = rng.standard_normal((k, h, w)).astype(np.float32)
            bank = rng.standard_normal((k, c, kh, kw)).astype(np.float32)
            ref = naive_conv_transpose2d(x, bank, stride=stride)
            got = ops.conv_transpose2d(x, bank, stride=stride)
            assert got.shape == ref.shape
            assert rel_err(got, ref) <= 1e-5

    def test_channel_mismatch_raises(self):
        x = np.zeros((3, 2, 2), dtype=np.float32)
        bank = np.zeros((2, 1, 2, 2), dtype=np.float32)
        with pytest.raises(ShapeMismatchError):
            ops.conv_transpose2d(x, bank)

    def test_adjoint_of_conv2d(self):
        rng = np.random.default_rng(5)
        for stride in (1, 2):
            c, oc, kh, kw = 3, 4, 3, 2
            h = kh + 3 * stride  # (h - kh) divisible by stride
            w = kw + 2 * stride
            x = rng.standard_normal((c, h, w)).astype(np.float32)
            kern = rng.standard_normal((oc, c, kh, kw)).astype(np.float32)
            y_shape = ops.conv2d(x, kern, stride=stride).shape
            y = rng.standard_normal(y_shape).astype(np.float32)
            lhs = float(np.sum(ops.conv2d(x, kern, stride=stride) * y))
            rhs = float(np.sum(x * ops.conv_transpose2d(y, kern, stride=stride)))
            assert abs(lhs - rhs) <= 1e-4 * max(1.0, abs(lhs))


# ---------------------------------------------------------------------------
# pooling / upsampling / relu / stats
# ---------------------------------------------------------------------------


class TestMaxPool:
    def test_two_by_two(self):
        x = np.array([[[1.0, 2.0], [3.0, 4.0]]], dtype=np.float32)
        out = ops.max_pool2d(x)
        np.testing.assert_array_equal(out, [[[4.0]]])

    def test_constant_map_halves(self):
        x = np.full((2, 6, 6), 3.5, dtype=np.float32)
        out = ops.max_pool2d(x)
        assert out.shape == (2, 3, 3)
        assert (out == 3.5).all()

    def test_floor_semantics_on_odd_dims(self):
        rng = np.random.default_rng(6)
        x = rng.standard_normal((3, 9, 9)).astype(np.float32)
        ref = naive_max_pool2d(x, 2, 2)
        got = ops.max_pool2d(x)
        assert got.shape == (3, 4, 4)
        np.testing.assert_array_equal(got, ref)

    def test_window_too_large_raises(self):
        with pytest.raises(ShapeMismatchError):
            ops.max_pool2d(np.zeros((1, 1, 1), dtype=np.float32))


class TestUpsample:
    def test_factor_one_identity(self):
        x = np.arange(12, dtype=np.float32).reshape(3, 2, 2)
        np.testing.assert_array_equal(ops.upsample_nearest(x, 1), x)

    def test_single_pixel(self):
        x = np.array([[[7.0]]], dtype=np.float32)
        out = ops.upsample_nearest(x, 2)
        np.testing.assert_array_equal(out, np.full((1, 2, 2), 7.0, dtype=np.float32))

    def test_pool_roundtrip(self):
        rng = np.random.default_rng(7)
        x = np.abs(rng.standard_normal((2, 5, 4))).astype(np.float32)
        up = ops.upsample_nearest(x, 2)
        down = ops.max_pool2d(up, 2, 2)
        np.testing.assert_array_equal(down, x)


class TestRelu:
    def test_all_negative(self):
        x = -np.ones((2, 3, 3), dtype=np.float32)
        assert (ops.relu(x) == 0).all()

    def test_all_positive_identity(self):
        x = np.ones((2, 3, 3), dtype=np.float32)
        np.testing.assert_array_equal(ops.relu(x), x)

    def test_mixed(self):
        rng = np.random.default_rng(8)
        x = rng.standard_normal((3, 4, 4)).astype(np.float32)
        ref = np.where(x > 0, x, 0).astype(np.float32)
        np.testing.assert_array_equal(ops.relu(x), ref)


class TestChannelStats:
    def test_two_values(self):
        x = np.array([[[1.0, 3.0]]], dtype=np.float32)
        mean, std = ops.channel_stats(x)
        assert mean[0] == 2.0 and std[0] == 1.0

    def test_constant_channel(self):
        x = np.full((2, 4, 4), 5.0, dtype=np.float32)
        mean, std = ops.channel_stats(x)
        np.testing.assert_allclose(mean, 5.0)
        np.testing.assert_allclose(std, 0.0)

    def test_matches_two_pass_oracle(self):
        rng = np.random.default_rng(9)
        x = rng.standard_normal((5, 13, 7)).astype(np.float32)
        ref_mean, ref_std = naive_channel_stats(x)
        mean, std = ops.channel_stats(x)
        np.testing.assert_allclose(mean, ref_mean, rtol=0, atol=1e-6)
        np.testing.assert_allclose(std, ref_std, rtol=0, atol=1e-6)


# ---------------------------------------------------------------------------
# Backend parity: compiled core vs pure-numpy fallback
# ---------------------------------------------------------------------------


class TestBackendParity:
    def test_kernels_agree(self):
        from texwarp import _kernels_py, backend

        if backend.BACKEND_NAME != "native":
            pytest.skip("compiled backend not available")
        rng = np.random.default_rng(10)
        x = rng.standard_normal((4, 11, 9)).astype(np.float32)
        for kh, kw, s in [(3, 3, 1), (2, 2, 2), (1, 1, 1), (3, 2, 2)]:
            a = backend.kernels.im2col(x, kh, kw, s, s)
            b = _kernels_py.im2col(x, kh, kw, s, s)
            np.testing.assert_array_equal(a, b)
            back_a = backend.kernels.col2im_add(np.ascontiguousarray(a), 4, 11, 9, kh, kw, s, s)
            back_b = _kernels_py.col2im_add(np.ascontiguousarray(b), 4, 11, 9, kh, kw, s, s)
            np.testing.assert_allclose(back_a, back_b, rtol=1e-6)
        np.testing.assert_array_equal(
            backend.kernels.maxpool2d(x, 2, 2), _kernels_py.maxpool2d(x, 2, 2)
        )
        np.testing.assert_array_equal(
            backend.kernels.upsample_nearest(x, 3), _kernels_py.upsample_nearest(x, 3)
        )
