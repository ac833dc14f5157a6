"""First-order statistics matching properties."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from texwarp import enhance
from texwarp.enhance import EnhancementScope, se
from texwarp.errors import ShapeMismatchError, TexwarpError


class TestSeGlobal:
    def test_already_matched_is_identity(self, rng):
        x = rng.standard_normal((3, 5, 5)).astype(np.float32)
        np.testing.assert_allclose(se(x, x), x, atol=1e-6)

    def test_constant_target_channel(self, rng):
        src = rng.standard_normal((2, 4, 4)).astype(np.float32)
        tgt = np.full((2, 4, 4), 9.0, dtype=np.float32)
        out = se(src, tgt)
        mu_s = src.mean(axis=(1, 2))
        np.testing.assert_allclose(out, np.broadcast_to(mu_s[:, None, None], out.shape), atol=1e-5)

    def test_output_stats_match_source(self, rng):
        src = (3 * rng.standard_normal((4, 6, 6)) + 2).astype(np.float32)
        tgt = (0.5 * rng.standard_normal((4, 6, 6)) - 7).astype(np.float32)
        out = se(src, tgt)
        np.testing.assert_allclose(out.mean(axis=(1, 2)), src.mean(axis=(1, 2)), atol=1e-4)
        np.testing.assert_allclose(out.std(axis=(1, 2)), src.std(axis=(1, 2)), atol=1e-4)

    def test_idempotent(self, rng):
        src = rng.standard_normal((3, 5, 5)).astype(np.float32)
        tgt = rng.standard_normal((3, 5, 5)).astype(np.float32)
        once = se(src, tgt)
        twice = se(src, once)
        np.testing.assert_allclose(twice, once, atol=1e-5)

    @given(
        st.floats(0.1, 10.0),
        st.floats(-5.0, 5.0),
        st.integers(0, 2**31 - 1),
    )
    @settings(max_examples=30, deadline=None)
    def test_affine_equivariance(self, a, b, seed):
        r = np.random.default_rng(seed)
        src = r.standard_normal((2, 5, 5)).astype(np.float32)
        tgt = r.standard_normal((2, 5, 5)).astype(np.float32)
        direct = se(src, tgt)
        shifted = se(src, np.float32(a) * tgt + np.float32(b))
        np.testing.assert_allclose(shifted, direct, atol=1e-4)

    def test_channel_mismatch(self):
        with pytest.raises(ShapeMismatchError):
            se(np.zeros((2, 3, 3), dtype=np.float32), np.zeros((3, 3, 3), dtype=np.float32))

    def test_covariance_reserved(self, rng):
        x = rng.standard_normal((2, 3, 3)).astype(np.float32)
        with pytest.raises(NotImplementedError):
            se(x, x, method="covariance")


class TestSePerLabel:
    def _scope(self, h, w):
        left = np.zeros((h, w), dtype=bool)
        left[:, : w // 2] = True
        masks = np.stack([left, ~left])
        return EnhancementScope("per-label", source_masks=masks, target_masks=masks)

    def test_region_stats_match(self, rng):
        src = rng.standard_normal((3, 6, 8)).astype(np.float32) + np.array(
            [0.0, 5.0, -5.0], dtype=np.float32
        ).reshape(3, 1, 1)
        tgt = rng.standard_normal((3, 6, 8)).astype(np.float32)
        scope = self._scope(6, 8)
        out = se(src, tgt, scope)
        for k, mask in enumerate(scope.target_masks):
            for c in range(3):
                assert out[c][mask].mean() == pytest.approx(
                    float(src[c][scope.source_masks[k]].mean()), abs=1e-4
                )

    def test_masks_must_partition(self, rng):
        h = w = 4
        masks = np.zeros((2, h, w), dtype=bool)
        masks[0, :2] = True  # bottom half uncovered
        scope = EnhancementScope("per-label", source_masks=masks, target_masks=masks)
        with pytest.raises(TexwarpError):
            se(
                rng.standard_normal((1, h, w)).astype(np.float32),
                rng.standard_normal((1, h, w)).astype(np.float32),
                scope,
            )

    def test_scope_requires_masks(self):
        with pytest.raises(TexwarpError):
            EnhancementScope("per-label")

    def test_mask_dim_mismatch(self, rng):
        scope = self._scope(4, 4)
        with pytest.raises(ShapeMismatchError):
            se(
                rng.standard_normal((1, 6, 6)).astype(np.float32),
                rng.standard_normal((1, 6, 6)).astype(np.float32),
                scope,
            )

    def test_empty_source_label_uses_global_stats(self, rng):
        h = w = 4
        tgt_masks = np.zeros((2, h, w), dtype=bool)
        tgt_masks[0, :, :2] = True
        tgt_masks[1] = ~tgt_masks[0]
        src_masks = np.zeros((2, h, w), dtype=bool)
        src_masks[0] = True  # label 1 absent from the source
        scope = EnhancementScope("per-label", source_masks=src_masks, target_masks=tgt_masks)
        src = rng.standard_normal((2, h, w)).astype(np.float32)
        tgt = rng.standard_normal((2, h, w)).astype(np.float32)
        out = se(src, tgt, scope)
        assert np.isfinite(out).all()
