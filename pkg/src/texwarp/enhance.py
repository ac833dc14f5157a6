"""Statistics-based enhancement: first-order moment matching.

Shifts each target feature channel to the source channel's mean and
standard deviation, globally or within corresponding semantic regions.
Second-order (covariance) matching is deliberately not implemented; the
method name is reserved so callers get a clear error instead of silently
different behavior.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from texwarp.errors import ShapeMismatchError, TexwarpError

EPS = 1e-8

METHODS = ("first-order", "covariance")


@dataclass(frozen=True)
class EnhancementScope:
    """Where statistics are gathered and applied.

    Global scope matches whole channels; per-label scope matches within
    each semantic region, with masks for the source and target domains
    aligned by label index. Target masks must partition the target map.
    """

    variant: str = "global"
    source_masks: Optional[np.ndarray] = None  # (K, H, W) bool
    target_masks: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.variant not in ("global", "per-label"):
            raise TexwarpError(f"unknown enhancement scope {self.variant!r}")
        if self.variant == "per-label":
            if self.source_masks is None or self.target_masks is None:
                raise TexwarpError("per-label scope requires source and target masks")
            if self.source_masks.shape[0] != self.target_masks.shape[0]:
                raise ShapeMismatchError(
                    "per-label mask counts",
                    self.source_masks.shape,
                    self.target_masks.shape,
                )


GLOBAL_SCOPE = EnhancementScope()


def _match_moments(src_vals: np.ndarray, tgt_vals: np.ndarray) -> np.ndarray:
    """Map tgt values (C, N) onto src (C, M) channel statistics.

    Statistics accumulate in float64; the per-channel affine map itself
    runs in float32 to keep memory traffic down on full-size features.
    """
    mu_s = src_vals.mean(axis=1, dtype=np.float64)
    sd_s = src_vals.std(axis=1, dtype=np.float64)
    mu_t = tgt_vals.mean(axis=1, dtype=np.float64)
    sd_t = np.maximum(tgt_vals.std(axis=1, dtype=np.float64), EPS)
    out = tgt_vals - mu_t[:, None].astype(np.float32)  # center before scaling
    out *= (sd_s / sd_t)[:, None].astype(np.float32)
    out += mu_s[:, None].astype(np.float32)
    return out


def se(
    source_feat: np.ndarray,
    target_feat: np.ndarray,
    scope: EnhancementScope = GLOBAL_SCOPE,
    method: str = "first-order",
) -> np.ndarray:
    """Return the target feature with source channel statistics imposed."""
    if method not in METHODS:
        raise TexwarpError(f"unknown enhancement method {method!r}")
    if method == "covariance":
        raise NotImplementedError(
            "covariance matching is reserved but not shipped; use first-order"
        )
    source_feat = np.asarray(source_feat, dtype=np.float32)
    target_feat = np.asarray(target_feat, dtype=np.float32)
    if source_feat.shape[0] != target_feat.shape[0]:
        raise ShapeMismatchError(
            "enhancement channel counts", source_feat.shape, target_feat.shape
        )
    c = target_feat.shape[0]

    if scope.variant == "global":
        out = _match_moments(
            source_feat.reshape(c, -1), target_feat.reshape(c, -1)
        )
        return out.reshape(target_feat.shape)

    src_masks = np.asarray(scope.source_masks, dtype=bool)
    tgt_masks = np.asarray(scope.target_masks, dtype=bool)
    if src_masks.shape[1:] != source_feat.shape[1:]:
        raise ShapeMismatchError(
            "source masks vs feature dims", source_feat.shape[1:], src_masks.shape[1:]
        )
    if tgt_masks.shape[1:] != target_feat.shape[1:]:
        raise ShapeMismatchError(
            "target masks vs feature dims", target_feat.shape[1:], tgt_masks.shape[1:]
        )
    if not (tgt_masks.sum(axis=0) == 1).all():
        raise TexwarpError("target masks must partition the spatial domain")

    out = target_feat.copy()
    for k in range(tgt_masks.shape[0]):
        t_sel = tgt_masks[k]
        if not t_sel.any():
            continue
        s_sel = src_masks[k]
        # a label painted only on the target borrows global source statistics
        src_vals = source_feat[:, s_sel] if s_sel.any() else source_feat.reshape(c, -1)
        out[:, t_sel] = _match_moments(src_vals, target_feat[:, t_sel])
    return out
