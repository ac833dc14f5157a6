"""View-specific texture reformation.

The operation standardizes content features, fuses them with semantic
features, matches every fused target patch to its closest fused source
patch by cosine similarity, and rebuilds the target feature map from the
*original* source patches selected by that matching. Because every output
patch is copied from the source feature, texture detail survives the
transfer; the patch size ("view") controls how much surrounding structure
each match must agree on.

Matching runs as one convolution with the L2-normalized fused source
patches as filters: at a fixed target position the target patch norm is
constant across candidate filters, so the unnormalized scores share their
argmax with true cosine similarity. Reassembly is the adjoint convolution
with the original source patches as filters, normalized by the overlap
count.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from texwarp import backend
from texwarp.errors import DegenerateFeatureError, ShapeMismatchError, TexwarpError
from texwarp.ops import channel_stats, conv2d

EPS = 1e-8

FUSION_VARIANTS = ("concat", "add", "downsample")


@dataclass(frozen=True)
class FusionMode:
    """How semantic features join the standardized content features."""

    variant: str = "concat"
    omega: float = 50.0

    def __post_init__(self):
        if self.variant not in FUSION_VARIANTS:
            raise TexwarpError(
                f"fusion variant must be one of {FUSION_VARIANTS}, got {self.variant!r}"
            )
        if self.omega < 0:
            raise TexwarpError(f"omega must be non-negative, got {self.omega}")


@dataclass(frozen=True)
class PatchBank:
    """Dense patch set with its extraction geometry."""

    patches: np.ndarray  # (n, C, p, p) float32
    patch_size: int
    stride: int
    grid: tuple[int, int]  # rows, cols of patch origins

    @property
    def n_patches(self) -> int:
        return self.patches.shape[0]

    @property
    def channels(self) -> int:
        return self.patches.shape[1]


@dataclass(frozen=True)
class MatchMap:
    """Per-position winning patch index over the target grid.

    Stored compactly as an index grid; :meth:`one_hot` materializes the
    equivalent indicator tensor (exactly one 1 per position).
    """

    indices: np.ndarray  # (gh, gw) int64
    n_patches: int

    def one_hot(self) -> np.ndarray:
        gh, gw = self.indices.shape
        out = np.zeros((self.n_patches, gh, gw), dtype=np.float32)
        rows, cols = np.indices((gh, gw))
        out[self.indices, rows, cols] = 1.0
        return out


def standardize(feature: np.ndarray, eps: float = EPS) -> np.ndarray:
    """Per-channel zero-mean unit-variance projection: (x - mean) / std.

    Channels with std below ``eps`` come out all-zero.
    """
    feature = np.asarray(feature, dtype=np.float32)
    mean, std = channel_stats(feature)
    denom = np.maximum(std, eps)
    out = (feature - mean[:, None, None].astype(np.float32)) / denom[
        :, None, None
    ].astype(np.float32)
    return out.astype(np.float32)


def fuse_semantics(
    feature_std: np.ndarray, semantic_feature: np.ndarray, mode: FusionMode
) -> np.ndarray:
    """Combine a standardized content feature with a semantic feature.

    concat / downsample append ``omega * semantic`` as extra channels;
    add requires equal channel counts and sums position-wise.
    """
    feature_std = np.asarray(feature_std, dtype=np.float32)
    semantic_feature = np.asarray(semantic_feature, dtype=np.float32)
    if feature_std.shape[1:] != semantic_feature.shape[1:]:
        raise ShapeMismatchError(
            "fusion spatial dims", feature_std.shape, semantic_feature.shape
        )
    weighted = np.float32(mode.omega) * semantic_feature
    if mode.variant == "add":
        if feature_std.shape[0] != semantic_feature.shape[0]:
            raise ShapeMismatchError(
                "add fusion channels", feature_std.shape, semantic_feature.shape
            )
        return feature_std + weighted
    if mode.variant == "downsample" and semantic_feature.shape[0] != 3:
        raise ShapeMismatchError(
            "downsample fusion expects an RGB semantic map",
            (3,),
            semantic_feature.shape,
        )
    return np.concatenate([feature_std, weighted], axis=0)


def global_patch_size(fs: np.ndarray, ft: np.ndarray) -> int:
    """Maximal patch size usable on both features: min over all dims, minus 1."""
    dims = (fs.shape[1], fs.shape[2], ft.shape[1], ft.shape[2])
    if min(dims) < 2:
        raise DegenerateFeatureError(
            f"global patch size needs every dim >= 2, got {dims}"
        )
    return min(dims) - 1


def extract_patches(feature: np.ndarray, p: int, s: int) -> PatchBank:
    """All p x p windows at stride s, row-major over the origin grid."""
    feature = np.ascontiguousarray(feature, dtype=np.float32)
    c, h, w = feature.shape
    if p > h or p > w:
        raise ShapeMismatchError("patch size vs feature", (p, p), (h, w))
    if s < 1:
        raise TexwarpError(f"stride must be >= 1, got {s}")
    gh = (h - p) // s + 1
    gw = (w - p) // s + 1
    if hasattr(backend.kernels, "im2col_rows"):
        rows = backend.kernels.im2col_rows(feature, p, s)
    else:
        cols = backend.im2col(feature, p, p, s, s)  # (C*p*p, gh*gw)
        rows = np.ascontiguousarray(cols.T)
    patches = rows.reshape(gh * gw, c, p, p)
    return PatchBank(patches=patches, patch_size=p, stride=s, grid=(gh, gw))


def sgtw_match(fused_source: PatchBank, fused_target: np.ndarray) -> MatchMap:
    """Closest fused source patch per fused target position.

    Scores come from one convolution of the target with the normalized
    source patches; ties break toward the lowest patch index, and
    zero-norm patches are excluded (all-zero banks fall back to patch 0).
    """
    fused_target = np.asarray(fused_target, dtype=np.float32)
    p, s = fused_source.patch_size, fused_source.stride
    if fused_target.shape[0] != fused_source.channels:
        raise ShapeMismatchError(
            "fused target channels vs source patches",
            (fused_source.channels,),
            fused_target.shape,
        )
    if fused_target.shape[1] < p or fused_target.shape[2] < p:
        raise ShapeMismatchError(
            "fused target smaller than patch", (p, p), fused_target.shape[1:]
        )

    flat = fused_source.patches.reshape(fused_source.n_patches, -1)
    norms = np.sqrt(np.einsum("ij,ij->i", flat, flat).astype(np.float64))
    zero = norms <= EPS
    safe = np.maximum(norms, EPS).astype(np.float32)
    filters = (flat / safe[:, None]).reshape(fused_source.patches.shape)

    scores = conv2d(fused_target, filters, stride=s)  # (n, gh, gw)
    if zero.all():
        return MatchMap(
            indices=np.zeros(scores.shape[1:], dtype=np.int64),
            n_patches=fused_source.n_patches,
        )
    if zero.any():
        scores[zero] = -np.inf
    indices = np.argmax(scores, axis=0).astype(np.int64)
    return MatchMap(indices=indices, n_patches=fused_source.n_patches)


def sgtw_reassemble(original_source: PatchBank, matches: MatchMap) -> np.ndarray:
    """Scatter the selected original source patches onto the target grid.

    Overlapping contributions are averaged by the per-pixel overlap count,
    so every output value is a convex combination of source values; with
    stride == patch size the tiling is exact.
    """
    if matches.n_patches != original_source.n_patches:
        raise ShapeMismatchError(
            "match channels vs patch bank",
            (original_source.n_patches,),
            (matches.n_patches,),
        )
    p, s = original_source.patch_size, original_source.stride
    c = original_source.channels
    gh, gw = matches.indices.shape
    oh = (gh - 1) * s + p
    ow = (gw - 1) * s + p

    flat = original_source.patches.reshape(original_source.n_patches, c * p * p)
    selected = flat[matches.indices.ravel()]  # (gh*gw, C*p*p) row gather
    if hasattr(backend.kernels, "col2im_add_rows"):
        summed = backend.kernels.col2im_add_rows(selected, c, oh, ow, p, s, gh, gw)
    else:
        summed = backend.col2im_add(
            np.ascontiguousarray(selected.T), c, oh, ow, p, p, s, s
        )
    ones = np.ones((p * p, gh * gw), dtype=np.float32)
    count = backend.col2im_add(ones, 1, oh, ow, p, p, s, s)
    return summed / count


def vstr(
    source_style_feat: np.ndarray,
    temp_target_feat: np.ndarray,
    source_sem_feat: np.ndarray,
    target_sem_feat: np.ndarray,
    p: int,
    s: int = 1,
    mode: Optional[FusionMode] = None,
) -> np.ndarray:
    """Full texture reformation at one view.

    Standardizes the content features, fuses each with its (raw) semantic
    feature, matches fused patches, and reassembles the original source
    feature patches over the target grid.
    """
    if mode is None:
        mode = FusionMode()
    fs_std = standardize(source_style_feat)
    ft_std = standardize(temp_target_feat)
    fused_source = fuse_semantics(fs_std, source_sem_feat, mode)
    fused_target = fuse_semantics(ft_std, target_sem_feat, mode)

    original_bank = extract_patches(
        np.asarray(source_style_feat, dtype=np.float32), p, s
    )
    fused_bank = extract_patches(fused_source, p, s)
    matches = sgtw_match(fused_bank, fused_target)
    return sgtw_reassemble(original_bank, matches)
