"""Three-stage synthesis pipeline.

Stage I aligns global structure with a maximal-view reformation at the
deepest feature level; stage II refines local texture at the next level
with a small view; stage III imposes source channel statistics at the
three shallow levels. Between stages the working image round-trips
through the matching decoder. The initial working image is the target
semantic map itself, which is deterministic and already agrees with the
target layout.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from texwarp import codec, imaging
from texwarp.enhance import EnhancementScope, se
from texwarp.errors import ConfigError, StageError
from texwarp.reform import FusionMode, global_patch_size, vstr

STAGES = ("I", "II", "III")


@dataclass(frozen=True)
class TransferConfig:
    """Every pipeline knob, with the reference defaults."""

    omega1: float = 50.0
    omega2: float = 50.0
    fusion: str = "concat"  # concat | add | downsample
    p_stage2: int = 3
    stride: int = 1
    stages: frozenset[str] = frozenset(STAGES)
    blend1: float = 1.0
    blend2: float = 1.0
    se_scope: str = "global"  # global | per-label
    patch_size_global: Optional[int] = None

    def __post_init__(self):
        if self.omega1 < 0 or self.omega2 < 0:
            raise ConfigError(f"omega must be >= 0, got ({self.omega1}, {self.omega2})")
        if not (0.0 <= self.blend1 <= 1.0 and 0.0 <= self.blend2 <= 1.0):
            raise ConfigError(f"blend must be in [0,1], got ({self.blend1}, {self.blend2})")
        if self.p_stage2 < 1:
            raise ConfigError(f"stage II patch size must be >= 1, got {self.p_stage2}")
        if self.stride < 1:
            raise ConfigError(f"stride must be >= 1, got {self.stride}")
        if self.fusion not in ("concat", "add", "downsample"):
            raise ConfigError(f"unknown fusion variant {self.fusion!r}")
        if self.se_scope not in ("global", "per-label"):
            raise ConfigError(f"unknown enhancement scope {self.se_scope!r}")
        unknown = set(self.stages) - set(STAGES)
        if unknown:
            raise ConfigError(f"unknown stages {sorted(unknown)}")
        if self.patch_size_global is not None and self.patch_size_global < 1:
            raise ConfigError("global patch size override must be >= 1")
        object.__setattr__(self, "stages", frozenset(self.stages))

    def enabled(self, stage: str) -> bool:
        return stage in self.stages

    def to_dict(self) -> dict:
        return {
            "omega1": self.omega1,
            "omega2": self.omega2,
            "fusion": self.fusion,
            "patch_size": self.p_stage2,
            "patch_size_global": self.patch_size_global,
            "stride": self.stride,
            "stages": sorted(self.stages, key=STAGES.index),
            "blend1": self.blend1,
            "blend2": self.blend2,
            "se_scope": self.se_scope,
        }

    @classmethod
    def from_overrides(cls, overrides: Optional[dict]) -> "TransferConfig":
        if not overrides:
            return cls()
        data = dict(overrides)
        kwargs = {}
        renames = {"patch_size": "p_stage2"}
        valid = {
            "omega1", "omega2", "fusion", "patch_size", "patch_size_global",
            "stride", "stages", "blend1", "blend2", "se_scope",
        }
        unknown = set(data) - valid
        if unknown:
            raise ConfigError(f"unknown config fields {sorted(unknown)}")
        for key, value in data.items():
            if value is None:
                continue
            if key == "stages":
                value = frozenset(value)
            kwargs[renames.get(key, key)] = value
        return cls(**kwargs)


@dataclass
class StageTrace:
    """Intermediate images (normalized space) and per-stage wall seconds."""

    images: dict[str, np.ndarray] = field(default_factory=dict)
    timings: dict[str, float] = field(default_factory=dict)


def _fusion_mode(cfg: TransferConfig, omega: float) -> FusionMode:
    return FusionMode(variant=cfg.fusion, omega=omega)


def _semantic_feature(sem_image, level, weights, cfg, cache=None):
    """Semantic guidance at feature resolution for the configured fusion."""
    if cfg.fusion == "downsample":
        rgb = imaging.denormalize(np.asarray(sem_image, dtype=np.float32))
        factor = codec.LEVEL_FACTOR[level]
        h, w = rgb.shape[1] // factor, rgb.shape[2] // factor
        return imaging.resample_nearest(rgb, h, w).astype(np.float32)
    if cache is not None and level in cache:
        return cache[level]
    feat = codec.encode(sem_image, level, weights)
    if cache is not None:
        cache[level] = feat
    return feat


def _blend(out_feat, in_feat, factor):
    if factor >= 1.0:
        return out_feat
    return np.float32(factor) * out_feat + np.float32(1.0 - factor) * in_feat


def stage1_global_align(
    s_sty: np.ndarray,
    s_sem: np.ndarray,
    t_sem: np.ndarray,
    init: np.ndarray,
    cfg: TransferConfig,
    weights: codec.WeightStore,
    _feats: Optional[dict] = None,
) -> np.ndarray:
    """Maximal-view reformation at level 5; returns the decoded image."""
    if not cfg.enabled("I"):
        return init
    feats = _feats or {}
    f_sty = feats.get("s_sty") if feats.get("s_sty") is not None else codec.encode(s_sty, 5, weights)
    f_init = feats.get("init") if feats.get("init") is not None else codec.encode(init, 5, weights)
    f_sem_s = (
        feats.get("s_sem")
        if feats.get("s_sem") is not None
        else _semantic_feature(s_sem, 5, weights, cfg)
    )
    f_sem_t = (
        feats.get("t_sem")
        if feats.get("t_sem") is not None
        else _semantic_feature(t_sem, 5, weights, cfg)
    )
    p = cfg.patch_size_global or global_patch_size(f_sty, f_init)
    out = vstr(f_sty, f_init, f_sem_s, f_sem_t, p=p, s=cfg.stride,
               mode=_fusion_mode(cfg, cfg.omega1))
    out = _blend(out, f_init[:, : out.shape[1], : out.shape[2]], cfg.blend1)
    return codec.decode(out, 5, weights)


def stage2_local_refine(
    s_sty: np.ndarray,
    s_sem: np.ndarray,
    t_sem: np.ndarray,
    temp: np.ndarray,
    cfg: TransferConfig,
    weights: codec.WeightStore,
    _feats: Optional[dict] = None,
) -> np.ndarray:
    """Small-view reformation at level 4 on the working image."""
    if not cfg.enabled("II"):
        return temp
    feats = _feats or {}
    f_sty = feats.get("s_sty") if feats.get("s_sty") is not None else codec.encode(s_sty, 4, weights)
    f_temp = codec.encode(temp, 4, weights)
    f_sem_s = (
        feats.get("s_sem")
        if feats.get("s_sem") is not None
        else _semantic_feature(s_sem, 4, weights, cfg)
    )
    f_sem_t = (
        feats.get("t_sem")
        if feats.get("t_sem") is not None
        else _semantic_feature(t_sem, 4, weights, cfg)
    )
    out = vstr(f_sty, f_temp, f_sem_s, f_sem_t, p=cfg.p_stage2, s=cfg.stride,
               mode=_fusion_mode(cfg, cfg.omega2))
    out = _blend(out, f_temp[:, : out.shape[1], : out.shape[2]], cfg.blend2)
    return codec.decode(out, 4, weights)


def stage3_enhance(
    s_sty: np.ndarray,
    temp: np.ndarray,
    cfg: TransferConfig,
    weights: codec.WeightStore,
    scope_masks: Optional[tuple[np.ndarray, np.ndarray]] = None,
    trace: Optional[StageTrace] = None,
    _feats: Optional[dict] = None,
) -> np.ndarray:
    """Statistics matching at levels 3, 2, 1, re-decoding after each."""
    if not cfg.enabled("III"):
        return temp
    feats = _feats or {}
    out = temp
    for level in (3, 2, 1):
        f_src = feats.get(level)
        if f_src is None:
            f_src = codec.encode(s_sty, level, weights)
        f_tgt = codec.encode(out, level, weights)
        if cfg.se_scope == "per-label" and scope_masks is not None:
            s_labels, t_labels = scope_masks
            h, w = f_tgt.shape[1:]
            sh, sw = f_src.shape[1:]
            n = max(s_labels.max(), t_labels.max()) + 1
            src_masks = imaging.resample_nearest(s_labels, sh, sw)[None] == np.arange(n)[:, None, None]
            tgt_masks = imaging.resample_nearest(t_labels, h, w)[None] == np.arange(n)[:, None, None]
            scope = EnhancementScope("per-label", source_masks=src_masks, target_masks=tgt_masks)
        else:
            scope = EnhancementScope()
        matched = se(f_src, f_tgt, scope)
        out = codec.decode(matched, level, weights)
        if trace is not None:
            trace.images[f"stage3_l{level}"] = out
    return out


def _label_grids(s_sem, t_sem):
    """Shared-palette label grids for per-label enhancement."""
    s_rgb8 = imaging.to_rgb8(s_sem)
    t_rgb8 = imaging.to_rgb8(t_sem)
    sem = imaging.parse_semantic_map(s_rgb8)
    return sem.labels, sem.map_colors(t_rgb8)


def run_transfer(
    s_sty: np.ndarray,
    s_sem: np.ndarray,
    t_sem: np.ndarray,
    cfg: Optional[TransferConfig] = None,
    weights: Optional[codec.WeightStore] = None,
) -> tuple[np.ndarray, StageTrace]:
    """Run the enabled stages in order, threading the working image.

    Inputs are normalized (3, H, W) images; the source pair must share
    dims. Returns the final image (normalized space) and the trace.
    """
    if cfg is None:
        cfg = TransferConfig()
    if weights is None:
        raise ConfigError("run_transfer requires a WeightStore")
    s_sty = imaging.align_dims(np.asarray(s_sty, dtype=np.float32), 16)
    s_sem = imaging.align_dims(np.asarray(s_sem, dtype=np.float32), 16)
    t_sem = imaging.align_dims(np.asarray(t_sem, dtype=np.float32), 16)
    if s_sty.shape != s_sem.shape:
        raise StageError("I", ConfigError(
            f"source style {s_sty.shape} and source semantic map {s_sem.shape} must share dims"
        ))

    trace = StageTrace()
    temp = t_sem  # deterministic, layout-consistent initial working image

    encode_sem = cfg.fusion != "downsample"
    needed_sty = [lv for lv, st in ((5, "I"), (4, "II")) if cfg.enabled(st)]
    if cfg.enabled("III"):
        needed_sty += [1, 2, 3]
    sty_feats = codec.encode_all(s_sty, needed_sty, weights) if needed_sty else {}
    needed_sem = [lv for lv, st in ((5, "I"), (4, "II")) if cfg.enabled(st)] if encode_sem else []
    sem_s_feats = codec.encode_all(s_sem, needed_sem, weights) if needed_sem else {}
    sem_t_feats = codec.encode_all(t_sem, needed_sem, weights) if needed_sem else {}

    if cfg.enabled("I"):
        start = time.perf_counter()
        try:
            temp = stage1_global_align(
                s_sty, s_sem, t_sem, temp, cfg, weights,
                _feats={
                    "s_sty": sty_feats.get(5),
                    "s_sem": sem_s_feats.get(5),
                    "t_sem": sem_t_feats.get(5),
                    "init": sem_t_feats.get(5),  # initial temp IS the target map
                },
            )
        except Exception as exc:
            raise StageError("I", exc) from exc
        trace.timings["stage1"] = time.perf_counter() - start
        trace.images["stage1"] = temp

    if cfg.enabled("II"):
        start = time.perf_counter()
        try:
            temp = stage2_local_refine(
                s_sty, s_sem, t_sem, temp, cfg, weights,
                _feats={
                    "s_sty": sty_feats.get(4),
                    "s_sem": sem_s_feats.get(4),
                    "t_sem": sem_t_feats.get(4),
                },
            )
        except Exception as exc:
            raise StageError("II", exc) from exc
        trace.timings["stage2"] = time.perf_counter() - start
        trace.images["stage2"] = temp

    if cfg.enabled("III"):
        start = time.perf_counter()
        try:
            scope_masks = _label_grids(s_sem, t_sem) if cfg.se_scope == "per-label" else None
            temp = stage3_enhance(
                s_sty, temp, cfg, weights, scope_masks, trace,
                _feats={lv: sty_feats.get(lv) for lv in (1, 2, 3)},
            )
        except Exception as exc:
            raise StageError("III", exc) from exc
        trace.timings["stage3"] = time.perf_counter() - start

    return temp, trace
