"""Decoder training against a frozen encoder.

Loss per level: mean squared pixel error plus ``lam`` times mean squared
error of the re-encoded reconstruction, both in the encoder's normalized
color space. Hyperparameter defaults live in TrainConfig / config.json,
not in any interface contract.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
import torch
from torch import nn

from weights_tooling import arch, models, tfrw
from weights_tooling.export import ExportManifest, manifest_entries

IMAGENET_MEAN = np.array([0.485, 0.456, 0.406], dtype=np.float32)
IMAGENET_STD = np.array([0.229, 0.224, 0.225], dtype=np.float32)


@dataclass
class TrainConfig:
    lam: float = 1.0
    levels: tuple[int, ...] = (1, 2, 3, 4, 5)
    steps: int = 400
    batch_size: int = 4
    image_size: int = 128
    lr: float = 1e-3
    seed: int = 0
    val_fraction: float = 0.2
    val_every: int = 50

    @classmethod
    def from_file(cls, path) -> "TrainConfig":
        data = json.loads(Path(path).read_text())
        if "levels" in data:
            data["levels"] = tuple(data["levels"])
        return cls(**data)


@dataclass
class LevelHistory:
    val_loss: list[float] = field(default_factory=list)
    val_mae: list[float] = field(default_factory=list)


def load_corpus(corpus_dir, image_size: int) -> torch.Tensor:
    """All images in a directory, resized and normalized, as one tensor."""
    from PIL import Image

    paths = sorted(
        p for p in Path(corpus_dir).iterdir()
        if p.suffix.lower() in (".png", ".jpg", ".jpeg", ".bmp")
    )
    if not paths:
        raise FileNotFoundError(f"no images found in {corpus_dir}")
    batch = []
    for p in paths:
        img = Image.open(p).convert("RGB").resize((image_size, image_size), Image.BICUBIC)
        rgb = np.asarray(img, dtype=np.float32).transpose(2, 0, 1) / 255.0
        batch.append((rgb - IMAGENET_MEAN[:, None, None]) / IMAGENET_STD[:, None, None])
    return torch.from_numpy(np.stack(batch))


def _unit_mae(recon: torch.Tensor, target: torch.Tensor) -> float:
    """Mean absolute pixel error in displayable [0, 1] range."""
    std = torch.from_numpy(IMAGENET_STD).view(1, 3, 1, 1)
    mean = torch.from_numpy(IMAGENET_MEAN).view(1, 3, 1, 1)
    a = (recon * std + mean).clamp(0, 1)
    b = (target * std + mean).clamp(0, 1)
    return float((a - b).abs().mean())


def train_level(
    encoder: nn.Sequential,
    images: torch.Tensor,
    level: int,
    cfg: TrainConfig,
) -> tuple[nn.Sequential, LevelHistory]:
    """Train one decoder; returns it with its validation history."""
    torch.manual_seed(cfg.seed + level)
    n_val = int(round(len(images) * cfg.val_fraction))
    if 0 < n_val < len(images):
        train_imgs, val_imgs = images[:-n_val], images[-n_val:]
    else:
        # no held-out split: validation measures training-set (overfit) error
        train_imgs = val_imgs = images

    decoder = models.build_decoder(level)
    optim = torch.optim.Adam(decoder.parameters(), lr=cfg.lr)
    history = LevelHistory()

    with torch.no_grad():
        train_feats = encoder(train_imgs)
        val_feats = encoder(val_imgs)

    def validate():
        decoder.eval()
        with torch.no_grad():
            recon = decoder(val_feats)
            loss = nn.functional.mse_loss(recon, val_imgs)
            if cfg.lam:
                loss = loss + cfg.lam * nn.functional.mse_loss(encoder(recon), val_feats)
            history.val_loss.append(float(loss))
            history.val_mae.append(_unit_mae(recon, val_imgs))
        decoder.train()

    generator = torch.Generator().manual_seed(cfg.seed + 100 * level)
    validate()
    for step in range(cfg.steps):
        idx = torch.randint(0, len(train_imgs), (min(cfg.batch_size, len(train_imgs)),),
                            generator=generator)
        target = train_imgs[idx]
        feats = train_feats[idx]
        recon = decoder(feats)
        loss = nn.functional.mse_loss(recon, target)
        if cfg.lam:
            loss = loss + cfg.lam * nn.functional.mse_loss(encoder(recon), feats)
        if not math.isfinite(float(loss)):
            raise RuntimeError(
                f"level {level} diverged at step {step}: loss={float(loss)} "
                f"(lr={cfg.lr}, batch={cfg.batch_size})"
            )
        optim.zero_grad()
        loss.backward()
        optim.step()
        if (step + 1) % cfg.val_every == 0 or step + 1 == cfg.steps:
            validate()
    decoder.eval()
    return decoder, history


def train_decoders(
    corpus_dir,
    out_path,
    encoder_tfrw,
    cfg: TrainConfig | None = None,
    lam: float | None = None,
) -> tuple[ExportManifest, dict[int, LevelHistory]]:
    """Train decoders for cfg.levels and write the complete TFRW artifact."""
    cfg = cfg or TrainConfig()
    if lam is not None:
        cfg = replace(cfg, lam=lam)
    torch.manual_seed(cfg.seed)
    enc_tensors = tfrw.read(encoder_tfrw)
    images = load_corpus(corpus_dir, cfg.image_size)

    out_tensors: dict[str, np.ndarray] = {
        name: enc_tensors[name] for name in arch.encoder_tensor_names()
    }
    histories: dict[int, LevelHistory] = {}
    for level in cfg.levels:
        encoder = models.build_encoder(enc_tensors, level)
        decoder, history = train_level(encoder, images, level, cfg)
        histories[level] = history
        out_tensors.update(models.decoder_state_tensors(decoder, level))
        print(f"level {level}: val MAE {history.val_mae[0]:.4f} -> {history.val_mae[-1]:.4f}")

    out_tensors[arch.META_PREPROC] = np.array(
        [arch.PREPROC_IMAGENET_UNIT], dtype=np.float32
    )
    tfrw.write(out_path, out_tensors)
    manifest = ExportManifest(
        source=f"decoders trained on {corpus_dir}", tensors=manifest_entries(out_tensors)
    )
    manifest.save(Path(out_path).with_suffix(".manifest.json"))
    return manifest, histories
