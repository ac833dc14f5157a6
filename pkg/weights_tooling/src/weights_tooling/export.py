"""Encoder export: VGG-19 checkpoint to the TFRW encoder tensor set."""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from weights_tooling import arch, tfrw


@dataclass
class ExportManifest:
    source: str
    preprocessing: str = "imagenet-unit-range"
    tensors: list[dict] = field(default_factory=list)

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(asdict(self), indent=2))

    @classmethod
    def load(cls, path) -> "ExportManifest":
        return cls(**json.loads(Path(path).read_text()))


def _sha256(arr: np.ndarray) -> str:
    return hashlib.sha256(np.ascontiguousarray(arr, dtype=np.float32).tobytes()).hexdigest()


def manifest_entries(tensors: dict[str, np.ndarray]) -> list[dict]:
    return [
        {"name": name, "shape": list(arr.shape), "sha256": _sha256(arr)}
        for name, arr in sorted(tensors.items())
    ]


def load_vgg_checkpoint(path) -> dict[str, np.ndarray]:
    """Extract enc.* tensors from a torch VGG-19 checkpoint.

    Accepts torchvision layout (``features.N.weight``) or tensors already
    named ``enc.convA_B.*``.
    """
    import torch

    state = torch.load(path, map_location="cpu", weights_only=True)
    if hasattr(state, "state_dict"):
        state = state.state_dict()
    if "state_dict" in state and isinstance(state["state_dict"], dict):
        state = state["state_dict"]

    tensors: dict[str, np.ndarray] = {}
    expected = arch.encoder_tensor_names()
    for name, _, _, _ in arch.ENCODER_CONVS:
        for kind in ("weight", "bias"):
            out_name = f"enc.{name}.{kind}"
            tv_key = f"features.{arch.TORCHVISION_FEATURE_INDEX[name]}.{kind}"
            if out_name in state:
                value = state[out_name]
            elif tv_key in state:
                value = state[tv_key]
            else:
                raise KeyError(f"checkpoint is missing layer tensor for {out_name} ({tv_key})")
            value = np.asarray(value.detach().cpu().numpy(), dtype=np.float32)
            if tuple(value.shape) != expected[out_name]:
                raise ValueError(
                    f"{out_name}: shape {tuple(value.shape)} != expected {expected[out_name]}"
                )
            tensors[out_name] = value
    return tensors


def export_encoder(checkpoint_path, out_path, manifest_path=None) -> ExportManifest:
    """Write an encoder-only TFRW (intermediate artifact) plus manifest.

    The result feeds train_decoders; the engine itself only loads the
    complete artifact that training produces.
    """
    tensors = load_vgg_checkpoint(checkpoint_path)
    tensors[arch.META_PREPROC] = np.array([arch.PREPROC_IMAGENET_UNIT], dtype=np.float32)
    tfrw.write(out_path, tensors)
    manifest = ExportManifest(source=str(checkpoint_path), tensors=manifest_entries(tensors))
    manifest.save(manifest_path or Path(out_path).with_suffix(".manifest.json"))
    return manifest
