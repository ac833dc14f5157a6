"""Torch modules built from (or exported to) TFRW tensor dictionaries."""

from __future__ import annotations

import numpy as np
import torch
from torch import nn

from weights_tooling import arch


def build_encoder(tensors: dict[str, np.ndarray], level: int) -> nn.Sequential:
    """Frozen encoder slice up to the level's cut point."""
    layers: list[nn.Module] = []
    for name, cin, cout, pool_before in arch.ENCODER_CONVS[: arch.LEVEL_CUT[level]]:
        if pool_before:
            layers.append(nn.MaxPool2d(2, 2))
        conv = nn.Conv2d(cin, cout, 3)
        conv.weight.data = torch.from_numpy(
            np.ascontiguousarray(tensors[f"enc.{name}.weight"])
        )
        conv.bias.data = torch.from_numpy(np.ascontiguousarray(tensors[f"enc.{name}.bias"]))
        layers += [nn.ReflectionPad2d(1), conv, nn.ReLU(inplace=True)]
    model = nn.Sequential(*layers)
    model.requires_grad_(False)
    model.eval()
    return model


def build_decoder(level: int, tensors: dict[str, np.ndarray] | None = None) -> nn.Sequential:
    """Decoder for a level; freshly initialized unless tensors are given."""
    layers: list[nn.Module] = []
    for idx, layer in enumerate(arch.decoder_layers(level)):
        if layer[0] == "upsample":
            layers.append(nn.Upsample(scale_factor=2, mode="nearest"))
            continue
        _, cin, cout, apply_relu = layer
        conv = nn.Conv2d(cin, cout, 3)
        if tensors is not None:
            conv.weight.data = torch.from_numpy(
                np.ascontiguousarray(tensors[f"dec{level}.conv{idx}.weight"])
            )
            conv.bias.data = torch.from_numpy(
                np.ascontiguousarray(tensors[f"dec{level}.conv{idx}.bias"])
            )
        layers += [nn.ReflectionPad2d(1), conv]
        if apply_relu:
            layers.append(nn.ReLU(inplace=True))
    return nn.Sequential(*layers)


def decoder_state_tensors(decoder: nn.Sequential, level: int) -> dict[str, np.ndarray]:
    """Extract dec<level>.conv<N>.* tensors from a trained decoder."""
    tensors: dict[str, np.ndarray] = {}
    conv_modules = [m for m in decoder if isinstance(m, nn.Conv2d)]
    conv_positions = [
        idx for idx, layer in enumerate(arch.decoder_layers(level)) if layer[0] == "conv"
    ]
    assert len(conv_modules) == len(conv_positions)
    for pos, conv in zip(conv_positions, conv_modules):
        tensors[f"dec{level}.conv{pos}.weight"] = (
            conv.weight.detach().cpu().numpy().astype(np.float32)
        )
        tensors[f"dec{level}.conv{pos}.bias"] = (
            conv.bias.detach().cpu().numpy().astype(np.float32)
        )
    return tensors
