"""VGG-19 encoder slices and their symmetric decoders.

The encoder is the standard VGG-19 prefix cut after the first ReLU of each
block (five cut points); a decoder mirrors its slice with every pooling
replaced by nearest-neighbor upsampling and channel counts reversed. All
convolutions are 3x3, reflection padded, stride 1, with a ReLU after each
except the final 3-channel output conv of a decoder.

Weights come from a TFRW file (see :mod:`texwarp.tfrw`). Encoder tensors
are named ``enc.<conv>.weight`` / ``enc.<conv>.bias`` in VGG block
notation; decoder tensors are ``dec<level>.conv<N>.*`` where N is the
layer's position in the decoder layer list (upsample entries occupy a
position, so conv indices skip over them).
"""

from __future__ import annotations

from dataclasses import dataclass
from types import MappingProxyType
from typing import Iterable, Mapping

import numpy as np

from texwarp import tfrw
from texwarp.errors import (
    MissingTensorError,
    ShapeMismatchError,
    TensorShapeError,
    WeightFormatError,
)
from texwarp.ops import conv2d, max_pool2d, upsample_nearest

LEVELS = (1, 2, 3, 4, 5)

# (name, in_channels, out_channels, preceded_by_pool)
ENCODER_CONVS = (
    ("conv1_1", 3, 64, False),
    ("conv1_2", 64, 64, False),
    ("conv2_1", 64, 128, True),
    ("conv2_2", 128, 128, False),
    ("conv3_1", 128, 256, True),
    ("conv3_2", 256, 256, False),
    ("conv3_3", 256, 256, False),
    ("conv3_4", 256, 256, False),
    ("conv4_1", 256, 512, True),
    ("conv4_2", 512, 512, False),
    ("conv4_3", 512, 512, False),
    ("conv4_4", 512, 512, False),
    ("conv5_1", 512, 512, True),
)

# Slice end (exclusive index into ENCODER_CONVS) per level.
_LEVEL_CUT = {1: 1, 2: 3, 3: 5, 4: 9, 5: 13}

LEVEL_CHANNELS = {1: 64, 2: 128, 3: 256, 4: 512, 5: 512}
LEVEL_FACTOR = {1: 1, 2: 2, 3: 4, 4: 8, 5: 16}

META_PREPROC = "meta.preproc"
PREPROC_IMAGENET_UNIT = 0.0


def decoder_layers(level: int) -> list[tuple]:
    """Ordered decoder layer list for ``level``.

    Entries are ``("conv", in_c, out_c, apply_relu)`` or ``("upsample",)``.
    The list always ends with a conv (mirror of conv1_1), which carries no
    activation.
    """
    _check_level(level)
    layers: list[tuple] = []
    for _, cin, cout, pool_before in reversed(ENCODER_CONVS[: _LEVEL_CUT[level]]):
        layers.append(("conv", cout, cin, True))
        if pool_before:
            layers.append(("upsample",))
    kind, cin, cout, _ = layers[-1]
    layers[-1] = (kind, cin, cout, False)
    return layers


def _check_level(level: int) -> None:
    if level not in _LEVEL_CUT:
        raise WeightFormatError(f"codec level must be 1..5, got {level}")


def required_tensor_shapes() -> dict[str, tuple[int, ...]]:
    """Every tensor a complete weight file must contain, with exact shape."""
    shapes: dict[str, tuple[int, ...]] = {}
    for name, cin, cout, _ in ENCODER_CONVS:
        shapes[f"enc.{name}.weight"] = (cout, cin, 3, 3)
        shapes[f"enc.{name}.bias"] = (cout,)
    for level in LEVELS:
        for idx, layer in enumerate(decoder_layers(level)):
            if layer[0] != "conv":
                continue
            _, cin, cout, _ = layer
            shapes[f"dec{level}.conv{idx}.weight"] = (cout, cin, 3, 3)
            shapes[f"dec{level}.conv{idx}.bias"] = (cout,)
    return shapes


@dataclass(frozen=True)
class WeightStore:
    """Immutable named-tensor collection backing the codec."""

    tensors: Mapping[str, np.ndarray]
    version: int = tfrw.VERSION

    def __post_init__(self):
        object.__setattr__(self, "tensors", MappingProxyType(dict(self.tensors)))

    def get(self, name: str) -> np.ndarray:
        try:
            return self.tensors[name]
        except KeyError:
            raise MissingTensorError(name) from None


def _validate(tensors: Mapping[str, np.ndarray]) -> None:
    for name, shape in required_tensor_shapes().items():
        if name not in tensors:
            raise MissingTensorError(name)
        if tuple(tensors[name].shape) != shape:
            raise TensorShapeError(name, shape, tensors[name].shape)
    meta = tensors.get(META_PREPROC)
    if meta is not None and float(np.ravel(meta)[0]) != PREPROC_IMAGENET_UNIT:
        raise WeightFormatError(
            f"{META_PREPROC} declares an unsupported preprocessing convention"
        )


def load_weights(path) -> WeightStore:
    """Load and validate a TFRW weight file."""
    tensors = tfrw.read_tensors(path)
    _validate(tensors)
    frozen = {}
    for name, arr in tensors.items():
        arr = np.ascontiguousarray(arr, dtype=np.float32)
        arr.flags.writeable = False
        frozen[name] = arr
    return WeightStore(frozen)


def save_weights(store: WeightStore, path) -> None:
    tensors = dict(store.tensors)
    tensors.setdefault(META_PREPROC, np.array([PREPROC_IMAGENET_UNIT], dtype=np.float32))
    tfrw.write_tensors(path, tensors)


def random_weight_store(seed: int = 0) -> WeightStore:
    """He-initialized store with the full architecture; for tests and timing.

    Keeps activation magnitudes stable through the deep slices so shape
    and property tests behave like they would with trained tensors.
    """
    rng = np.random.default_rng(seed)
    tensors: dict[str, np.ndarray] = {}
    for name, shape in required_tensor_shapes().items():
        if name.endswith(".bias"):
            tensors[name] = np.zeros(shape, dtype=np.float32)
        else:
            fan_in = shape[1] * shape[2] * shape[3]
            scale = np.sqrt(2.0 / fan_in)
            tensors[name] = (scale * rng.standard_normal(shape)).astype(np.float32)
    tensors[META_PREPROC] = np.array([PREPROC_IMAGENET_UNIT], dtype=np.float32)
    for arr in tensors.values():
        arr.flags.writeable = False
    return WeightStore(tensors)


def _check_divisible(shape: tuple[int, ...], level: int) -> None:
    factor = LEVEL_FACTOR[level]
    _, h, w = shape
    if h % factor or w % factor:
        raise ShapeMismatchError(
            f"encode level {level} needs dims divisible by {factor}",
            (f"multiple of {factor}",) * 2,
            (h, w),
        )


def encode(image: np.ndarray, level: int, weights: WeightStore) -> np.ndarray:
    """Run the encoder slice for ``level`` on a normalized (3, H, W) image."""
    return encode_all(image, (level,), weights)[level]


def encode_all(
    image: np.ndarray, levels: Iterable[int], weights: WeightStore
) -> dict[int, np.ndarray]:
    """Single forward pass capturing several cut points at once."""
    levels = sorted(set(levels))
    for lv in levels:
        _check_level(lv)
    image = np.asarray(image, dtype=np.float32)
    if image.ndim != 3 or image.shape[0] != 3:
        raise ShapeMismatchError("encoder input", ("3, H, W"), image.shape)
    deepest = levels[-1]
    _check_divisible(image.shape, deepest)

    cut_to_level = {_LEVEL_CUT[lv]: lv for lv in levels}
    out: dict[int, np.ndarray] = {}
    x = image
    for idx, (name, _, _, pool_before) in enumerate(ENCODER_CONVS[: _LEVEL_CUT[deepest]]):
        if pool_before:
            x = max_pool2d(x, 2, 2)
        x = conv2d(
            x,
            weights.get(f"enc.{name}.weight"),
            weights.get(f"enc.{name}.bias"),
            stride=1,
            padding=1,
            pad_mode="reflect",
        )
        np.maximum(x, np.float32(0.0), out=x)  # conv output is freshly owned
        if idx + 1 in cut_to_level:
            out[cut_to_level[idx + 1]] = x
    return out


def decode(feature: np.ndarray, level: int, weights: WeightStore) -> np.ndarray:
    """Invert a level's features back to a (3, H, W) image (unclamped)."""
    _check_level(level)
    feature = np.asarray(feature, dtype=np.float32)
    if feature.ndim != 3 or feature.shape[0] != LEVEL_CHANNELS[level]:
        raise ShapeMismatchError(
            f"decoder {level} input channels",
            (LEVEL_CHANNELS[level],),
            feature.shape,
        )
    x = feature
    for idx, layer in enumerate(decoder_layers(level)):
        if layer[0] == "upsample":
            x = upsample_nearest(x, 2)
            continue
        _, _, _, apply_relu = layer
        x = conv2d(
            x,
            weights.get(f"dec{level}.conv{idx}.weight"),
            weights.get(f"dec{level}.conv{idx}.bias"),
            stride=1,
            padding=1,
            pad_mode="reflect",
        )
        if apply_relu:
            np.maximum(x, np.float32(0.0), out=x)
    return x


def reconstruction_loss(
    original: np.ndarray,
    reconstructed: np.ndarray,
    level: int,
    weights: WeightStore,
    lam: float = 1.0,
) -> float:
    """Pixel MSE plus ``lam`` times feature MSE at the given level."""
    original = np.asarray(original, dtype=np.float32)
    reconstructed = np.asarray(reconstructed, dtype=np.float32)
    if original.shape != reconstructed.shape:
        raise ShapeMismatchError("reconstruction pair", original.shape, reconstructed.shape)
    pixel = float(np.mean((reconstructed - original).astype(np.float64) ** 2))
    if lam == 0.0:
        return pixel
    f_orig = encode(original, level, weights)
    f_rec = encode(reconstructed, level, weights)
    feat = float(np.mean((f_rec - f_orig).astype(np.float64) ** 2))
    return pixel + lam * feat
