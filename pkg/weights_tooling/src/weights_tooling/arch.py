"""Architecture and tensor naming contract of the TFRW artifact.

Mirrors the engine's documented layout: VGG-19 encoder prefix cut after
the first ReLU of each block, and per-level decoders that reverse the
slice with nearest-neighbor upsampling in place of pooling. Decoder
tensor names index positions in the decoder layer list, where upsample
entries occupy a position.
"""

from __future__ import annotations

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

LEVEL_CUT = {1: 1, 2: 3, 3: 5, 4: 9, 5: 13}
LEVELS = (1, 2, 3, 4, 5)

# torchvision vgg19().features indices for the conv layers above
TORCHVISION_FEATURE_INDEX = {
    "conv1_1": 0, "conv1_2": 2,
    "conv2_1": 5, "conv2_2": 7,
    "conv3_1": 10, "conv3_2": 12, "conv3_3": 14, "conv3_4": 16,
    "conv4_1": 19, "conv4_2": 21, "conv4_3": 23, "conv4_4": 25,
    "conv5_1": 28,
}

META_PREPROC = "meta.preproc"
PREPROC_IMAGENET_UNIT = 0.0


def decoder_layers(level: int) -> list[tuple]:
    """("conv", in_c, out_c, relu) / ("upsample",) entries for a level."""
    layers: list[tuple] = []
    for _, cin, cout, pool_before in reversed(ENCODER_CONVS[: LEVEL_CUT[level]]):
        layers.append(("conv", cout, cin, True))
        if pool_before:
            layers.append(("upsample",))
    kind, cin, cout, _ = layers[-1]
    layers[-1] = (kind, cin, cout, False)
    return layers


def encoder_tensor_names() -> dict[str, tuple[int, ...]]:
    shapes = {}
    for name, cin, cout, _ in ENCODER_CONVS:
        shapes[f"enc.{name}.weight"] = (cout, cin, 3, 3)
        shapes[f"enc.{name}.bias"] = (cout,)
    return shapes


def decoder_tensor_names(level: int) -> dict[str, tuple[int, ...]]:
    shapes = {}
    for idx, layer in enumerate(decoder_layers(level)):
        if layer[0] != "conv":
            continue
        _, cin, cout, _ = layer
        shapes[f"dec{level}.conv{idx}.weight"] = (cout, cin, 3, 3)
        shapes[f"dec{level}.conv{idx}.bias"] = (cout,)
    return shapes
