import numpy as np
import pytest
import torch

from weights_tooling import arch


@pytest.fixture(scope="session")
def vgg_checkpoint(tmp_path_factory):
    """Random torchvision-layout VGG-19 checkpoint (conv layers only)."""
    torch.manual_seed(0)
    state = {}
    for name, cin, cout, _ in arch.ENCODER_CONVS:
        idx = arch.TORCHVISION_FEATURE_INDEX[name]
        fan_in = cin * 9
        state[f"features.{idx}.weight"] = torch.randn(cout, cin, 3, 3) * (2.0 / fan_in) ** 0.5
        state[f"features.{idx}.bias"] = torch.zeros(cout)
    path = tmp_path_factory.mktemp("ckpt") / "vgg19_random.pth"
    torch.save(state, path)
    return path


@pytest.fixture(scope="session")
def corpus_dir(tmp_path_factory):
    """Ten 64px synthetic textured images."""
    from PIL import Image

    rng = np.random.default_rng(3)
    root = tmp_path_factory.mktemp("corpus")
    for i in range(10):
        yy, xx = np.mgrid[0:64, 0:64].astype(np.float32)
        rgb = np.stack(
            [
                0.5 + 0.35 * np.sin(xx / (2 + i) + i),
                0.5 + 0.35 * np.cos(yy / (3 + i)),
                0.4 + 0.2 * rng.random((64, 64)),
            ]
        ).clip(0, 1)
        u8 = (rgb.transpose(1, 2, 0) * 255).astype(np.uint8)
        Image.fromarray(u8).save(root / f"img_{i}.png")
    return root
