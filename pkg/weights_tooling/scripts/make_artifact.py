"""Produce a trained TFRW artifact end to end.

Generates a synthetic textured corpus, builds the encoder checkpoint
(randomly initialized here: this environment cannot download the
pretrained VGG-19; swap in a real checkpoint path when one is available),
exports it, trains the five decoders, and writes the complete artifact.

Usage:
    python3 scripts/make_artifact.py OUT_DIR [--steps N] [--size PX] [--images N]
"""

import argparse
import sys
from pathlib import Path

import numpy as np
import torch
from PIL import Image

from weights_tooling import arch
from weights_tooling.export import export_encoder
from weights_tooling.train import TrainConfig, train_decoders


def synth_texture(size: int, seed: int) -> np.ndarray:
    """Textured RGB in [0,1]: mixed gradients, waves, stripes.

    Frequencies are in absolute pixels, so generate at the training
    resolution rather than resizing down (resizing shifts the texture
    scale the decoders see).
    """
    rng = np.random.default_rng(seed)
    yy, xx = np.mgrid[0:size, 0:size].astype(np.float32)
    fx, fy, fd = rng.uniform(3.0, 15.0, size=3)
    phase = rng.uniform(0, 6.28, size=4)
    r = 0.5 + 0.3 * np.sin(xx / fx + phase[0]) + 0.12 * np.sin((xx + yy) / fd + phase[1])
    g = 0.5 + 0.3 * np.cos(yy / fy + phase[2]) * np.sin(xx / (fx + 2))
    b = (yy / size) * rng.uniform(0.4, 0.9) + 0.2 * np.cos(xx / (fd + 4) + phase[3])
    return np.stack([r, g, b]).clip(0, 1)


def random_vgg_checkpoint(path: Path, seed: int = 0) -> Path:
    torch.manual_seed(seed)
    state = {}
    for name, cin, cout, _ in arch.ENCODER_CONVS:
        idx = arch.TORCHVISION_FEATURE_INDEX[name]
        state[f"features.{idx}.weight"] = torch.randn(cout, cin, 3, 3) * (2.0 / (cin * 9)) ** 0.5
        state[f"features.{idx}.bias"] = torch.zeros(cout)
    torch.save(state, path)
    return path


def main(argv=None) -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("out_dir")
    parser.add_argument("--steps", type=int, default=300)
    parser.add_argument("--size", type=int, default=64)
    parser.add_argument("--images", type=int, default=24)
    parser.add_argument("--lr", type=float, default=2e-3)
    parser.add_argument("--batch", type=int, default=4)
    parser.add_argument("--checkpoint", default=None,
                        help="real VGG-19 .pth; random init when omitted")
    args = parser.parse_args(argv)

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    corpus = out_dir / "corpus"
    corpus.mkdir(exist_ok=True)
    for i in range(args.images):
        rgb = synth_texture(args.size, seed=100 + i)
        Image.fromarray((rgb.transpose(1, 2, 0) * 255).astype(np.uint8)).save(
            corpus / f"tex_{i:03d}.png"
        )

    ckpt = Path(args.checkpoint) if args.checkpoint else random_vgg_checkpoint(
        out_dir / "vgg19_init.pth"
    )
    enc_path = out_dir / "encoder.tfrw"
    export_encoder(ckpt, enc_path)

    cfg = TrainConfig(
        levels=(1, 2, 3, 4, 5),
        steps=args.steps,
        image_size=args.size,
        batch_size=args.batch,
        lr=args.lr,
        val_fraction=0.15,
        val_every=max(25, args.steps // 8),
    )
    artifact = out_dir / "trained.tfrw"
    _, histories = train_decoders(corpus, artifact, enc_path, cfg)
    for level, hist in sorted(histories.items()):
        print(f"level {level}: val MAE {hist.val_mae[-1]:.4f}")
    print(f"artifact: {artifact}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
