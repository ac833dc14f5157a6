"""texwarp-weights: export encoder tensors and train decoders."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from weights_tooling.export import export_encoder
from weights_tooling.train import TrainConfig, train_decoders

DEFAULT_CONFIG = Path(__file__).parent / "config.json"


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="texwarp-weights")
    sub = parser.add_subparsers(dest="command", required=True)

    exp = sub.add_parser("export-encoder", help="VGG-19 checkpoint -> encoder TFRW")
    exp.add_argument("checkpoint", help="torch checkpoint (.pth)")
    exp.add_argument("out", help="output TFRW path")
    exp.add_argument("--manifest", default=None, help="manifest JSON path")

    tr = sub.add_parser("train-decoders", help="train decoders, write complete TFRW")
    tr.add_argument("corpus", help="directory of training images")
    tr.add_argument("out", help="output TFRW path")
    tr.add_argument("--encoder", required=True, help="encoder TFRW from export-encoder")
    tr.add_argument("--config", default=str(DEFAULT_CONFIG), help="training config JSON")
    tr.add_argument("--lam", type=float, default=None, help="feature loss weight override")

    args = parser.parse_args(argv)
    if args.command == "export-encoder":
        manifest = export_encoder(args.checkpoint, args.out, args.manifest)
        print(f"exported {len(manifest.tensors)} tensors to {args.out}")
        return 0

    cfg = TrainConfig.from_file(args.config)
    manifest, histories = train_decoders(
        args.corpus, args.out, args.encoder, cfg, lam=args.lam
    )
    for level, hist in histories.items():
        print(f"level {level}: final val loss {hist.val_loss[-1]:.5f}, "
              f"MAE {hist.val_mae[-1]:.4f}")
    print(f"wrote {args.out} ({len(manifest.tensors)} tensors)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
