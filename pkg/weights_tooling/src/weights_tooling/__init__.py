"""Offline weight preparation for the texwarp engine."""

from weights_tooling.export import ExportManifest, export_encoder
from weights_tooling.train import TrainConfig, train_decoders

__all__ = ["ExportManifest", "TrainConfig", "export_encoder", "train_decoders"]
