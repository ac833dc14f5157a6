"""Exception hierarchy shared by all engine modules."""

from __future__ import annotations


class TexwarpError(Exception):
    """Base class for all engine errors."""


class ShapeMismatchError(TexwarpError):
    """Two tensors disagree on a dimension that must match."""

    def __init__(self, what: str, expected, got):
        self.expected = tuple(expected) if hasattr(expected, "__iter__") else expected
        self.got = tuple(got) if hasattr(got, "__iter__") else got
        super().__init__(f"{what}: expected {self.expected}, got {self.got}")


class DegenerateFeatureError(TexwarpError):
    """A feature map is too small for the requested operation."""


class WeightFormatError(TexwarpError):
    """Base class for weight-file problems."""


class BadMagicError(WeightFormatError):
    pass


class UnsupportedVersionError(WeightFormatError):
    pass


class TruncatedFileError(WeightFormatError):
    pass


class MissingTensorError(WeightFormatError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"weight file is missing tensor {name!r}")


class TensorShapeError(WeightFormatError):
    def __init__(self, name: str, expected, got):
        self.name = name
        super().__init__(
            f"tensor {name!r} has shape {tuple(got)}, expected {tuple(expected)}"
        )


class ImageError(TexwarpError):
    """Image decode or encode failure."""


class TooManyLabelsError(TexwarpError):
    def __init__(self, count: int, limit: int):
        super().__init__(f"semantic map has {count} color clusters (limit {limit})")


class ConfigError(TexwarpError):
    """Invalid pipeline configuration value."""


class StageError(TexwarpError):
    """Wraps an engine failure with the pipeline stage it occurred in."""

    def __init__(self, stage: str, cause: Exception):
        self.stage = stage
        self.cause = cause
        super().__init__(f"stage {stage}: {cause}")
