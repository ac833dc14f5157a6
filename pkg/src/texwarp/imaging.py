"""Image and semantic-map I/O, color preprocessing, and alignment.

Images travel through the engine as float32 (3, H, W) arrays in the
ImageNet-normalized color space that the encoder expects; semantic maps
additionally keep an exact 8-bit representation so label colors survive
round trips untouched.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np
from PIL import Image, UnidentifiedImageError

from texwarp.errors import ImageError, ShapeMismatchError, TooManyLabelsError

IMAGENET_MEAN = np.array([0.485, 0.456, 0.406], dtype=np.float32)
IMAGENET_STD = np.array([0.229, 0.224, 0.225], dtype=np.float32)

MAX_LABELS = 64
DEFAULT_SNAP_TOLERANCE = 16.0 / 255.0


def normalize(rgb01: np.ndarray) -> np.ndarray:
    """[0,1] RGB (3, H, W) to the encoder's normalized space."""
    return (rgb01.astype(np.float32) - IMAGENET_MEAN[:, None, None]) / IMAGENET_STD[
        :, None, None
    ]


def denormalize(feature: np.ndarray) -> np.ndarray:
    """Inverse of :func:`normalize`, clamped to [0,1]."""
    rgb = feature * IMAGENET_STD[:, None, None] + IMAGENET_MEAN[:, None, None]
    return np.clip(rgb, 0.0, 1.0)


def _open_rgb(source) -> np.ndarray:
    try:
        img = Image.open(source)
        img.load()
    except (UnidentifiedImageError, OSError) as exc:
        raise ImageError(f"cannot decode image: {exc}") from exc
    if img.mode == "RGBA":
        img = img.convert("RGB")  # painting UIs export opaque RGBA canvases
    if img.mode != "RGB":
        raise ImageError(f"expected an RGB image, got mode {img.mode!r}")
    return np.asarray(img, dtype=np.uint8)


def load_rgb8(path) -> np.ndarray:
    """8-bit (H, W, 3) pixels, exactly as stored."""
    return _open_rgb(path)


def decode_rgb8(data: bytes) -> np.ndarray:
    return _open_rgb(io.BytesIO(data))


def load_image(path) -> np.ndarray:
    """PNG file to a normalized float32 (3, H, W) feature."""
    rgb8 = load_rgb8(path)
    return normalize(rgb8.transpose(2, 0, 1).astype(np.float32) / 255.0)


def decode_image_bytes(data: bytes) -> np.ndarray:
    rgb8 = decode_rgb8(data)
    return normalize(rgb8.transpose(2, 0, 1).astype(np.float32) / 255.0)


def to_rgb8(feature: np.ndarray) -> np.ndarray:
    """Normalized feature to displayable (H, W, 3) uint8."""
    rgb = denormalize(np.asarray(feature, dtype=np.float32))
    u8 = np.round(rgb * 255.0).astype(np.uint8)
    return u8.transpose(1, 2, 0)


def save_image(feature: np.ndarray, path) -> None:
    """De-normalize, clamp, write an 8-bit PNG."""
    try:
        Image.fromarray(to_rgb8(feature), mode="RGB").save(path, format="PNG")
    except OSError as exc:
        raise ImageError(f"cannot write {path}: {exc}") from exc


def encode_image_bytes(feature: np.ndarray) -> bytes:
    buf = io.BytesIO()
    Image.fromarray(to_rgb8(feature), mode="RGB").save(buf, format="PNG")
    return buf.getvalue()


def align_dims(arr: np.ndarray, multiple: int, axes: tuple[int, int] = (-2, -1)) -> np.ndarray:
    """Center-crop so the two spatial axes are divisible by ``multiple``."""
    if multiple < 1 or (multiple & (multiple - 1)) or multiple > 16:
        raise ShapeMismatchError("align multiple (power of two <= 16)", (16,), (multiple,))
    slices = [slice(None)] * arr.ndim
    for ax in axes:
        size = arr.shape[ax]
        if size < multiple:
            raise ShapeMismatchError(
                "image smaller than alignment multiple", (multiple,), (size,)
            )
        rem = size % multiple
        if rem:
            off = rem // 2
            slices[ax] = slice(off, off + size - rem)
    return arr[tuple(slices)]


def resample_nearest(arr: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    """Nearest-neighbor resample over the trailing two axes."""
    h, w = arr.shape[-2], arr.shape[-1]
    rows = np.minimum((np.arange(out_h) + 0.5) * h / out_h, h - 1).astype(np.int64)
    cols = np.minimum((np.arange(out_w) + 0.5) * w / out_w, w - 1).astype(np.int64)
    return arr[..., rows[:, None], cols[None, :]]


@dataclass(frozen=True)
class SemanticMap:
    """Label image plus color palette (palette sorted lexicographically)."""

    labels: np.ndarray  # (H, W) int32
    palette: np.ndarray  # (K, 3) uint8

    @property
    def n_labels(self) -> int:
        return self.palette.shape[0]

    def render(self) -> np.ndarray:
        """(H, W, 3) uint8 image of exact palette colors."""
        return self.palette[self.labels]

    def masks(self) -> np.ndarray:
        """(K, H, W) boolean partition of the image."""
        return self.labels[None, :, :] == np.arange(self.n_labels)[:, None, None]

    def masks_at(self, h: int, w: int) -> np.ndarray:
        """Label masks nearest-resampled to a feature resolution."""
        return resample_nearest(self.labels, h, w)[None, :, :] == np.arange(
            self.n_labels
        )[:, None, None]

    def map_colors(self, rgb8: np.ndarray) -> np.ndarray:
        """Assign each pixel of another image to this palette (nearest color)."""
        flat = rgb8.reshape(-1, 3).astype(np.float64) / 255.0
        pal = self.palette.astype(np.float64) / 255.0
        d = ((flat[:, None, :] - pal[None, :, :]) ** 2).sum(axis=2)
        return d.argmin(axis=1).astype(np.int32).reshape(rgb8.shape[:2])


def parse_semantic_map(
    rgb8: np.ndarray, tolerance: float = DEFAULT_SNAP_TOLERANCE
) -> SemanticMap:
    """Cluster an 8-bit label image into a palette and per-pixel labels.

    Distinct colors are greedily merged (most frequent first) when within
    ``tolerance`` Euclidean RGB distance in [0,1] scale; each pixel then
    snaps to its nearest palette color. More than 64 clusters is an error.
    """
    rgb8 = np.asarray(rgb8)
    if rgb8.ndim != 3 or rgb8.shape[2] != 3 or rgb8.dtype != np.uint8:
        raise ImageError("semantic map must be an (H, W, 3) uint8 array")
    flat = rgb8.reshape(-1, 3)
    colors, counts = np.unique(flat, axis=0, return_counts=True)

    # most frequent first; lexicographic RGB settles equal counts
    order = np.lexsort((colors[:, 2], colors[:, 1], colors[:, 0], -counts))
    colors = colors[order]

    centers: list[np.ndarray] = []
    unit = colors.astype(np.float64) / 255.0
    for i in range(colors.shape[0]):
        c = unit[i]
        if centers and min(np.linalg.norm(c - np.array(centers), axis=1)) <= tolerance:
            continue
        centers.append(c)
        if len(centers) > MAX_LABELS:
            raise TooManyLabelsError(len(centers), MAX_LABELS)

    palette = np.round(np.array(centers) * 255.0).astype(np.uint8)
    palette = palette[np.lexsort((palette[:, 2], palette[:, 1], palette[:, 0]))]

    # snap every distinct color to its nearest palette entry, then fan out
    uniq, inverse = np.unique(flat, axis=0, return_inverse=True)
    pal_unit = palette.astype(np.float64) / 255.0
    uniq_unit = uniq.astype(np.float64) / 255.0
    d = ((uniq_unit[:, None, :] - pal_unit[None, :, :]) ** 2).sum(axis=2)
    uniq_label = d.argmin(axis=1).astype(np.int32)
    labels = uniq_label[inverse].reshape(rgb8.shape[:2])
    return SemanticMap(labels=labels, palette=palette)
