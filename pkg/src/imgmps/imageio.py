"""Loading, normalizing and resampling grayscale images on power-of-two grids.

Everything downstream works on an :class:`ImageGrid`: a ``2**n x 2**n`` array of
reals in ``[0, 1]`` whose row index is the y-coordinate ``b`` and whose column
index is the x-coordinate ``a``.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

__all__ = [
    "ImageGrid",
    "load_grid",
    "downsample",
    "crop_center",
    "to_gray",
    "center_square",
    "bilinear_resize",
    "write_pgm",
    "read_pgm",
    "grid_to_json",
    "grid_from_json",
]

_RANGE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class ImageGrid:
    """A square grayscale image with side ``2**n`` and values in ``[0, 1]``.

    Attributes
    ----------
    n : int
        Base-2 logarithm of the side length.
    pixels : np.ndarray
        Float array of shape ``(2**n, 2**n)``; ``pixels[b, a]`` is the value at
        x-coordinate ``a`` and y-coordinate ``b``.
    """

    n: int
    pixels: np.ndarray

    def __post_init__(self):
        pixels = np.array(self.pixels, dtype=float)
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        side = 1 << self.n
        if pixels.shape != (side, side):
            raise ValueError(f"pixels must have shape {(side, side)}, got {pixels.shape}")
        if not np.all(np.isfinite(pixels)):
            raise ValueError("pixels contain non-finite values")
        lo, hi = pixels.min(), pixels.max()
        if lo < -_RANGE_TOL or hi > 1 + _RANGE_TOL:
            raise ValueError(f"pixel values must lie in [0, 1], got range [{lo}, {hi}]")
        pixels = np.clip(pixels, 0.0, 1.0)
        pixels.setflags(write=False)
        object.__setattr__(self, "pixels", pixels)

    @property
    def side(self) -> int:
        return 1 << self.n

    @classmethod
    def from_array(cls, pixels) -> "ImageGrid":
        """Wrap a square power-of-two array, inferring ``n`` from its shape."""
        pixels = np.asarray(pixels, dtype=float)
        if pixels.ndim != 2 or pixels.shape[0] != pixels.shape[1]:
            raise ValueError(f"expected a square 2-D array, got shape {pixels.shape}")
        side = pixels.shape[0]
        n = side.bit_length() - 1
        if side < 2 or (1 << n) != side:
            raise ValueError(f"side length must be a power of two >= 2, got {side}")
        return cls(n, pixels)

    def __eq__(self, other):
        if not isinstance(other, ImageGrid):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.pixels, other.pixels)

    def __repr__(self):
        return f"ImageGrid(n={self.n}, mean={self.pixels.mean():.4g})"


def to_gray(raster: np.ndarray) -> np.ndarray:
    """Unweighted mean over color channels; alpha (4th channel or LA) is dropped."""
    raster = np.asarray(raster, dtype=float)
    if raster.ndim == 2:
        return raster
    if raster.ndim != 3:
        raise ValueError(f"unsupported raster shape {raster.shape}")
    channels = raster.shape[2]
    if channels in (2, 4):
        raster = raster[..., : channels - 1]
    return raster.mean(axis=2)


def center_square(raster: np.ndarray) -> np.ndarray:
    """Largest centered square section of a 2-D array."""
    h, w = raster.shape[:2]
    s = min(h, w)
    top = (h - s) // 2
    left = (w - s) // 2
    return raster[top : top + s, left : left + s]


def _resample_axis(length_in: int, length_out: int):
    # pixel-center alignment, clamped at the edges
    coords = (np.arange(length_out) + 0.5) * (length_in / length_out) - 0.5
    coords = np.clip(coords, 0.0, length_in - 1)
    lo = np.floor(coords).astype(int)
    hi = np.minimum(lo + 1, length_in - 1)
    frac = coords - lo
    return lo, hi, frac


def bilinear_resize(raster: np.ndarray, side: int) -> np.ndarray:
    """Bilinear resize of a 2-D array to ``side x side``."""
    raster = np.asarray(raster, dtype=float)
    h, w = raster.shape
    if (h, w) == (side, side):
        return raster.copy()
    r0, r1, fr = _resample_axis(h, side)
    c0, c1, fc = _resample_axis(w, side)
    top = raster[r0][:, c0] * (1 - fc) + raster[r0][:, c1] * fc
    bottom = raster[r1][:, c0] * (1 - fc) + raster[r1][:, c1] * fc
    return top * (1 - fr)[:, None] + bottom * fr[:, None]


def load_grid(path, n_target: int) -> ImageGrid:
    """Read a PNG or binary PGM file into a ``2**n_target`` grid.

    The raster is converted to gray by averaging channels, cropped to its
    largest centered square, resized bilinearly and divided by 255.
    """
    if n_target < 1:
        raise ValueError(f"n_target must be >= 1, got {n_target}")
    try:
        with Image.open(path) as img:
            img.load()
            raster = np.asarray(img)
    except (UnidentifiedImageError, OSError) as exc:
        raise ValueError(f"cannot decode image {path!s}: {exc}") from exc
    if raster.size == 0:
        raise ValueError(f"image {path!s} is empty")
    if raster.dtype == np.uint16:
        raster = raster / 257.0
    elif raster.dtype == bool:
        raster = raster * 255.0
    gray = center_square(to_gray(raster))
    resized = bilinear_resize(gray, 1 << n_target)
    return ImageGrid(n_target, np.clip(resized / 255.0, 0.0, 1.0))


def downsample(grid: ImageGrid, levels: int) -> ImageGrid:
    """Keep every ``2**levels``-th row and column, starting at index 0."""
    if levels < 0 or levels > grid.n:
        raise ValueError(f"levels must lie in [0, {grid.n}], got {levels}")
    if levels == grid.n:
        raise ValueError("downsampling to a single pixel leaves no valid grid (n >= 1)")
    step = 1 << levels
    return ImageGrid(grid.n - levels, grid.pixels[::step, ::step])


def crop_center(grid: ImageGrid, n_out: int) -> ImageGrid:
    """Central ``2**n_out`` square of the grid."""
    if n_out > grid.n:
        raise ValueError(f"n_out={n_out} exceeds grid n={grid.n}")
    if n_out < 1:
        raise ValueError(f"n_out must be >= 1, got {n_out}")
    off = (grid.side - (1 << n_out)) // 2
    s = 1 << n_out
    return ImageGrid(n_out, grid.pixels[off : off + s, off : off + s])


def write_pgm(grid: ImageGrid, path) -> None:
    """Binary PGM (P5), quantized to 8 bits."""
    data = np.floor(grid.pixels * 255.0 + 0.5).astype(np.uint8)
    header = f"P5\n{grid.side} {grid.side}\n255\n".encode("ascii")
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(data.tobytes())


def read_pgm(path) -> ImageGrid:
    """Read a square power-of-two P5 file written by :func:`write_pgm`."""
    with Image.open(path) as img:
        raster = np.asarray(img, dtype=float)
    return ImageGrid.from_array(to_gray(raster) / 255.0)


def grid_to_json(grid: ImageGrid) -> str:
    return json.dumps({"n": grid.n, "pixels": grid.pixels.ravel().tolist()})


def grid_from_json(text: str) -> ImageGrid:
    obj = json.loads(text)
    n = int(obj["n"])
    side = 1 << n
    return ImageGrid(n, np.asarray(obj["pixels"], dtype=float).reshape(side, side))


def is_image_file(path: os.PathLike) -> bool:
    return Path(path).suffix.lower() in {".png", ".pgm"}
