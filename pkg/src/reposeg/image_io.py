"""Pixel-grid conventions, luma conversion, and bit-exact mask/image file I/O.

Array conventions used across the package:

* color image: ``(H, W, 3)`` uint8, RGB order
* grayscale image: ``(H, W)`` uint8
* binary mask: ``(H, W)`` bool, True = foreground/white
* coordinates: ``x`` is the column, ``y`` is the row, origin top-left,
  so pixel access is always ``arr[y, x]``

Mask files use 0 = background, 255 = foreground; on read anything >= 128
counts as foreground. Supported formats are 8-bit PNG (grayscale or RGB)
and binary PGM (P5), selected by file extension.
"""

from __future__ import annotations

import os
from typing import NamedTuple

import numpy as np
from PIL import Image as PILImage
from PIL import UnidentifiedImageError

from .errors import DecodeError, DimensionMismatch, UnsupportedFormat

# BT.601 luma weights, rounded half-up. The detection stage only needs a
# stable, monotone gray reduction; this is the canonical one.
_LUMA_WEIGHTS = np.array([0.299, 0.587, 0.114], dtype=np.float64)

_MASK_EXTENSIONS = {".png", ".pgm"}


class PixelPoint(NamedTuple):
    """Integer grid coordinate: x = column, y = row."""

    x: int
    y: int


def require_image(image: np.ndarray) -> np.ndarray:
    if not (isinstance(image, np.ndarray) and image.ndim == 3 and image.shape[2] == 3
            and image.dtype == np.uint8):
        raise ValueError("expected an (H, W, 3) uint8 RGB array")
    return image


def require_gray(gray: np.ndarray) -> np.ndarray:
    if not (isinstance(gray, np.ndarray) and gray.ndim == 2 and gray.dtype == np.uint8):
        raise ValueError("expected an (H, W) uint8 grayscale array")
    return gray


def require_mask(mask: np.ndarray) -> np.ndarray:
    if not (isinstance(mask, np.ndarray) and mask.ndim == 2 and mask.dtype == np.bool_):
        raise ValueError("expected an (H, W) bool mask array")
    return mask


def check_same_shape(a: np.ndarray, b: np.ndarray, what: str = "rasters") -> None:
    if a.shape[:2] != b.shape[:2]:
        raise DimensionMismatch(
            f"{what} differ in size: {a.shape[1]}x{a.shape[0]} vs {b.shape[1]}x{b.shape[0]}")


def foreground_count(mask: np.ndarray) -> int:
    return int(np.count_nonzero(require_mask(mask)))


def to_luma(image: np.ndarray) -> np.ndarray:
    """Convert an RGB image to 8-bit luma (0.299 R + 0.587 G + 0.114 B).

    Rounds half-up and clamps to [0, 255]. Gray triples map to themselves
    and raising any single channel never lowers the result.
    """
    require_image(image)
    luma = image.astype(np.float64) @ _LUMA_WEIGHTS
    return np.clip(np.floor(luma + 0.5), 0, 255).astype(np.uint8)


def _open(path: str):
    try:
        img = PILImage.open(path)
        img.load()
        return img
    except FileNotFoundError:
        raise
    except UnidentifiedImageError as exc:
        raise DecodeError(f"{path}: not a decodable raster ({exc})") from exc
    except OSError as exc:
        raise DecodeError(f"{path}: truncated or malformed raster ({exc})") from exc


def read_image(path: str) -> np.ndarray:
    """Read an 8-bit PNG (gray or RGB) or binary PGM as an RGB array."""
    img = _open(path)
    if img.mode == "RGB":
        return np.asarray(img, dtype=np.uint8)
    if img.mode == "L":
        gray = np.asarray(img, dtype=np.uint8)
        return np.repeat(gray[:, :, None], 3, axis=2)
    raise UnsupportedFormat(f"{path}: mode {img.mode!r} not supported (need 8-bit gray or RGB)")


def read_gray(path: str) -> np.ndarray:
    """Read a raster as 8-bit grayscale (color input goes through to_luma)."""
    img = _open(path)
    if img.mode == "L":
        return np.asarray(img, dtype=np.uint8)
    if img.mode == "RGB":
        return to_luma(np.asarray(img, dtype=np.uint8))
    raise UnsupportedFormat(f"{path}: mode {img.mode!r} not supported (need 8-bit gray or RGB)")


def read_mask(path: str) -> np.ndarray:
    """Read a binary mask: single-channel raster, value >= 128 is foreground."""
    img = _open(path)
    if img.mode == "1":
        return np.asarray(img, dtype=bool)
    if img.mode != "L":
        raise UnsupportedFormat(
            f"{path}: mask files must be 8-bit single-channel, got mode {img.mode!r}")
    return np.asarray(img, dtype=np.uint8) >= 128


def _check_writable_format(path: str) -> str:
    ext = os.path.splitext(path)[1].lower()
    if ext not in _MASK_EXTENSIONS:
        raise UnsupportedFormat(f"{path}: can only write .png or .pgm, got {ext!r}")
    return ext


def write_mask(mask: np.ndarray, path: str) -> None:
    """Write a mask as 0/255 single-channel PNG or binary PGM (by extension).

    Round-trips exactly: read_mask(write_mask(m)) == m.
    """
    require_mask(mask)
    _check_writable_format(path)
    raster = np.where(mask, np.uint8(255), np.uint8(0))
    PILImage.fromarray(raster, mode="L").save(path)


def write_gray(gray: np.ndarray, path: str) -> None:
    require_gray(gray)
    _check_writable_format(path)
    PILImage.fromarray(gray, mode="L").save(path)


def write_image(image: np.ndarray, path: str) -> None:
    require_image(image)
    if os.path.splitext(path)[1].lower() != ".png":
        raise UnsupportedFormat(f"{path}: color images are written as .png only")
    PILImage.fromarray(image, mode="RGB").save(path)
