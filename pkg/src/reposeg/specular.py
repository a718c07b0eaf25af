"""Specular highlight detection and prompt-point computation.

Highlights are found by global intensity thresholding (two interchangeable
threshold rules), cleaned by a small morphological opening, and reduced to
a single prompt coordinate: the center of mass of the largest highlight
region, snapped onto the region if the mean falls outside it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .components import connected_components, largest_component
from .errors import EmptyRegion, NoSpecularRegion
from .image_io import PixelPoint, require_gray, require_mask

PERCENTILE = "percentile"
ADAPTIVE = "adaptive"


@dataclass(frozen=True)
class DetectorConfig:
    """Threshold rule plus cleanup parameters.

    method: "percentile" keeps roughly the brightest percentile_fraction of
    pixels; "adaptive" thresholds at mean + adaptive_k * stddev. Either way
    the threshold never drops below absolute_floor, the result is opened
    with a square element of side 2 * opening_radius + 1, and components
    smaller than min_region_area pixels are dropped.
    """

    method: str = PERCENTILE
    percentile_fraction: float = 0.005
    adaptive_k: float = 3.0
    absolute_floor: int = 200
    opening_radius: int = 1
    min_region_area: int = 4

    def __post_init__(self):
        if self.method not in (PERCENTILE, ADAPTIVE):
            raise ValueError(f"unknown detector method {self.method!r}")
        if not 0.0 < self.percentile_fraction < 1.0:
            raise ValueError("percentile_fraction must be in (0, 1)")
        if self.adaptive_k <= 0:
            raise ValueError("adaptive_k must be positive")
        if not 0 <= self.absolute_floor <= 255:
            raise ValueError("absolute_floor must be an 8-bit intensity")
        if self.opening_radius < 0 or self.min_region_area < 0:
            raise ValueError("opening_radius and min_region_area must be >= 0")


def _round_half_away(value: float) -> int:
    # round-half-away-from-zero; all uses here are non-negative
    return int(np.floor(value + 0.5)) if value >= 0 else -int(np.floor(-value + 0.5))


def dilate(mask: np.ndarray, radius: int) -> np.ndarray:
    """Binary dilation with a square element of side 2*radius+1."""
    require_mask(mask)
    if radius == 0 or not mask.any():
        return mask.copy()
    h, w = mask.shape
    padded = np.pad(mask, radius, mode="constant", constant_values=False)
    out = np.zeros_like(mask)
    for dy in range(2 * radius + 1):
        for dx in range(2 * radius + 1):
            out |= padded[dy:dy + h, dx:dx + w]
    return out


def erode(mask: np.ndarray, radius: int) -> np.ndarray:
    """Binary erosion with a square element; outside the image is background."""
    require_mask(mask)
    if radius == 0:
        return mask.copy()
    h, w = mask.shape
    padded = np.pad(mask, radius, mode="constant", constant_values=False)
    out = np.ones_like(mask)
    for dy in range(2 * radius + 1):
        for dx in range(2 * radius + 1):
            out &= padded[dy:dy + h, dx:dx + w]
    return out


def binary_open(mask: np.ndarray, radius: int) -> np.ndarray:
    """Opening = erosion then dilation; never adds pixels outside the input."""
    return dilate(erode(mask, radius), radius)


def _percentile_threshold(gray: np.ndarray, fraction: float) -> int:
    hist = np.bincount(gray.ravel(), minlength=256)
    # tail[t] = number of pixels with intensity >= t
    tail = np.cumsum(hist[::-1])[::-1]
    budget = fraction * gray.size
    candidates = np.flatnonzero(tail <= budget)
    # saturate at 255 when even the brightest bin exceeds the budget
    return int(candidates[0]) if len(candidates) else 255


def _adaptive_threshold(gray: np.ndarray, k: float) -> int:
    flat = gray.astype(np.float64)
    t = _round_half_away(float(flat.mean()) + k * float(flat.std()))
    return int(np.clip(t, 0, 255))


def detect_specular(gray: np.ndarray, config: DetectorConfig = DetectorConfig()) -> np.ndarray:
    """Detect the core specular highlight region of a grayscale image.

    Thresholds at max(absolute_floor, method threshold), opens the result,
    and removes components below min_region_area. Raises NoSpecularRegion
    if nothing survives, so downstream stages never see an empty prompt.
    """
    require_gray(gray)
    if config.method == PERCENTILE:
        t_method = _percentile_threshold(gray, config.percentile_fraction)
    else:
        t_method = _adaptive_threshold(gray, config.adaptive_k)
    threshold = max(config.absolute_floor, t_method)

    region = gray >= threshold
    region = binary_open(region, config.opening_radius)
    if config.min_region_area > 1 and region.any():
        labeling = connected_components(region, connectivity=8)
        keep = labeling.component_sizes >= config.min_region_area
        keep[0] = False
        region = keep[labeling.labels]
    if not region.any():
        raise NoSpecularRegion(f"no pixels survive threshold {threshold} and cleanup")
    return region


def center_of_mass(region: np.ndarray) -> PixelPoint:
    """Mean foreground coordinate, rounded half-away-from-zero per axis.

    Exact integer arithmetic: round(p/q) = (2p + q) // (2q) for p, q >= 0.
    The result always lies inside the region's bounding box, though not
    necessarily on a foreground pixel.
    """
    require_mask(region)
    ys, xs = np.nonzero(region)
    n = len(xs)
    if n == 0:
        raise EmptyRegion("center of mass of an empty region")
    cx = (2 * int(xs.sum()) + n) // (2 * n)
    cy = (2 * int(ys.sum()) + n) // (2 * n)
    return PixelPoint(cx, cy)


def prompt_point(region: np.ndarray) -> PixelPoint:
    """Pick the segmenter prompt: a foreground pixel of the dominant highlight.

    Takes the largest 8-connected component (ties: earliest first pixel in
    row-major order) and returns its center of mass if that lands on the
    component; otherwise the component pixel nearest to it in Euclidean
    distance (ties again in row-major order). The result is guaranteed to
    be a foreground pixel.
    """
    require_mask(region)
    if not region.any():
        raise EmptyRegion("prompt point of an empty region")
    blob = largest_component(connected_components(region, connectivity=8))
    center = center_of_mass(blob)
    if blob[center.y, center.x]:
        return center
    ys, xs = np.nonzero(blob)
    d2 = (xs.astype(np.int64) - center.x) ** 2 + (ys.astype(np.int64) - center.y) ** 2
    i = int(np.argmin(d2))  # np.nonzero is row-major, argmin takes the first
    return PixelPoint(int(xs[i]), int(ys[i]))
