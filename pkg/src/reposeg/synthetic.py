"""Procedural desk-scale scenes with exact ground truth.

Each scene is a flat shape on a plain background with a bright circular
highlight on the shape and optional Gaussian pixel noise. Because the
rasters are generated analytically, the object and highlight ground-truth
masks are exact, which is what makes the end-to-end benchmark checkable.

The candidate generator mimics the ambiguity of a point-prompted segmenter:
one mask covering only the highlight, one covering the object (optionally
perturbed), and one overshooting into the background.
"""

from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass

import numpy as np

from .errors import InvalidSpec
from .image_io import read_image, read_mask, write_image, write_mask
from .providers import CandidateSet
from .specular import dilate, erode

RECTANGLE = "rectangle"
ELLIPSE = "ellipse"
ROUNDED_RECT = "rounded_rect"
_SHAPES = (RECTANGLE, ELLIPSE, ROUNDED_RECT)

FAITHFUL = "faithful"
NOISY = "noisy"

# candidate 3 must always trip an r_max gate of up to 0.6
_OVERSHOOT_RATIO = 0.62


@dataclass
class SceneSpec:
    """Everything needed to rasterize one scene deterministically.

    Geometry is given in fractions of the image (object center/size) or of
    the object (highlight offset), so specs stay resolution-independent.
    highlight_peak must be >= 240: the detector story only works when the
    highlight is near saturation.
    """

    width: int = 160
    height: int = 160
    shape: str = ELLIPSE
    object_intensity: int = 135
    background_intensity: int = 110
    object_center: tuple[float, float] = (0.5, 0.5)
    object_size: tuple[float, float] = (0.62, 0.62)
    highlight_offset: tuple[float, float] = (0.0, 0.0)
    highlight_radius: int = 4
    highlight_peak: int = 250
    noise_sigma: float = 3.0
    seed: int = 0

    def __post_init__(self):
        if self.width < 8 or self.height < 8:
            raise InvalidSpec("image must be at least 8x8")
        if self.shape not in _SHAPES:
            raise InvalidSpec(f"unknown shape {self.shape!r}")
        for v in (self.object_intensity, self.background_intensity):
            if not 0 <= v <= 255:
                raise InvalidSpec("intensities must be 8-bit")
        if not 240 <= self.highlight_peak <= 255:
            raise InvalidSpec("highlight_peak must be in [240, 255]")
        if self.highlight_radius < 1:
            raise InvalidSpec("highlight_radius must be >= 1")
        if self.noise_sigma < 0:
            raise InvalidSpec("noise_sigma must be >= 0")


@dataclass
class SceneSample:
    image: np.ndarray        # (H, W, 3) uint8
    gt_object: np.ndarray    # bool
    gt_specular: np.ndarray  # bool


def _raster_object(spec: SceneSpec) -> np.ndarray:
    h, w = spec.height, spec.width
    cx, cy = spec.object_center[0] * w, spec.object_center[1] * h
    half_w, half_h = spec.object_size[0] * w / 2.0, spec.object_size[1] * h / 2.0
    ys, xs = np.mgrid[0:h, 0:w]
    dx, dy = xs + 0.5 - cx, ys + 0.5 - cy

    if spec.shape == RECTANGLE:
        return (np.abs(dx) <= half_w) & (np.abs(dy) <= half_h)
    if spec.shape == ELLIPSE:
        return (dx / half_w) ** 2 + (dy / half_h) ** 2 <= 1.0
    # rounded rectangle: rectangle with quarter-disk corners
    corner = 0.25 * min(half_w, half_h)
    inner_x = np.abs(dx) <= half_w - corner
    inner_y = np.abs(dy) <= half_h - corner
    body = (inner_x & (np.abs(dy) <= half_h)) | (inner_y & (np.abs(dx) <= half_w))
    cdx = np.maximum(np.abs(dx) - (half_w - corner), 0.0)
    cdy = np.maximum(np.abs(dy) - (half_h - corner), 0.0)
    return body | (cdx ** 2 + cdy ** 2 <= corner ** 2)


def _raster_highlight(spec: SceneSpec) -> np.ndarray:
    h, w = spec.height, spec.width
    cx = (spec.object_center[0] + spec.highlight_offset[0] * spec.object_size[0]) * w
    cy = (spec.object_center[1] + spec.highlight_offset[1] * spec.object_size[1]) * h
    ys, xs = np.mgrid[0:h, 0:w]
    return (xs + 0.5 - cx) ** 2 + (ys + 0.5 - cy) ** 2 <= spec.highlight_radius ** 2


def generate_scene(spec: SceneSpec) -> SceneSample:
    """Rasterize a scene; bit-identical for identical specs.

    Raises InvalidSpec when the object misses its 2-pixel image margin or
    the highlight disk leaves the object.
    """
    gt_object = _raster_object(spec)
    gt_specular = _raster_highlight(spec)
    if not gt_object.any():
        raise InvalidSpec("object raster is empty")
    ys, xs = np.nonzero(gt_object)
    if (ys.min() < 2 or xs.min() < 2 or ys.max() >= spec.height - 2
            or xs.max() >= spec.width - 2):
        raise InvalidSpec("object must keep a >= 2 pixel margin to the image border")
    if not gt_specular.any():
        raise InvalidSpec("highlight raster is empty")
    if (gt_specular & ~gt_object).any():
        raise InvalidSpec("highlight disk must lie entirely inside the object")

    gray = np.full((spec.height, spec.width), float(spec.background_intensity))
    gray[gt_object] = float(spec.object_intensity)
    gray[gt_specular] = float(spec.highlight_peak)
    if spec.noise_sigma > 0:
        rng = np.random.default_rng(spec.seed)
        gray = gray + rng.normal(0.0, spec.noise_sigma, gray.shape)
    gray8 = np.clip(np.rint(gray), 0, 255).astype(np.uint8)
    image = np.repeat(gray8[:, :, None], 3, axis=2)
    return SceneSample(image=image, gt_object=gt_object, gt_specular=gt_specular)


def _scatter_speckles(mask: np.ndarray, forbidden: np.ndarray, rng, count: int) -> None:
    # small foreground dots well clear of the object so cleanup can drop them
    zone = ~dilate(forbidden, 2)
    zone[:1, :] = zone[-1:, :] = False
    zone[:, :1] = zone[:, -1:] = False
    flat = np.flatnonzero(zone)
    if len(flat) == 0:
        return
    for pos in rng.choice(flat, size=min(count, len(flat)), replace=False):
        y, x = divmod(int(pos), mask.shape[1])
        size = int(rng.integers(1, 3))  # 1x1 or 2x2
        mask[y:y + size, x:x + size] = True


def _punch_holes(mask: np.ndarray, rng, count: int) -> None:
    # interior-only pockets; eroding first keeps them from notching the rim
    interior = erode(mask, 2)
    flat = np.flatnonzero(interior)
    if len(flat) == 0:
        return
    for pos in rng.choice(flat, size=min(count, len(flat)), replace=False):
        y, x = divmod(int(pos), mask.shape[1])
        mask[y:y + 2, x:x + 2] = False


def generate_candidates(sample: SceneSample, mode: str = FAITHFUL,
                        seed: int = 0) -> CandidateSet:
    """Build the three-way ambiguous candidate set for a scene.

    Candidate 0 is the highlight alone, candidate 1 the object (exact in
    faithful mode; with a seeded 1-pixel boundary shift, up to 5 speckles
    and up to 2 interior holes in noisy mode), candidate 2 the object plus
    a background strip pushing its area ratio past 0.6.
    """
    if mode not in (FAITHFUL, NOISY):
        raise ValueError(f"unknown candidate mode {mode!r}")
    gt = sample.gt_object

    middle = gt.copy()
    if mode == NOISY:
        rng = np.random.default_rng(seed)
        boundary_op = int(rng.integers(0, 3))
        if boundary_op == 1:
            middle = erode(middle, 1)
        elif boundary_op == 2:
            middle = dilate(middle, 1)
        _punch_holes(middle, rng, int(rng.integers(0, 3)))
        _scatter_speckles(middle, gt, rng, int(rng.integers(0, 6)))

    overshoot = gt.copy()
    strip_rows = int(np.ceil(_OVERSHOOT_RATIO * gt.shape[0]))
    overshoot[:strip_rows, :] = True

    masks = [sample.gt_specular.copy(), middle, overshoot]
    return CandidateSet(masks=masks, scores=[0.88, 0.95, 0.72])


def sample_scene_spec(seed: int, width: int = 160, height: int = 160) -> SceneSpec:
    """Draw a varied but benchmark-safe scene spec from a seed.

    Object/background contrast spans 12..40 gray levels; the low end is
    where a global threshold starts splitting at the highlight instead of
    the object, which is exactly the failure mode the pipeline sidesteps.
    """
    rng = np.random.default_rng(seed)
    shape = _SHAPES[int(rng.integers(0, len(_SHAPES)))]
    size = (float(rng.uniform(0.57, 0.66)), float(rng.uniform(0.57, 0.66)))
    center = (float(rng.uniform(0.47, 0.53)), float(rng.uniform(0.47, 0.53)))
    background = int(rng.integers(95, 126))
    contrast = int(rng.integers(12, 41))
    offset = (float(rng.uniform(-0.2, 0.2)), float(rng.uniform(-0.2, 0.2)))
    return SceneSpec(
        width=width,
        height=height,
        shape=shape,
        object_intensity=background + contrast,
        background_intensity=background,
        object_center=center,
        object_size=size,
        highlight_offset=offset,
        highlight_radius=int(rng.integers(4, 7)),
        highlight_peak=int(rng.integers(245, 256)),
        noise_sigma=float(rng.uniform(1.0, 5.0)),
        seed=int(rng.integers(0, 2 ** 63)),
    )


def write_scene(directory: str, spec: SceneSpec, sample: SceneSample,
                candidate_mode: str = NOISY) -> None:
    """Write the on-disk scene layout consumed by batch runs and providers.

    directory/
        image.png  gt_object.png  gt_specular.png  spec.json
        candidates/mask_{0,1,2}.png
    """
    os.makedirs(os.path.join(directory, "candidates"), exist_ok=True)
    write_image(sample.image, os.path.join(directory, "image.png"))
    write_mask(sample.gt_object, os.path.join(directory, "gt_object.png"))
    write_mask(sample.gt_specular, os.path.join(directory, "gt_specular.png"))
    candidates = generate_candidates(sample, mode=candidate_mode, seed=spec.seed)
    for i, mask in enumerate(candidates.masks):
        write_mask(mask, os.path.join(directory, "candidates", f"mask_{i}.png"))
    doc = asdict(spec)
    doc["candidate_mode"] = candidate_mode
    with open(os.path.join(directory, "spec.json"), "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)


def load_scene(directory: str) -> tuple[SceneSample, SceneSpec | None]:
    """Rebuild a SceneSample (and its spec, if present) from a scene directory."""
    image = read_image(os.path.join(directory, "image.png"))
    gt_object = read_mask(os.path.join(directory, "gt_object.png"))
    gt_specular = read_mask(os.path.join(directory, "gt_specular.png"))
    spec = None
    spec_path = os.path.join(directory, "spec.json")
    if os.path.exists(spec_path):
        with open(spec_path, encoding="utf-8") as fh:
            doc = json.load(fh)
        doc.pop("candidate_mode", None)
        doc["object_center"] = tuple(doc["object_center"])
        doc["object_size"] = tuple(doc["object_size"])
        doc["highlight_offset"] = tuple(doc["highlight_offset"])
        spec = SceneSpec(**doc)
    return SceneSample(image=image, gt_object=gt_object, gt_specular=gt_specular), spec


__all__ = [
    "SceneSpec", "SceneSample", "generate_scene", "generate_candidates",
    "sample_scene_spec", "write_scene", "load_scene", "FAITHFUL", "NOISY",
]
