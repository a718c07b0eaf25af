import numpy as np
import pytest

from reposeg.errors import EmptyRegion, NoSpecularRegion
from reposeg.image_io import PixelPoint
from reposeg.specular import (
    DetectorConfig,
    binary_open,
    center_of_mass,
    detect_specular,
    dilate,
    erode,
    prompt_point,
)

from helpers import random_mask


def test_black_image_has_no_specular_region():
    with pytest.raises(NoSpecularRegion):
        detect_specular(np.zeros((32, 32), np.uint8))


def test_bright_block_is_detected_exactly():
    gray = np.full((100, 100), 50, np.uint8)
    gray[40:45, 60:65] = 255
    region = detect_specular(gray, DetectorConfig(method="percentile",
                                                  percentile_fraction=0.005,
                                                  absolute_floor=200))
    assert (region == (gray == 255)).all()


def test_single_bright_pixel_is_erased_by_opening():
    gray = np.full((100, 100), 50, np.uint8)
    gray[40, 60] = 255
    with pytest.raises(NoSpecularRegion):
        detect_specular(gray)


def test_region_never_below_absolute_floor():
    rng = np.random.default_rng(3)
    config = DetectorConfig(absolute_floor=180, min_region_area=1, opening_radius=0)
    for _ in range(50):
        gray = rng.integers(0, 256, (24, 24)).astype(np.uint8)
        try:
            region = detect_specular(gray, config)
        except NoSpecularRegion:
            continue
        assert (gray[region] >= 180).all()


def test_adaptive_threshold_monotone_in_k():
    rng = np.random.default_rng(5)
    for _ in range(30):
        gray = rng.integers(0, 256, (24, 24)).astype(np.uint8)
        previous = None
        for k in (1.0, 2.0, 3.0):
            config = DetectorConfig(method="adaptive", adaptive_k=k, absolute_floor=0,
                                    opening_radius=0, min_region_area=0)
            try:
                region = detect_specular(gray, config)
            except NoSpecularRegion:
                region = np.zeros_like(gray, bool)
            if previous is not None:
                assert not (region & ~previous).any()  # k up never adds pixels
            previous = region


def test_opening_is_anti_extensive():
    rng = np.random.default_rng(9)
    for _ in range(100):
        mask = random_mask(rng, 20, 20, density=0.6)
        assert not (binary_open(mask, 1) & ~mask).any()


def test_erode_dilate_shapes():
    block = np.zeros((7, 7), bool)
    block[1:6, 1:6] = True
    assert erode(block, 1).sum() == 9
    assert (dilate(erode(block, 1), 1) == block).all()


@pytest.mark.parametrize("x,y", [(3, 7), (0, 0)])
def test_center_of_mass_single_pixel(x, y):
    mask = np.zeros((10, 10), bool)
    mask[y, x] = True
    assert center_of_mass(mask) == PixelPoint(x, y)


def test_center_of_mass_symmetric_block():
    mask = np.zeros((11, 11), bool)
    mask[4:7, 4:7] = True
    assert center_of_mass(mask) == PixelPoint(5, 5)


def test_center_of_mass_rounds_half_away_from_zero():
    mask = np.zeros((4, 4), bool)
    mask[0:2, 0:2] = True  # continuous mean (0.5, 0.5)
    assert center_of_mass(mask) == PixelPoint(1, 1)


def test_center_of_mass_translation_equivariant():
    rng = np.random.default_rng(17)
    for _ in range(50):
        blob = random_mask(rng, 8, 8, density=0.5)
        if not blob.any():
            continue
        field = np.zeros((20, 20), bool)
        field[3:11, 2:10] = blob
        dx, dy = int(rng.integers(0, 8)), int(rng.integers(0, 8))
        shifted = np.zeros((20, 20), bool)
        shifted[3 + dy:11 + dy, 2 + dx:10 + dx] = blob
        base = center_of_mass(field)
        moved = center_of_mass(shifted)
        assert (moved.x - base.x, moved.y - base.y) == (dx, dy)


def test_center_of_mass_stays_in_bounding_box():
    rng = np.random.default_rng(21)
    for _ in range(100):
        mask = random_mask(rng, 12, 12, density=0.3)
        if not mask.any():
            continue
        ys, xs = np.nonzero(mask)
        c = center_of_mass(mask)
        assert xs.min() <= c.x <= xs.max()
        assert ys.min() <= c.y <= ys.max()


def test_center_of_mass_empty_raises():
    with pytest.raises(EmptyRegion):
        center_of_mass(np.zeros((5, 5), bool))
    with pytest.raises(EmptyRegion):
        prompt_point(np.zeros((5, 5), bool))


def test_prompt_point_convex_blob_equals_center_of_mass():
    mask = np.zeros((12, 12), bool)
    mask[2:7, 3:9] = True
    assert prompt_point(mask) == center_of_mass(mask)


def test_prompt_point_ring_snaps_to_nearest_ring_pixel():
    ring = np.zeros((11, 11), bool)
    ring[2, 2:9] = ring[8, 2:9] = True
    ring[2:9, 2] = ring[2:9, 8] = True
    center = center_of_mass(ring)
    assert center == PixelPoint(5, 5) and not ring[5, 5]
    result = prompt_point(ring)
    assert ring[result.y, result.x]
    # brute-force nearest-pixel oracle with row-major tie break
    ys, xs = np.nonzero(ring)
    d2 = (xs - 5) ** 2 + (ys - 5) ** 2
    best = int(np.argmin(d2))
    assert result == PixelPoint(int(xs[best]), int(ys[best]))
    assert result == PixelPoint(5, 2)


def test_prompt_point_uses_largest_component():
    mask = np.zeros((10, 14), bool)
    mask[1:2, 1:6] = True        # 5 pixels
    mask[5:8, 8:11] = True       # 9 pixels
    assert prompt_point(mask) == PixelPoint(9, 6)


def test_prompt_point_always_on_foreground():
    rng = np.random.default_rng(31)
    for _ in range(200):
        mask = random_mask(rng, 14, 14, density=float(rng.uniform(0.1, 0.7)))
        if not mask.any():
            continue
        p = prompt_point(mask)
        assert mask[p.y, p.x]


def test_detector_config_validation():
    with pytest.raises(ValueError):
        DetectorConfig(method="magic")
    with pytest.raises(ValueError):
        DetectorConfig(percentile_fraction=0.0)
    with pytest.raises(ValueError):
        DetectorConfig(absolute_floor=300)
