import numpy as np
import pytest
from PIL import Image as PILImage

from reposeg.errors import DecodeError, UnsupportedFormat
from reposeg.image_io import read_image, read_mask, to_luma, write_mask

from helpers import random_mask


def _rgb(r, g, b):
    return np.array([[[r, g, b]]], dtype=np.uint8)


@pytest.mark.parametrize("triple,expected", [
    ((255, 255, 255), 255),
    ((100, 100, 100), 100),
    ((255, 0, 0), 76),    # round(0.299 * 255) = round(76.245)
    ((0, 255, 0), 150),   # round(0.587 * 255) = round(149.685)
    ((0, 0, 255), 29),    # round(0.114 * 255) = round(29.07)
])
def test_luma_values(triple, expected):
    assert to_luma(_rgb(*triple))[0, 0] == expected


def test_luma_gray_fixed_point():
    v = np.arange(256, dtype=np.uint8)
    image = np.stack([v, v, v], axis=-1)[None, :, :]
    assert (to_luma(image) == v).all()


def test_luma_monotone_per_channel():
    rng = np.random.default_rng(11)
    for _ in range(200):
        r, g, b = (int(x) for x in rng.integers(0, 255, 3))
        base = int(to_luma(_rgb(r, g, b))[0, 0])
        assert int(to_luma(_rgb(min(r + 1, 255), g, b))[0, 0]) >= base
        assert int(to_luma(_rgb(r, min(g + 1, 255), b))[0, 0]) >= base
        assert int(to_luma(_rgb(r, g, min(b + 1, 255)))[0, 0]) >= base


@pytest.mark.parametrize("ext", [".png", ".pgm"])
def test_mask_round_trip(tmp_path, ext):
    rng = np.random.default_rng(23)
    for i in range(20):
        mask = random_mask(rng, int(rng.integers(1, 40)), int(rng.integers(1, 40)))
        path = str(tmp_path / f"m{i}{ext}")
        write_mask(mask, path)
        assert (read_mask(path) == mask).all()


@pytest.mark.parametrize("ext", [".png", ".pgm"])
def test_mask_written_values_are_pure(tmp_path, ext):
    mask = np.array([[True, False]], dtype=bool)
    path = str(tmp_path / f"m{ext}")
    write_mask(mask, path)
    raw = np.asarray(PILImage.open(path))
    assert raw[0, 0] == 255 and raw[0, 1] == 0


def test_empty_and_full_masks(tmp_path):
    for value, mask in [(0, np.zeros((5, 7), bool)), (255, np.ones((5, 7), bool))]:
        path = str(tmp_path / f"v{value}.png")
        write_mask(mask, path)
        raw = np.asarray(PILImage.open(path))
        assert (raw == value).all()


def test_read_mask_threshold_at_128(tmp_path):
    gray = np.array([[0, 127, 128, 255]], dtype=np.uint8)
    path = str(tmp_path / "t.png")
    PILImage.fromarray(gray, mode="L").save(path)
    assert read_mask(path).tolist() == [[False, False, True, True]]


def test_read_image_gray_becomes_rgb(tmp_path):
    gray = np.array([[7, 200]], dtype=np.uint8)
    path = str(tmp_path / "g.png")
    PILImage.fromarray(gray, mode="L").save(path)
    image = read_image(path)
    assert image.shape == (1, 2, 3)
    assert (image[0, 0] == 7).all() and (image[0, 1] == 200).all()


def test_missing_file_raises_file_not_found():
    with pytest.raises(FileNotFoundError):
        read_mask("/nonexistent/mask.png")


def test_garbage_file_raises_decode_error(tmp_path):
    path = tmp_path / "junk.png"
    path.write_bytes(b"this is not a png at all")
    with pytest.raises(DecodeError):
        read_mask(str(path))


def test_color_file_rejected_as_mask(tmp_path):
    rgb = np.zeros((3, 3, 3), dtype=np.uint8)
    path = str(tmp_path / "c.png")
    PILImage.fromarray(rgb, mode="RGB").save(path)
    with pytest.raises(UnsupportedFormat):
        read_mask(path)


def test_unsupported_write_extension(tmp_path):
    with pytest.raises(UnsupportedFormat):
        write_mask(np.zeros((2, 2), bool), str(tmp_path / "m.tiff"))
