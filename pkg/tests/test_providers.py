import sys
import textwrap

import numpy as np
import pytest

from reposeg.errors import DimensionMismatch, NoCandidates, ProviderFailure
from reposeg.image_io import PixelPoint, write_mask
from reposeg.providers import (
    CandidateSet,
    FilesProvider,
    ProviderSpec,
    SubprocessProvider,
    SyntheticProvider,
    make_provider,
    request_candidates,
)
from reposeg.synthetic import SceneSpec, generate_scene

IMAGE = np.zeros((12, 10, 3), np.uint8)
POINT = PixelPoint(4, 5)

# scripted stand-in for a real segmenter child; behavior picked by argv[1]
FAKE_CHILD = textwrap.dedent("""
    import json, os, sys, time
    import numpy as np
    from PIL import Image

    mode, out = sys.argv[1], sys.argv[2]
    count = 0
    for line in sys.stdin:
        req = json.loads(line)
        count += 1
        with open(os.path.join(out, "exchanges.log"), "a") as fh:
            fh.write(f"{req['id']}\\n")
        if mode == "silent":
            time.sleep(60)
        if mode == "error":
            print(json.dumps({"id": req["id"], "error": "synthetic failure"}), flush=True)
            continue
        if mode == "die":
            sys.exit(3)
        with Image.open(req["image"]) as img:
            w, h = img.size
        if mode == "wrongdim":
            w, h = w + 1, h
        paths = []
        for i in range(2):
            arr = np.zeros((h, w), np.uint8)
            arr[: i + 1] = 255
            path = os.path.join(out, f"mask_{req['id']}_{i}.png")
            Image.fromarray(arr, mode="L").save(path)
            paths.append(path)
        reply = {"id": req["id"], "masks": paths, "scores": [0.9, 0.8]}
        if mode == "badid":
            reply["id"] = req["id"] + 100
        print(json.dumps(reply), flush=True)
""")


def child_command(tmp_path, mode):
    script = tmp_path / "fake_child.py"
    script.write_text(FAKE_CHILD)
    out = tmp_path / "child_out"
    out.mkdir(exist_ok=True)
    return [sys.executable, str(script), mode, str(out)], out


def test_files_provider_loads_in_index_order(tmp_path):
    for i in range(3):
        mask = np.zeros((12, 10), bool)
        mask[: i + 1] = True
        write_mask(mask, str(tmp_path / f"mask_{i}.png"))
    provider = FilesProvider(str(tmp_path))
    result = request_candidates(provider, IMAGE, POINT)
    assert len(result) == 3
    assert [m.sum() for m in result.masks] == [10, 20, 30]


def test_files_provider_empty_directory(tmp_path):
    with pytest.raises(NoCandidates):
        request_candidates(FilesProvider(str(tmp_path)), IMAGE, POINT)


def test_files_provider_is_deterministic(tmp_path):
    rng = np.random.default_rng(2)
    for i in range(2):
        write_mask(rng.random((12, 10)) < 0.5, str(tmp_path / f"mask_{i}.pgm"))
    provider = FilesProvider(str(tmp_path))
    first = request_candidates(provider, IMAGE, POINT)
    second = request_candidates(provider, IMAGE, POINT)
    assert all((a == b).all() for a, b in zip(first.masks, second.masks))


def test_files_provider_rejects_wrong_dimensions(tmp_path):
    write_mask(np.zeros((3, 3), bool), str(tmp_path / "mask_0.png"))
    with pytest.raises(DimensionMismatch):
        request_candidates(FilesProvider(str(tmp_path)), IMAGE, POINT)


def test_out_of_bounds_point_rejected(tmp_path):
    write_mask(np.zeros((12, 10), bool), str(tmp_path / "mask_0.png"))
    with pytest.raises(ValueError):
        request_candidates(FilesProvider(str(tmp_path)), IMAGE, PixelPoint(10, 5))


def test_synthetic_provider_delegates_to_generator():
    sample = generate_scene(SceneSpec(noise_sigma=0.0))
    provider = SyntheticProvider(sample, mode="faithful")
    result = request_candidates(provider, sample.image, PixelPoint(80, 80))
    assert len(result) == 3
    assert (result.masks[1] == sample.gt_object).all()


def test_subprocess_provider_round_trip(tmp_path):
    cmd, out = child_command(tmp_path, "ok")
    with SubprocessProvider(cmd, timeout=20) as provider:
        result = request_candidates(provider, IMAGE, POINT)
        assert len(result) == 2
        assert result.scores == [0.9, 0.8]
        assert all(m.shape == (12, 10) for m in result.masks)


def test_subprocess_provider_one_exchange_per_call(tmp_path):
    cmd, out = child_command(tmp_path, "ok")
    with SubprocessProvider(cmd, timeout=20) as provider:
        for _ in range(3):
            request_candidates(provider, IMAGE, POINT)
    log = (out / "exchanges.log").read_text().splitlines()
    assert log == ["0", "1", "2"]  # ids echoed once each, in order


def test_subprocess_provider_wrong_dimensions(tmp_path):
    cmd, _ = child_command(tmp_path, "wrongdim")
    with SubprocessProvider(cmd, timeout=20) as provider:
        with pytest.raises(DimensionMismatch):
            request_candidates(provider, IMAGE, POINT)


def test_subprocess_provider_error_reply(tmp_path):
    cmd, _ = child_command(tmp_path, "error")
    with SubprocessProvider(cmd, timeout=20) as provider:
        with pytest.raises(ProviderFailure, match="synthetic failure"):
            request_candidates(provider, IMAGE, POINT)


def test_subprocess_provider_id_mismatch(tmp_path):
    cmd, _ = child_command(tmp_path, "badid")
    with SubprocessProvider(cmd, timeout=20) as provider:
        with pytest.raises(ProviderFailure, match="id mismatch"):
            request_candidates(provider, IMAGE, POINT)


def test_subprocess_provider_child_death(tmp_path):
    cmd, _ = child_command(tmp_path, "die")
    with SubprocessProvider(cmd, timeout=20) as provider:
        with pytest.raises(ProviderFailure):
            request_candidates(provider, IMAGE, POINT)


def test_subprocess_provider_timeout(tmp_path):
    cmd, _ = child_command(tmp_path, "silent")
    with SubprocessProvider(cmd, timeout=0.5) as provider:
        with pytest.raises(ProviderFailure, match="timed out"):
            request_candidates(provider, IMAGE, POINT)


def test_provider_spec_validation():
    with pytest.raises(ValueError):
        ProviderSpec(kind="files")
    with pytest.raises(ValueError):
        ProviderSpec(kind="quantum", parameters={})
    spec = ProviderSpec(kind="files", parameters={"directory": "/tmp"})
    assert isinstance(make_provider(spec), FilesProvider)


def test_candidate_set_scores_are_carried_not_used():
    masks = [np.zeros((4, 4), bool), np.ones((4, 4), bool)]
    masks[0][0, 0] = True
    cands = CandidateSet(masks=masks, scores=[0.1, 0.99])
    from reposeg.selection import SelectorConfig, select_mask

    result = select_mask(cands, SelectorConfig(r_max=0.5))
    assert result.selected_index == 0  # high score on an invalid mask is ignored
