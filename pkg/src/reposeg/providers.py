"""Bridge to point-promptable multi-mask segmenters.

A provider turns (image, prompt point) into 1-3 candidate masks. Three
implementations exist: precomputed mask files on disk, a child process
speaking a line-delimited JSON protocol (how a real segmentation model is
attached), and the synthetic generator used for benchmarks.

Wire protocol, one UTF-8 JSON object per line on the child's stdin/stdout:

    request:  {"id": 1, "image": "/path/img.png", "point": {"x": 3, "y": 4},
               "max_masks": 3}
    response: {"id": 1, "masks": ["/path/m0.png", ...], "scores": [0.9, ...]}
    error:    {"id": 1, "error": "message"}

Mask files referenced by a response are 0/255 single-channel PNGs at the
image's resolution.
"""

from __future__ import annotations

import json
import os
import select
import shlex
import subprocess
import tempfile
import time
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, NoCandidates, ProviderFailure
from .image_io import PixelPoint, read_mask, require_image, write_image

MAX_CANDIDATES = 3

FILES = "files"
SUBPROCESS = "subprocess"
SYNTHETIC = "synthetic"


@dataclass
class CandidateSet:
    """Ordered candidate masks plus optional provider quality scores.

    Scores are informational only; selection never reads them.
    """

    masks: list[np.ndarray]
    scores: list[float] | None = None

    def __len__(self) -> int:
        return len(self.masks)


@dataclass(frozen=True)
class ProviderSpec:
    """Declarative provider choice, as it appears in configuration files."""

    kind: str
    parameters: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in (FILES, SUBPROCESS, SYNTHETIC):
            raise ValueError(f"unknown provider kind {self.kind!r}")
        if self.kind == FILES and "directory" not in self.parameters:
            raise ValueError("files provider needs a 'directory' parameter")
        if self.kind == SUBPROCESS and "command" not in self.parameters:
            raise ValueError("subprocess provider needs a 'command' parameter")


def _validate_candidates(masks: list[np.ndarray], scores, image: np.ndarray) -> CandidateSet:
    if not masks:
        raise NoCandidates("provider returned zero masks")
    if len(masks) > MAX_CANDIDATES:
        raise ProviderFailure(f"provider returned {len(masks)} masks, protocol allows 1-3")
    for i, mask in enumerate(masks):
        if mask.shape != image.shape[:2]:
            raise DimensionMismatch(
                f"candidate {i} is {mask.shape[1]}x{mask.shape[0]}, "
                f"image is {image.shape[1]}x{image.shape[0]}")
    if scores is not None and len(scores) != len(masks):
        raise ProviderFailure("scores length does not match mask count")
    return CandidateSet(masks=masks, scores=scores)


class FilesProvider:
    """Loads mask_0 / mask_1 / mask_2 (.png or .pgm) from a directory.

    When the directory has a subdirectory named after the image (passed via
    name=), that subdirectory is used, which is how batch runs lay out
    per-image candidates.
    """

    def __init__(self, directory: str):
        self.directory = directory

    def request(self, image: np.ndarray, point: PixelPoint, name: str | None = None) -> CandidateSet:
        base = self.directory
        if name and os.path.isdir(os.path.join(base, name)):
            base = os.path.join(base, name)
        masks = []
        for i in range(MAX_CANDIDATES):
            for ext in (".png", ".pgm"):
                path = os.path.join(base, f"mask_{i}{ext}")
                if os.path.exists(path):
                    masks.append(read_mask(path))
                    break
        if not masks:
            raise NoCandidates(f"no mask_0..mask_2 files under {base}")
        return _validate_candidates(masks, None, image)

    def close(self) -> None:
        pass


class SyntheticProvider:
    """Serves candidates generated from a synthetic scene's ground truth."""

    def __init__(self, sample, mode: str = "faithful", seed: int = 0):
        self.sample = sample
        self.mode = mode
        self.seed = seed

    def request(self, image: np.ndarray, point: PixelPoint, name: str | None = None) -> CandidateSet:
        from .synthetic import generate_candidates  # local import, avoids a cycle

        candidates = generate_candidates(self.sample, mode=self.mode, seed=self.seed)
        return _validate_candidates(candidates.masks, candidates.scores, image)

    def close(self) -> None:
        pass


class SubprocessProvider:
    """Owns one child process and performs one request/response per call.

    The child is started lazily on the first request and must answer each
    request line with exactly one response line. Timeouts, nonzero exits,
    and malformed replies all surface as ProviderFailure.
    """

    def __init__(self, command: str | list[str], timeout: float = 120.0):
        self.command = shlex.split(command) if isinstance(command, str) else list(command)
        self.timeout = timeout
        self._proc: subprocess.Popen | None = None
        self._buffer = b""
        self._next_id = 0
        self._tmpdir: tempfile.TemporaryDirectory | None = None

    def _ensure_started(self) -> subprocess.Popen:
        if self._proc is None:
            try:
                self._proc = subprocess.Popen(
                    self.command, stdin=subprocess.PIPE, stdout=subprocess.PIPE, bufsize=0)
            except OSError as exc:
                raise ProviderFailure(f"cannot start provider {self.command}: {exc}") from exc
            self._tmpdir = tempfile.TemporaryDirectory(prefix="reposeg-provider-")
        return self._proc

    def _read_line(self, deadline: float) -> bytes:
        proc = self._proc
        assert proc is not None and proc.stdout is not None
        fd = proc.stdout.fileno()
        while b"\n" not in self._buffer:
            remaining = deadline - time.monotonic()
            if remaining <= 0:
                raise ProviderFailure(f"provider timed out after {self.timeout}s")
            ready, _, _ = select.select([fd], [], [], remaining)
            if not ready:
                continue
            chunk = os.read(fd, 65536)
            if chunk == b"":
                code = proc.poll()
                raise ProviderFailure(f"provider closed its output (exit status {code})")
            self._buffer += chunk
        line, self._buffer = self._buffer.split(b"\n", 1)
        return line

    def request(self, image: np.ndarray, point: PixelPoint, name: str | None = None) -> CandidateSet:
        require_image(image)
        proc = self._ensure_started()
        assert self._tmpdir is not None
        request_id = self._next_id
        self._next_id += 1

        image_path = os.path.join(self._tmpdir.name, f"request_{request_id}.png")
        write_image(image, image_path)
        payload = {"id": request_id, "image": image_path,
                   "point": {"x": int(point.x), "y": int(point.y)},
                   "max_masks": MAX_CANDIDATES}
        try:
            assert proc.stdin is not None
            proc.stdin.write((json.dumps(payload) + "\n").encode("utf-8"))
            proc.stdin.flush()
        except (BrokenPipeError, OSError) as exc:
            raise ProviderFailure(f"provider stdin closed: {exc}") from exc

        line = self._read_line(time.monotonic() + self.timeout)
        try:
            reply = json.loads(line.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise ProviderFailure(f"provider sent a non-JSON line: {line[:200]!r}") from exc
        if not isinstance(reply, dict) or reply.get("id") != request_id:
            raise ProviderFailure(f"provider reply id mismatch: {reply!r}")
        if "error" in reply:
            raise ProviderFailure(f"provider error: {reply['error']}")
        paths = reply.get("masks")
        if not isinstance(paths, list) or not paths:
            raise NoCandidates("provider reply carries no masks")
        if len(paths) > MAX_CANDIDATES:
            raise ProviderFailure(f"provider sent {len(paths)} masks, protocol allows 1-3")
        try:
            masks = [read_mask(p) for p in paths]
        except Exception as exc:  # unreadable mask file => protocol fault
            raise ProviderFailure(f"cannot read provider mask: {exc}") from exc
        scores = reply.get("scores")
        return _validate_candidates(masks, scores, image)

    def close(self) -> None:
        if self._proc is not None:
            try:
                if self._proc.stdin:
                    self._proc.stdin.close()
                self._proc.wait(timeout=5)
            except (OSError, subprocess.TimeoutExpired):
                self._proc.kill()
                self._proc.wait()
            self._proc = None
        if self._tmpdir is not None:
            self._tmpdir.cleanup()
            self._tmpdir = None

    def __enter__(self):
        return self

    def __exit__(self, *exc_info):
        self.close()


def make_provider(spec: ProviderSpec, scene_dir: str | None = None):
    """Instantiate a provider from its declarative spec.

    The synthetic kind needs the scene directory holding the ground-truth
    rasters (written by the dataset generator) to rebuild its sample.
    """
    if spec.kind == FILES:
        return FilesProvider(spec.parameters["directory"])
    if spec.kind == SUBPROCESS:
        return SubprocessProvider(spec.parameters["command"],
                                  timeout=float(spec.parameters.get("timeout", 120.0)))
    from .synthetic import load_scene  # local import, avoids a cycle

    if scene_dir is None:
        raise ValueError("synthetic provider needs the scene directory")
    sample, scene_spec = load_scene(scene_dir)
    seed = spec.parameters.get("seed")
    if seed is None:
        seed = scene_spec.seed if scene_spec is not None else 0
    return SyntheticProvider(sample, mode=spec.parameters.get("mode", "faithful"),
                             seed=int(seed))


def request_candidates(provider, image: np.ndarray, point: PixelPoint,
                       name: str | None = None) -> CandidateSet:
    """Ask a provider for candidates after checking the prompt is in bounds."""
    require_image(image)
    h, w = image.shape[:2]
    if not (0 <= point.x < w and 0 <= point.y < h):
        raise ValueError(f"prompt point {point} outside {w}x{h} image")
    return provider.request(image, point, name=name)
