"""Line-delimited JSON request loop.

One UTF-8 JSON object per line on stdin, one reply per request on stdout:

    request:  {"id": 1, "image": "/path/img.png", "point": {"x": 3, "y": 4},
               "max_masks": 3}
    response: {"id": 1, "masks": ["/out/mask_1_0.png", ...], "scores": [...]}
    error:    {"id": 1, "error": "message"}

Requests are handled strictly serially and replies keep request order.
A malformed line that yields no id is answered with id -1. The loop only
ends when stdin closes; request-level failures never kill the process.
"""

from __future__ import annotations

import json
import os
import sys

import numpy as np
from PIL import Image, UnidentifiedImageError

MAX_MASKS = 3


def _load_rgb(path: str) -> np.ndarray:
    with Image.open(path) as img:
        img.load()
        if img.mode == "L":
            arr = np.asarray(img, dtype=np.uint8)
            return np.repeat(arr[:, :, None], 3, axis=2)
        return np.asarray(img.convert("RGB"), dtype=np.uint8)


def _write_mask(mask: np.ndarray, path: str) -> None:
    raster = np.where(mask, np.uint8(255), np.uint8(0))
    Image.fromarray(raster, mode="L").save(path)


def handle_request(line: str, backend, out_dir: str) -> dict:
    """Turn one request line into one reply object (response or error)."""
    request_id = -1
    try:
        request = json.loads(line)
        if not isinstance(request, dict):
            raise ValueError("request must be a JSON object")
        if isinstance(request.get("id"), int):
            request_id = request["id"]
        else:
            raise ValueError("missing integer 'id'")

        image_path = request.get("image")
        if not isinstance(image_path, str):
            raise ValueError("missing 'image' path")
        point = request.get("point")
        if not (isinstance(point, dict)
                and isinstance(point.get("x"), int) and isinstance(point.get("y"), int)):
            raise ValueError("missing 'point' with integer x and y")
        max_masks = request.get("max_masks", MAX_MASKS)
        if not isinstance(max_masks, int) or not 1 <= max_masks <= MAX_MASKS:
            raise ValueError(f"'max_masks' must be 1..{MAX_MASKS}")

        try:
            image = _load_rgb(image_path)
        except FileNotFoundError:
            raise ValueError(f"image not found: {image_path}") from None
        except (UnidentifiedImageError, OSError) as exc:
            raise ValueError(f"cannot decode image {image_path}: {exc}") from None

        h, w = image.shape[:2]
        x, y = point["x"], point["y"]
        if not (0 <= x < w and 0 <= y < h):
            raise ValueError(f"point ({x},{y}) outside {w}x{h} image")

        results = backend.predict(image, (x, y), max_masks)
        if not 1 <= len(results) <= max_masks:
            raise ValueError(f"backend produced {len(results)} masks")
        paths, scores = [], []
        for k, (mask, score) in enumerate(results):
            if mask.shape != (h, w):
                raise ValueError("backend mask resolution differs from the image")
            path = os.path.join(out_dir, f"mask_{request_id}_{k}.png")
            _write_mask(mask, path)
            paths.append(path)
            scores.append(float(score))
        return {"id": request_id, "masks": paths, "scores": scores}
    except (json.JSONDecodeError, ValueError) as exc:
        return {"id": request_id, "error": str(exc)}
    except Exception as exc:  # inference failure: report, keep serving
        return {"id": request_id, "error": f"{type(exc).__name__}: {exc}"}


def serve(backend, out_dir: str, stdin=None, stdout=None) -> None:
    """Answer requests until the input stream closes."""
    stdin = stdin if stdin is not None else sys.stdin
    stdout = stdout if stdout is not None else sys.stdout
    os.makedirs(out_dir, exist_ok=True)
    for line in stdin:
        if not line.strip():
            continue
        reply = handle_request(line, backend, out_dir)
        stdout.write(json.dumps(reply) + "\n")
        stdout.flush()
