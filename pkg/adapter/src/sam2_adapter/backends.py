"""Model backends producing candidate masks for a point prompt.

A backend returns up to ``max_masks`` (mask, score) pairs in the model's
native candidate order; masks are bool arrays at the image's resolution.
The stub backend keeps the protocol testable without model weights.
"""

from __future__ import annotations

import os

import numpy as np

STUB_CHECKPOINT = "stub"


class StubBackend:
    """Deterministic stand-in: nested axis-aligned boxes around the prompt.

    Box half-sizes are fixed fractions of the image's short side, so the
    three candidates mimic the usual part / object / region nesting of a
    real multimask model.
    """

    scales = (0.06, 0.18, 0.38)
    scores = (0.97, 0.90, 0.78)

    def predict(self, image: np.ndarray, point: tuple[int, int],
                max_masks: int) -> list[tuple[np.ndarray, float]]:
        h, w = image.shape[:2]
        x, y = point
        short = min(h, w)
        results = []
        for scale, score in zip(self.scales[:max_masks], self.scores[:max_masks]):
            half = max(1, int(round(scale * short)))
            mask = np.zeros((h, w), dtype=bool)
            mask[max(0, y - half):min(h, y + half + 1),
                 max(0, x - half):min(w, x + half + 1)] = True
            results.append((mask, score))
        return results


class Sam2Backend:
    """Real SAM2 inference; torch and the sam2 package load lazily."""

    def __init__(self, checkpoint: str, device: str = "cpu",
                 model_config: str = "configs/sam2.1/sam2.1_hiera_l.yaml"):
        if not os.path.exists(checkpoint):
            raise FileNotFoundError(f"checkpoint not found: {checkpoint}")
        from sam2.build_sam import build_sam2
        from sam2.sam2_image_predictor import SAM2ImagePredictor

        self._predictor = SAM2ImagePredictor(build_sam2(model_config, checkpoint,
                                                        device=device))

    def predict(self, image: np.ndarray, point: tuple[int, int],
                max_masks: int) -> list[tuple[np.ndarray, float]]:
        self._predictor.set_image(image)
        coords = np.array([[point[0], point[1]]], dtype=np.float32)
        labels = np.array([1], dtype=np.int32)
        masks, scores, _ = self._predictor.predict(
            point_coords=coords, point_labels=labels,
            multimask_output=max_masks > 1)
        results = []
        for mask, score in list(zip(masks, scores))[:max_masks]:
            results.append((np.asarray(mask) > 0, float(score)))
        return results


def build_backend(checkpoint: str, device: str = "cpu",
                  model_config: str | None = None):
    """checkpoint == "stub" selects the deterministic stub backend."""
    if checkpoint == STUB_CHECKPOINT:
        return StubBackend()
    kwargs = {} if model_config is None else {"model_config": model_config}
    return Sam2Backend(checkpoint, device=device, **kwargs)
