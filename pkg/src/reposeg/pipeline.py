"""End-to-end run: detect highlight, prompt, select a candidate, clean it up."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

import numpy as np

from .components import postprocess
from .errors import RePoSegError
from .image_io import PixelPoint, to_luma, write_mask
from .providers import ProviderSpec, make_provider, request_candidates
from .selection import SelectorConfig, select_mask
from .specular import DetectorConfig, detect_specular, prompt_point


@dataclass
class PipelineConfig:
    detector: DetectorConfig = field(default_factory=DetectorConfig)
    selector: SelectorConfig = field(default_factory=SelectorConfig)
    provider: ProviderSpec | None = None
    output_dir: str | None = None
    emit_intermediates: bool = False


@dataclass
class PipelineOutput:
    specular_region: np.ndarray
    prompt: PixelPoint
    candidates: object
    selection: object
    final_mask: np.ndarray


class _Stage:
    """Tags any pipeline error with the stage it escaped from."""

    def __init__(self, name: str):
        self.name = name

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        if isinstance(exc, RePoSegError) and exc.stage is None:
            exc.stage = self.name
        return False


def run_pipeline(image: np.ndarray, config: PipelineConfig, provider=None,
                 name: str = "image", scene_dir: str | None = None) -> PipelineOutput:
    """Run the full mask-selection pipeline on one image.

    A live provider handle may be passed (batch runs reuse one per worker);
    otherwise one is built from config.provider and closed before return.
    Writes the final mask, and intermediates when asked, into
    config.output_dir. Errors carry the stage name they escaped from.
    """
    own_provider = provider is None
    if own_provider and config.provider is None:
        raise ValueError("pipeline config names no provider")
    try:
        with _Stage("specular-detection"):
            gray = to_luma(image)
            region = detect_specular(gray, config.detector)
        with _Stage("prompt"):
            point = prompt_point(region)
        with _Stage("candidates"):
            if own_provider:
                # built only once detection succeeded; a failed detection
                # should never cost a provider spawn
                provider = make_provider(config.provider, scene_dir=scene_dir)
            candidates = request_candidates(provider, image, point, name=name)
        with _Stage("selection"):
            selection = select_mask(candidates, config.selector)
        with _Stage("postprocess"):
            final = postprocess(candidates.masks[selection.selected_index])
    finally:
        if own_provider and provider is not None:
            provider.close()

    # stored-output invariant: the final mask is exactly the post-processed
    # selected candidate, recomputed as a guard against accidental mutation
    if not np.array_equal(final, postprocess(candidates.masks[selection.selected_index])):
        raise RuntimeError("pipeline invariant violated: final mask drifted from its source")

    if config.output_dir is not None:
        _write_outputs(config, name, region, point, candidates, selection, final)
    return PipelineOutput(specular_region=region, prompt=point, candidates=candidates,
                          selection=selection, final_mask=final)


def _write_outputs(config, name, region, point, candidates, selection, final) -> None:
    out = config.output_dir
    os.makedirs(out, exist_ok=True)
    write_mask(final, os.path.join(out, f"{name}.mask.png"))
    if not config.emit_intermediates:
        return
    write_mask(region, os.path.join(out, f"{name}.specular.png"))
    for i, mask in enumerate(candidates.masks):
        write_mask(mask, os.path.join(out, f"{name}.candidate_{i}.png"))
    record = {
        "prompt": {"x": point.x, "y": point.y},
        "ratios": selection.ratios,
        "valid": selection.valid,
        "selected_index": selection.selected_index,
        "used_fallback": selection.used_fallback,
    }
    with open(os.path.join(out, f"{name}.selection.json"), "w", encoding="utf-8") as fh:
        json.dump(record, fh, indent=2)
