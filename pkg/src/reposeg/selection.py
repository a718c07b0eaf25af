"""Candidate mask selection by white-pixel ratio with an upper-bound gate.

The candidate whose foreground covers the largest share of the image wins,
except that candidates above the r_max share are treated as
background-inclusive oversegmentations and excluded first.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NoValidMask
from .image_io import require_mask

STRICT = "strict"
SMALLEST_RATIO = "smallest_ratio"


@dataclass(frozen=True)
class SelectorConfig:
    """r_max gates candidates; fallback_policy decides the empty-gate case.

    "strict" raises NoValidMask when every candidate exceeds r_max;
    "smallest_ratio" falls back to the least-covering candidate instead.
    """

    r_max: float = 0.5
    fallback_policy: str = STRICT

    def __post_init__(self):
        if not 0.0 < self.r_max <= 1.0:
            raise ValueError("r_max must be in (0, 1]")
        if self.fallback_policy not in (STRICT, SMALLEST_RATIO):
            raise ValueError(f"unknown fallback policy {self.fallback_policy!r}")


@dataclass
class SelectionResult:
    selected_index: int
    ratios: list[float] = field(default_factory=list)
    valid: list[bool] = field(default_factory=list)
    used_fallback: bool = False


def white_ratio(mask: np.ndarray) -> float:
    """Foreground fraction of the full image area."""
    require_mask(mask)
    return np.count_nonzero(mask) / mask.size


def select_mask(candidates, config: SelectorConfig = SelectorConfig()) -> SelectionResult:
    """Pick the best candidate: highest ratio among those with ratio <= r_max.

    Ties go to the lowest index. With an empty valid set the strict policy
    raises NoValidMask; the smallest_ratio policy returns the argmin ratio
    and flags used_fallback.
    """
    masks = candidates.masks
    if not masks:
        raise ValueError("candidate set is empty")
    ratios = [white_ratio(m) for m in masks]
    valid = [r <= config.r_max for r in ratios]

    best = None
    for i, r in enumerate(ratios):
        if valid[i] and (best is None or r > ratios[best]):
            best = i
    if best is not None:
        return SelectionResult(selected_index=best, ratios=ratios, valid=valid)

    if config.fallback_policy == STRICT:
        raise NoValidMask(
            f"all candidate ratios {['%.3f' % r for r in ratios]} exceed r_max={config.r_max}")
    best = 0
    for i, r in enumerate(ratios):
        if r < ratios[best]:
            best = i
    return SelectionResult(selected_index=best, ratios=ratios, valid=valid, used_fallback=True)
