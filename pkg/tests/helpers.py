"""Shared test utilities: grid literals and independent oracle implementations.

The oracles here deliberately avoid the library's run-based labeling: the
flood fill walks pixel by pixel with an explicit stack, so agreement between
the two is a real cross-check, not a tautology.
"""

from __future__ import annotations

import numpy as np


def grid(*rows: str) -> np.ndarray:
    """Build a bool mask from rows of 0/1 characters (spaces ignored)."""
    cleaned = [r.replace(" ", "") for r in rows]
    return np.array([[c == "1" for c in row] for row in cleaned], dtype=bool)


def random_mask(rng: np.random.Generator, height: int, width: int,
                density: float = 0.5) -> np.ndarray:
    return rng.random((height, width)) < density


def flood_fill_labels(mask: np.ndarray, connectivity: int) -> tuple[np.ndarray, list[int]]:
    """Label components by stack-based flood fill, row-major first encounter.

    Returns (labels, sizes) with labels 1..K and sizes[k-1] = |component k|.
    """
    h, w = mask.shape
    if connectivity == 4:
        steps = [(-1, 0), (1, 0), (0, -1), (0, 1)]
    else:
        steps = [(dy, dx) for dy in (-1, 0, 1) for dx in (-1, 0, 1) if (dy, dx) != (0, 0)]
    labels = np.zeros((h, w), dtype=np.int32)
    sizes: list[int] = []
    for y in range(h):
        for x in range(w):
            if not mask[y, x] or labels[y, x]:
                continue
            label = len(sizes) + 1
            stack = [(y, x)]
            labels[y, x] = label
            count = 0
            while stack:
                cy, cx = stack.pop()
                count += 1
                for dy, dx in steps:
                    ny, nx = cy + dy, cx + dx
                    if 0 <= ny < h and 0 <= nx < w and mask[ny, nx] and not labels[ny, nx]:
                        labels[ny, nx] = label
                        stack.append((ny, nx))
            sizes.append(count)
    return labels, sizes


def oracle_largest(mask: np.ndarray, connectivity: int) -> np.ndarray:
    labels, sizes = flood_fill_labels(mask, connectivity)
    best = 1 + int(np.argmax(sizes))
    return labels == best


def oracle_fill_holes(mask: np.ndarray) -> np.ndarray:
    inverted = ~mask
    if not inverted.any():
        return mask.copy()
    return ~oracle_largest(inverted, 4)


def oracle_postprocess(mask: np.ndarray) -> np.ndarray:
    return oracle_fill_holes(oracle_largest(mask, 8))
