"""Segmentation metrics, the Otsu baseline, and dataset-level reporting.

IoU, DSC, and pixel accuracy follow the usual confusion-matrix definitions;
both overlap metrics are defined as 1.0 when prediction and ground truth are
both empty. The Otsu threshold search runs in exact integer arithmetic so
the returned maximizer is never at the mercy of float rounding.
"""

from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import DegenerateImage, DimensionMismatch, ZeroBaseline
from .image_io import check_same_shape, read_mask, require_gray, require_mask


def _counts(pred: np.ndarray, gt: np.ndarray) -> tuple[int, int, int]:
    require_mask(pred)
    require_mask(gt)
    check_same_shape(pred, gt, "prediction and ground truth")
    inter = int(np.count_nonzero(pred & gt))
    return inter, int(np.count_nonzero(pred)), int(np.count_nonzero(gt))


def iou(pred: np.ndarray, gt: np.ndarray) -> float:
    """Intersection over union; 1.0 when both masks are empty."""
    inter, p, g = _counts(pred, gt)
    union = p + g - inter
    return 1.0 if union == 0 else inter / union


def dsc(pred: np.ndarray, gt: np.ndarray) -> float:
    """Dice similarity coefficient 2|P∩G| / (|P|+|G|); 1.0 when both empty."""
    inter, p, g = _counts(pred, gt)
    return 1.0 if p + g == 0 else 2.0 * inter / (p + g)


def pixel_accuracy(pred: np.ndarray, gt: np.ndarray) -> float:
    """Fraction of pixels classified correctly, foreground and background."""
    require_mask(pred)
    require_mask(gt)
    check_same_shape(pred, gt, "prediction and ground truth")
    return int(np.count_nonzero(pred == gt)) / pred.size


def otsu(gray: np.ndarray, invert: bool = False) -> tuple[int, np.ndarray]:
    """Global threshold maximizing between-class variance, plus the mask.

    Classes at threshold t are {Y <= t} and {Y > t}; the smallest maximizing
    t wins ties. The argmax is computed over exact integers: for cumulative
    count n0, intensity sum s0 (and complements n1, s1), between-class
    variance is proportional to (n1*s0 - n0*s1)^2 / (n0*n1), compared by
    cross-multiplication. Foreground is the brighter class unless invert.

    Raises DegenerateImage when all pixels share one intensity.
    """
    require_gray(gray)
    hist = np.bincount(gray.ravel(), minlength=256)
    if np.count_nonzero(hist) < 2:
        raise DegenerateImage("image has a single intensity; no two classes exist")
    counts = [int(c) for c in hist]
    total = gray.size
    total_sum = sum(t * c for t, c in enumerate(counts))

    n0 = 0
    s0 = 0
    best_t = 0
    best_num = -1  # any real split beats the sentinel
    best_den = 1
    for t in range(256):
        n0 += counts[t]
        s0 += t * counts[t]
        n1 = total - n0
        if n0 == 0 or n1 == 0:
            continue
        s1 = total_sum - s0
        num = (n1 * s0 - n0 * s1) ** 2
        den = n0 * n1
        if num * best_den > best_num * den:
            best_t, best_num, best_den = t, num, den
    mask = gray <= best_t if invert else gray > best_t
    return best_t, mask


def relative_improvement(new: float, baseline: float) -> float:
    """Percent change of new over baseline: 100 * (new - baseline) / baseline."""
    if baseline <= 0:
        raise ZeroBaseline(f"baseline must be positive, got {baseline}")
    return 100.0 * (new - baseline) / baseline


@dataclass
class ImageScores:
    name: str
    iou: float
    dsc: float
    pixel_accuracy: float


@dataclass
class MetricsReport:
    """Dataset means plus the per-image breakdown behind them."""

    iou: float
    dsc: float
    pixel_accuracy: float
    per_image: list[ImageScores] = field(default_factory=list)

    def to_json(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(asdict(self), fh, indent=2)
        return None

    def to_csv(self, path: str) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["name", "iou", "dsc", "pixel_accuracy"])
            for entry in self.per_image:
                writer.writerow([entry.name, f"{entry.iou:.6f}", f"{entry.dsc:.6f}",
                                 f"{entry.pixel_accuracy:.6f}"])
            writer.writerow(["mean", f"{self.iou:.6f}", f"{self.dsc:.6f}",
                             f"{self.pixel_accuracy:.6f}"])
        return None

    @staticmethod
    def from_json(path: str) -> "MetricsReport":
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
        per_image = [ImageScores(**e) for e in raw.get("per_image", [])]
        return MetricsReport(iou=raw["iou"], dsc=raw["dsc"],
                             pixel_accuracy=raw["pixel_accuracy"], per_image=per_image)


def score_pair(pred: np.ndarray, gt: np.ndarray, name: str = "") -> ImageScores:
    return ImageScores(name=name, iou=iou(pred, gt), dsc=dsc(pred, gt),
                       pixel_accuracy=pixel_accuracy(pred, gt))


def evaluate_dataset(pairs: list[tuple[str, str]]) -> MetricsReport:
    """Score (prediction path, ground truth path) pairs and average per image.

    I/O and size errors are re-raised with the offending pair named.
    """
    entries: list[ImageScores] = []
    for pred_path, gt_path in pairs:
        try:
            pred = read_mask(str(pred_path))
            gt = read_mask(str(gt_path))
            entries.append(score_pair(pred, gt, name=str(pred_path)))
        except DimensionMismatch as exc:
            raise DimensionMismatch(f"pair ({pred_path}, {gt_path}): {exc}") from exc
    if not entries:
        raise ValueError("no pairs to evaluate")
    return MetricsReport(
        iou=float(np.mean([e.iou for e in entries])),
        dsc=float(np.mean([e.dsc for e in entries])),
        pixel_accuracy=float(np.mean([e.pixel_accuracy for e in entries])),
        per_image=entries,
    )


def comparison_table(columns: list[tuple[str, MetricsReport]],
                     relative_to: str | None = None) -> str:
    """Plain-text table of metric rows (in percent) by method columns.

    With relative_to set, appends percent-improvement rows of every other
    method over that baseline column.
    """
    metric_rows = [("IoU", "iou"), ("DSC", "dsc"), ("Pixel Acc.", "pixel_accuracy")]
    names = [name for name, _ in columns]
    widths = [max(10, len(n) + 2) for n in names]
    head = "Metric".ljust(12) + "".join(n.rjust(w) for n, w in zip(names, widths))
    lines = [head, "-" * len(head)]
    for label, attr in metric_rows:
        cells = "".join(f"{getattr(rep, attr) * 100:.2f}".rjust(w)
                        for (_, rep), w in zip(columns, widths))
        lines.append(label.ljust(12) + cells)
    if relative_to is not None:
        if relative_to not in names:
            raise ValueError(f"unknown baseline column {relative_to!r}")
        base = dict(columns)[relative_to]
        lines.append("")
        lines.append(f"Relative improvement over {relative_to} [%]")
        for label, attr in metric_rows:
            cells = []
            for (name, rep), w in zip(columns, widths):
                if name == relative_to:
                    cells.append("-".rjust(w))
                else:
                    gain = relative_improvement(getattr(rep, attr) * 100,
                                                getattr(base, attr) * 100)
                    cells.append(f"{gain:+.1f}".rjust(w))
            lines.append(label.ljust(12) + "".join(cells))
    return "\n".join(lines)
