"""Show what the cleanup chain does to a deliberately dirty mask.

Run:  python demos/postprocess_cleanup.py
"""

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from reposeg import connected_components, fill_holes, largest_component, postprocess

OUT = os.path.join(os.path.dirname(__file__), "out")
os.makedirs(OUT, exist_ok=True)

rng = np.random.default_rng(3)

# a solid object...
mask = np.zeros((96, 128), bool)
ys, xs = np.mgrid[0:96, 0:128]
mask[((xs - 64) / 38.0) ** 2 + ((ys - 48) / 28.0) ** 2 <= 1.0] = True

# ... with holes punched in and speckles strewn around
for _ in range(4):
    hy, hx = rng.integers(30, 66), rng.integers(40, 88)
    mask[hy:hy + 3, hx:hx + 3] = False
for _ in range(12):
    sy, sx = rng.integers(0, 94), rng.integers(0, 126)
    if not mask[max(0, sy - 3):sy + 4, max(0, sx - 3):sx + 4].any():
        mask[sy:sy + 2, sx:sx + 2] = True

labeling = connected_components(mask, connectivity=8)
print(f"dirty mask: {labeling.count} foreground components, "
      f"sizes {sorted(labeling.component_sizes[1:].tolist(), reverse=True)[:5]}...")

body = largest_component(labeling)
inverted_before = connected_components(~body, connectivity=4)
print(f"largest component kept: {int(body.sum())} px; "
      f"its inversion has {inverted_before.count} components "
      f"(1 true background + {inverted_before.count - 1} holes)")

cleaned = fill_holes(body)
assert (cleaned == postprocess(mask)).all()
print(f"after hole fill: {int(cleaned.sum())} px, "
      f"{connected_components(cleaned, 8).count} component, "
      f"{connected_components(~cleaned, 4).count} background component")
print(f"idempotent: {bool((postprocess(cleaned) == cleaned).all())}")

fig, axes = plt.subplots(1, 3, figsize=(12, 4))
for ax, (title, panel) in zip(axes, [("dirty input", mask),
                                     ("largest component", body),
                                     ("holes filled", cleaned)]):
    ax.imshow(panel, cmap="gray")
    ax.set_title(title)
    ax.axis("off")
fig.tight_layout()
fig.savefig(os.path.join(OUT, "postprocess_cleanup.png"), dpi=110)
print(f"panel saved to {os.path.join(OUT, 'postprocess_cleanup.png')}")
