"""Drive the pipeline through the child-process segmenter protocol.

Uses the adapter package (adapter/) with its stub backend, which answers
the wire protocol with deterministic nested boxes, so this runs without
model weights. Swap --checkpoint stub for a real SAM2 checkpoint to run
actual inference with the identical plumbing.

Run:  python demos/subprocess_segmenter_loop.py
"""

import os
import sys
import tempfile

from reposeg import PipelineConfig, SubprocessProvider, generate_scene, run_pipeline
from reposeg.synthetic import sample_scene_spec

ADAPTER_SRC = os.path.join(os.path.dirname(__file__), "..", "adapter", "src")

env_path = os.path.abspath(ADAPTER_SRC) + os.pathsep + os.environ.get("PYTHONPATH", "")
os.environ["PYTHONPATH"] = env_path

with tempfile.TemporaryDirectory() as mask_dir:
    command = [sys.executable, "-m", "sam2_adapter",
               "--checkpoint", "stub", "--out", mask_dir]
    print("child command:", " ".join(command))

    sample = generate_scene(sample_scene_spec(seed=2))
    with SubprocessProvider(command, timeout=60) as provider:
        for run in range(3):
            output = run_pipeline(sample.image, PipelineConfig(), provider=provider)
            print(f"run {run}: prompt=({output.prompt.x},{output.prompt.y}) "
                  f"ratios={['%.3f' % r for r in output.selection.ratios]} "
                  f"selected={output.selection.selected_index} "
                  f"final={int(output.final_mask.sum())}px")

print("one child process served all three requests over line-delimited JSON")
