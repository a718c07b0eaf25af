"""Entry point: start the adapter and serve until stdin closes.

Exits nonzero only when startup fails (bad checkpoint, unwritable output
directory, missing model dependencies); per-request problems are reported
as protocol error objects instead.
"""

from __future__ import annotations

import argparse
import os
import sys

from .backends import build_backend
from .server import serve


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sam2-adapter",
        description="Point-prompt multimask segmentation over stdio JSON")
    parser.add_argument("--checkpoint", required=True,
                        help="model checkpoint path, or 'stub' for the test backend")
    parser.add_argument("--device", default="cpu")
    parser.add_argument("--out", required=True, help="directory for mask PNG files")
    parser.add_argument("--model-config", dest="model_config", default=None,
                        help="model architecture config (real checkpoints only)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        os.makedirs(args.out, exist_ok=True)
        probe = os.path.join(args.out, ".write_probe")
        with open(probe, "w"):
            pass
        os.remove(probe)
        backend = build_backend(args.checkpoint, device=args.device,
                                model_config=args.model_config)
    except Exception as exc:
        print(f"startup failure: {exc}", file=sys.stderr)
        return 1
    serve(backend, args.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
