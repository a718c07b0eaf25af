"""Command-line front end.

Subcommands: run (single image), batch (directory), eval (pred/gt pairs),
synth (generate a dataset), otsu (baseline masks), report (metric table).
Exit codes: 0 success, 1 pipeline/data errors, 2 usage or config errors.

Configuration is read from a TOML file (--config) and individual flags win
over file values. Only the flat subset of TOML needed here is supported:
[section] headers and string / integer / float / boolean scalars.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import dataclasses
import json
import os
import sys
import threading
from dataclasses import asdict

from .errors import ConfigError, RePoSegError
from .image_io import read_gray, read_image
from .metrics import MetricsReport, comparison_table, evaluate_dataset, otsu
from .pipeline import PipelineConfig, run_pipeline
from .providers import FILES, SUBPROCESS, SYNTHETIC, ProviderSpec, make_provider
from .selection import SelectorConfig
from .specular import DetectorConfig
from .synthetic import NOISY, SceneSpec, generate_scene, sample_scene_spec, write_scene

_IMAGE_EXTENSIONS = (".png", ".pgm")


# ---------------------------------------------------------------- config

def _toml_scalar(raw: str, where: str):
    raw = raw.strip()
    if len(raw) >= 2 and raw[0] == '"' and raw[-1] == '"':
        return raw[1:-1]
    if raw == "true":
        return True
    if raw == "false":
        return False
    try:
        return int(raw)
    except ValueError:
        pass
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(f"{where}: cannot parse value {raw!r}") from None


def parse_config_text(text: str) -> dict:
    """Parse the flat TOML subset used for pipeline configuration."""
    data: dict = {}
    section = data
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if stripped.startswith("[") and stripped.endswith("]"):
            name = stripped[1:-1].strip()
            if not name:
                raise ConfigError(f"line {lineno}: empty section name")
            section = data.setdefault(name, {})
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected key = value")
        key, _, raw = stripped.partition("=")
        if '"' not in raw and "#" in raw:
            raw = raw.split("#", 1)[0]
        section[key.strip()] = _toml_scalar(raw, f"line {lineno}")
    return data


def load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_config_text(fh.read())
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None


def _build(cls, section: dict, overrides: dict, where: str):
    merged = dict(section)
    merged.update({k: v for k, v in overrides.items() if v is not None})
    try:
        return cls(**merged)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def _pipeline_config(args, need_provider: bool = True) -> PipelineConfig:
    cfg = load_config(getattr(args, "config", None))
    detector = _build(DetectorConfig, cfg.get("detector", {}),
                      {"method": getattr(args, "detector", None)}, "[detector]")
    selector = _build(SelectorConfig, cfg.get("selector", {}),
                      {"r_max": getattr(args, "r_max", None)}, "[selector]")

    prov_cfg = dict(cfg.get("provider", {}))
    kind = getattr(args, "provider", None) or prov_cfg.pop("kind", None)
    if getattr(args, "candidates_dir", None):
        kind = kind or FILES
        prov_cfg["directory"] = args.candidates_dir
    if getattr(args, "provider_cmd", None):
        kind = kind or SUBPROCESS
        prov_cfg["command"] = args.provider_cmd
    provider = None
    if kind is not None:
        try:
            provider = ProviderSpec(kind=kind, parameters=prov_cfg)
        except ValueError as exc:
            raise ConfigError(f"[provider]: {exc}") from exc
    elif need_provider:
        raise ConfigError("no provider configured (use --provider or a [provider] section)")

    out_cfg = cfg.get("output", {})
    output_dir = getattr(args, "out", None) or out_cfg.get("directory")
    emit = bool(out_cfg.get("emit_intermediates", False))
    if getattr(args, "emit_intermediates", False):
        emit = True
    return PipelineConfig(detector=detector, selector=selector, provider=provider,
                          output_dir=output_dir, emit_intermediates=emit)


def _config_snapshot(config: PipelineConfig) -> dict:
    return {
        "detector": asdict(config.detector),
        "selector": asdict(config.selector),
        "provider": {"kind": config.provider.kind, "parameters": dict(config.provider.parameters)}
        if config.provider else None,
        "output_dir": config.output_dir,
        "emit_intermediates": config.emit_intermediates,
    }


# ---------------------------------------------------------------- inputs

def _scene_dir_of(image_path: str) -> str | None:
    parent = os.path.dirname(os.path.abspath(image_path))
    if os.path.exists(os.path.join(parent, "gt_object.png")):
        return parent
    return None


def _batch_inputs(directory: str) -> list[tuple[str, str, str | None]]:
    """Yield (name, image path, scene dir) for flat images or scene subdirs."""
    entries = sorted(os.listdir(directory))
    inputs = []
    for entry in entries:
        full = os.path.join(directory, entry)
        if os.path.isdir(full) and os.path.exists(os.path.join(full, "image.png")):
            scene = full if os.path.exists(os.path.join(full, "gt_object.png")) else None
            inputs.append((entry, os.path.join(full, "image.png"), scene))
        elif entry.lower().endswith(_IMAGE_EXTENSIONS):
            inputs.append((os.path.splitext(entry)[0], full, _scene_dir_of(full)))
    return inputs


# ------------------------------------------------------------ subcommands

def _cmd_run(args) -> int:
    config = _pipeline_config(args)
    if config.output_dir is None:
        raise ConfigError("run needs an output directory (--out)")
    image = read_image(args.image)
    name = os.path.splitext(os.path.basename(args.image))[0]
    output = run_pipeline(image, config, name=name, scene_dir=_scene_dir_of(args.image))
    sel = output.selection
    print(f"{args.image}: prompt=({output.prompt.x},{output.prompt.y}) "
          f"ratios={['%.3f' % r for r in sel.ratios]} selected={sel.selected_index} "
          f"mask={os.path.join(config.output_dir, name + '.mask.png')}")
    return 0


def _cmd_batch(args) -> int:
    config = _pipeline_config(args)
    if config.output_dir is None:
        raise ConfigError("batch needs an output directory (--out)")
    inputs = _batch_inputs(args.directory)
    if not inputs:
        raise ConfigError(f"no images found under {args.directory}")
    os.makedirs(config.output_dir, exist_ok=True)

    workers = args.workers or os.cpu_count() or 1
    local = threading.local()
    shared_handles = []
    handle_lock = threading.Lock()

    def worker_provider(scene_dir):
        # synthetic providers are scene-bound, so they are built per image;
        # files/subprocess handles are reused per worker thread
        if config.provider.kind == SYNTHETIC:
            return make_provider(config.provider, scene_dir=scene_dir), True
        handle = getattr(local, "provider", None)
        if handle is None:
            handle = make_provider(config.provider)
            local.provider = handle
            with handle_lock:
                shared_handles.append(handle)
        return handle, False

    def process(item):
        name, image_path, scene_dir = item
        provider = None
        owned = False
        try:
            provider, owned = worker_provider(scene_dir)
            image = read_image(image_path)
            output = run_pipeline(image, config, provider=provider, name=name)
            return name, {"image": image_path, "status": "ok",
                          "selected_index": output.selection.selected_index,
                          "mask": os.path.join(config.output_dir, f"{name}.mask.png")}
        except RePoSegError as exc:
            return name, {"image": image_path, "status": "error",
                          "stage": exc.stage, "error": str(exc)}
        except Exception as exc:  # per-image failures never abort the batch
            return name, {"image": image_path, "status": "error",
                          "stage": None, "error": f"{type(exc).__name__}: {exc}"}
        finally:
            if owned and provider is not None:
                provider.close()

    results = {}
    try:
        with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
            for name, record in pool.map(process, inputs):
                results[name] = record
    finally:
        for handle in shared_handles:
            handle.close()

    manifest = {"config": _config_snapshot(config),
                "images": [dict(results[name], name=name) for name, _, _ in inputs]}
    manifest_path = os.path.join(config.output_dir, "manifest.json")
    with open(manifest_path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2)

    failures = [r for r in manifest["images"] if r["status"] != "ok"]
    for record in failures:
        print(f"{record['name']}: {record.get('stage')}: {record['error']}", file=sys.stderr)
    print(f"batch: {len(inputs) - len(failures)}/{len(inputs)} ok, manifest {manifest_path}")
    return 1 if failures else 0


def _find_gt(pred_path: str, gt_root: str) -> str | None:
    base = os.path.splitext(os.path.basename(pred_path))[0]
    for suffix in (".mask", ".otsu"):
        if base.endswith(suffix):
            base = base[: -len(suffix)]
    candidates = [os.path.join(gt_root, base + ext) for ext in _IMAGE_EXTENSIONS]
    candidates.append(os.path.join(gt_root, base, "gt_object.png"))
    for path in candidates:
        if os.path.exists(path):
            return path
    return None


def _cmd_eval(args) -> int:
    if os.path.isfile(args.predictions):
        pairs = [(args.predictions, args.ground_truth)]
    else:
        preds = sorted(p for p in os.listdir(args.predictions)
                       if p.lower().endswith(_IMAGE_EXTENSIONS))
        pairs = []
        for pred in preds:
            pred_path = os.path.join(args.predictions, pred)
            gt_path = _find_gt(pred_path, args.ground_truth)
            if gt_path is None:
                raise RePoSegError(f"no ground truth found for {pred_path}")
            pairs.append((pred_path, gt_path))
        if not pairs:
            raise RePoSegError(f"no prediction masks under {args.predictions}")
    report = evaluate_dataset(pairs)
    print(f"images={len(report.per_image)} mean IoU={report.iou:.4f} "
          f"DSC={report.dsc:.4f} pixel accuracy={report.pixel_accuracy:.4f}")
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        report.to_csv(os.path.join(args.out, "metrics.csv"))
        report.to_json(os.path.join(args.out, "metrics.json"))
        print(f"wrote {os.path.join(args.out, 'metrics.{csv,json}')}")
    return 0


def _cmd_synth(args) -> int:
    template = None
    if args.spec:
        with open(args.spec, encoding="utf-8") as fh:
            doc = json.load(fh)
        doc.pop("candidate_mode", None)
        for key in ("object_center", "object_size", "highlight_offset"):
            if key in doc:
                doc[key] = tuple(doc[key])
        template = SceneSpec(**doc)
    width, height = args.size
    os.makedirs(args.out, exist_ok=True)
    for i in range(args.count):
        if template is not None:
            spec_i = dataclasses.replace(template, seed=template.seed + i)
        else:
            spec_i = sample_scene_spec(args.seed + i, width=width, height=height)
        sample = generate_scene(spec_i)
        write_scene(os.path.join(args.out, f"scene_{i:04d}"), spec_i, sample,
                    candidate_mode=args.candidate_mode)
    print(f"wrote {args.count} scenes under {args.out}")
    return 0


def _cmd_otsu(args) -> int:
    if os.path.isdir(args.input):
        paths = [os.path.join(args.input, p) for p in sorted(os.listdir(args.input))
                 if p.lower().endswith(_IMAGE_EXTENSIONS)]
        if not paths:
            raise RePoSegError(f"no images under {args.input}")
    else:
        paths = [args.input]
    os.makedirs(args.out, exist_ok=True)
    failures = 0
    from .image_io import write_mask
    for path in paths:
        name = os.path.splitext(os.path.basename(path))[0]
        try:
            threshold, mask = otsu(read_gray(path), invert=args.invert_otsu)
            write_mask(mask, os.path.join(args.out, f"{name}.otsu.png"))
            print(f"{path}: threshold={threshold}")
        except RePoSegError as exc:
            failures += 1
            print(f"{path}: {exc}", file=sys.stderr)
    return 1 if failures else 0


def _cmd_report(args) -> int:
    columns = []
    for item in args.column:
        if "=" not in item:
            raise ConfigError(f"--column expects NAME=metrics.json, got {item!r}")
        name, _, path = item.partition("=")
        columns.append((name, MetricsReport.from_json(path)))
    try:
        table = comparison_table(columns, relative_to=args.relative_to)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    print(table)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(table + "\n")
    return 0


# ---------------------------------------------------------------- parser

def _add_pipeline_flags(sub):
    sub.add_argument("--config", help="TOML configuration file")
    sub.add_argument("--r-max", dest="r_max", type=float, help="selection ratio upper bound")
    sub.add_argument("--detector", choices=["percentile", "adaptive"])
    sub.add_argument("--provider", choices=[FILES, SUBPROCESS, SYNTHETIC])
    sub.add_argument("--provider-cmd", dest="provider_cmd",
                     help="command line for the subprocess provider")
    sub.add_argument("--candidates-dir", dest="candidates_dir",
                     help="directory of mask_{0,1,2} files for the files provider")
    sub.add_argument("--out", help="output directory")
    sub.add_argument("--emit-intermediates", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="reposeg",
        description="Select and clean object masks using specular reflections")
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", help="run the pipeline on one image")
    run.add_argument("image")
    _add_pipeline_flags(run)
    run.set_defaults(func=_cmd_run)

    batch = commands.add_parser("batch", help="run the pipeline over a directory")
    batch.add_argument("directory")
    _add_pipeline_flags(batch)
    batch.add_argument("--workers", type=int, help="worker threads (default: logical CPUs)")
    batch.set_defaults(func=_cmd_batch)

    ev = commands.add_parser("eval", help="score prediction masks against ground truth")
    ev.add_argument("predictions", help="mask file or directory of *.mask.png files")
    ev.add_argument("ground_truth", help="mask file, directory, or scenes directory")
    ev.add_argument("--out", help="directory for metrics.csv / metrics.json")
    ev.set_defaults(func=_cmd_eval)

    synth = commands.add_parser("synth", help="generate a synthetic scene dataset")
    synth.add_argument("--out", required=True)
    synth.add_argument("--count", type=int, default=1)
    synth.add_argument("--seed", type=int, default=0)
    synth.add_argument("--spec", help="scene spec JSON template (seed advances per scene)")
    synth.add_argument("--size", type=_parse_size, default=(160, 160),
                       help="WxH for sampled scenes (default 160x160)")
    synth.add_argument("--candidate-mode", choices=["faithful", "noisy"], default=NOISY)
    synth.set_defaults(func=_cmd_synth)

    ots = commands.add_parser("otsu", help="classical threshold baseline masks")
    ots.add_argument("input", help="image file or directory")
    ots.add_argument("--out", required=True)
    ots.add_argument("--invert-otsu", dest="invert_otsu", action="store_true",
                     help="foreground = darker class instead of brighter")
    ots.set_defaults(func=_cmd_otsu)

    rep = commands.add_parser("report", help="merge eval outputs into a comparison table")
    rep.add_argument("--column", action="append", required=True,
                     metavar="NAME=metrics.json")
    rep.add_argument("--relative-to", dest="relative_to",
                     help="baseline column for relative-improvement rows")
    rep.add_argument("--out", help="also write the table to this file")
    rep.set_defaults(func=_cmd_report)
    return parser


def _parse_size(raw: str) -> tuple[int, int]:
    try:
        w, h = raw.lower().split("x")
        return int(w), int(h)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected WxH, got {raw!r}") from None


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except RePoSegError as exc:
        stage = f" [{exc.stage}]" if exc.stage else ""
        print(f"error{stage}: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
