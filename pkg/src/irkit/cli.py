"""Command-line interface.

Subcommands: explain, sweep, purity-bench, ols-report, segment, discretize.
Every run writes its outputs plus a ``manifest.json`` (command, resolved
configuration, seed, version, input checksums, timestamps) into the --out
directory; re-running with the same seed and configuration reproduces all
result files byte for byte (the manifest's timestamps aside).

Exit codes: 0 success, 2 usage error, 3 input/IO error, 4 backend error.
Configuration precedence: command-line flags > --config JSON file > defaults.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from dataclasses import asdict
from pathlib import Path

import numpy as np

import irkit
from irkit.blackbox import make_blackbox
from irkit.dataset import load_tabular_csv
from irkit.datasets import REGISTRY, dataset_path, load_dataset
from irkit.discretize import Anchor, count_encodings, quantile_discretize
from irkit.errors import (BackendError, ConfigError, DatasetError, IrkitError,
                          ParameterError, ParseError, ProtocolError, SchemaError)
from irkit.experiments.occlusion import (SweepConfig, occlusion_sweep,
                                         write_failures_csv, write_fig_layout,
                                         write_sweep_csv)
from irkit.experiments.ols_report import (OlsScenario, ols_sensitivity_report,
                                          write_ols_report_csv)
from irkit.experiments.purity import (PurityBenchConfig, purity_benchmark,
                                      write_purity_csv, write_purity_summary)
from irkit.image import load_png, resize_image, save_png, slic_segment
from irkit.rng import RngStream
from irkit.schema import FeatureSchema
from irkit.surrogate import SurrogateConfig, explain_tabular

USAGE_EXIT = 2
IO_EXIT = 3
BACKEND_EXIT = 4


def _sha256(path: Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


class Manifest:
    def __init__(self, command: str, argv: list[str], seed, config: dict):
        self.payload = {
            "command": command,
            "argv": argv,
            "seed": seed,
            "config": config,
            "toolkit_version": irkit.__version__,
            "kernel_backend": irkit.BACKEND,
            "input_checksums": {},
            "started_at": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        }

    def add_input(self, path) -> None:
        self.payload["input_checksums"][str(path)] = _sha256(path)

    def write(self, outdir: Path) -> None:
        self.payload["finished_at"] = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())
        with open(outdir / "manifest.json", "w", encoding="utf-8") as fh:
            json.dump(self.payload, fh, indent=2, sort_keys=True)
            fh.write("\n")


def _outdir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _merge_config(args, parser_defaults: dict) -> dict:
    """flags > --config file > defaults, resolved into one dict."""
    resolved = dict(parser_defaults)
    cfg_path = getattr(args, "config", None)
    if cfg_path:
        with open(cfg_path, "r", encoding="utf-8") as fh:
            file_cfg = json.load(fh)
        unknown = set(file_cfg) - set(parser_defaults)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        resolved.update(file_cfg)
    for key in parser_defaults:
        value = getattr(args, key, None)
        if value is not None:
            resolved[key] = value
    return resolved


def _parse_widths(text: str) -> tuple:
    text = text.strip()
    if ".." in text:
        lo, hi = text.split("..", 1)
        return tuple(range(int(lo), int(hi) + 1))
    return tuple(int(v) for v in text.split(","))


def _parse_int_list(text: str) -> tuple:
    return tuple(int(v) for v in text.split(","))


def _load_any_dataset(handle: str, target_column=None, target_kind=None):
    """Registry name, or a CSV path (all-numerical schema inferred)."""
    if handle in REGISTRY:
        return load_dataset(handle), dataset_path(handle)
    path = Path(handle)
    if not path.is_file():
        raise DatasetError(f"{handle!r} is neither a known dataset nor a file")
    if target_column is None:
        raise ConfigError("CSV datasets need --target-column")
    import csv as _csv
    with open(path, "r", encoding="utf-8", newline="") as fh:
        header = next(_csv.reader(fh))
    schema = FeatureSchema.numeric([h for h in header if h != target_column])
    return load_tabular_csv(path, schema, target_column, target_kind or "label"), path


# --------------------------------------------------------------------------
# subcommands


def cmd_explain(args) -> int:
    defaults = {"ir": "quantile:4", "surrogate": "ols", "n": 1000, "scale": 1.0,
                "flip": 0.1, "target_class": None, "crisp": False,
                "kernel_width": None, "blackbox": "builtin:nn",
                "target_column": None, "target_kind": None}
    cfg = _merge_config(args, defaults)
    ds, source = _load_any_dataset(args.dataset, cfg["target_column"], cfg["target_kind"])
    if not 0 <= args.row < ds.n_rows:
        raise ConfigError(f"--row must be in [0, {ds.n_rows})")

    ir_kind, _, ir_param = cfg["ir"].partition(":")
    ir = (ir_kind, int(ir_param or (4 if ir_kind == "quantile" else 32)))
    sur_kind, _, sur_param = cfg["surrogate"].partition(":")
    scfg = SurrogateConfig(
        n=int(cfg["n"]), scale=float(cfg["scale"]), flip=float(cfg["flip"]),
        target_class=cfg["target_class"],
        target_output="crisp" if cfg["crisp"] else "proba",
        kernel_width=cfg["kernel_width"], kind=sur_kind,
        tree_leaves=int(sur_param or 8))

    bb = make_blackbox(cfg["blackbox"], dataset=ds)
    rng = RngStream(args.seed).child("explain", str(args.row))
    x = tuple(ds.rows[args.row])
    explanation = explain_tabular(x, bb, ds, ir, scfg, rng)

    out = _outdir(args)
    manifest = Manifest("explain", sys.argv[1:], args.seed, {**cfg, "row": args.row,
                                                             "dataset": args.dataset})
    manifest.add_input(source)
    (out / "explanation.json").write_text(explanation.to_json() + "\n", encoding="utf-8")
    if hasattr(explanation, "to_csv"):
        explanation.to_csv(out / "explanation.csv")
    manifest.write(out)
    print(explanation.to_json())
    return 0


def cmd_sweep(args) -> int:
    defaults = {"segments": (5, 10, 15, 20, 30, 40), "strategies": "all",
                "repeats": 20, "compactness": 10.0, "iterations": 10,
                "resize": None, "jobs": os.cpu_count() or 1, "timeout": 30.0}
    cfg = _merge_config(args, defaults)
    from irkit.image import STRATEGIES
    strategies = STRATEGIES if cfg["strategies"] == "all" \
        else tuple(cfg["strategies"].split(","))
    segments = cfg["segments"]
    if isinstance(segments, str):
        segments = _parse_int_list(segments)

    image_dir = Path(args.images)
    if not image_dir.is_dir():
        raise DatasetError(f"--images {args.images!r} is not a directory")
    paths = sorted(p for p in image_dir.iterdir()
                   if p.suffix.lower() in (".png", ".jpg", ".jpeg"))
    if not paths:
        raise DatasetError(f"no images found under {image_dir}")
    images = [(p.name, load_png(p)) for p in paths]

    bb = make_blackbox(args.blackbox, mode="image", timeout=float(cfg["timeout"]))
    sweep_cfg = SweepConfig(
        segment_counts=tuple(segments), strategies=strategies,
        repeats=int(cfg["repeats"]), seed=args.seed,
        compactness=float(cfg["compactness"]), iterations=int(cfg["iterations"]),
        resize=cfg["resize"] if cfg["resize"] is None else int(cfg["resize"]),
        jobs=int(cfg["jobs"]))
    rows, failures = occlusion_sweep(images, bb, sweep_cfg)
    if not rows:
        raise BackendError("the sweep produced no observations; backend unreachable?")

    out = _outdir(args)
    manifest = Manifest("sweep", sys.argv[1:], args.seed,
                        {**cfg, "strategies": list(strategies),
                         "segments": list(segments), "images": [p.name for p in paths]})
    for p in paths:
        manifest.add_input(p)
    write_sweep_csv(rows, out / "sweep.csv")
    write_fig_layout(rows, out)
    if failures:
        write_failures_csv(failures, out / "failures.csv")
    manifest.write(out)
    print(f"wrote {len(rows)} aggregate rows over {len(paths)} images "
          f"({len(failures)} row-level failures)")
    return 0


def cmd_purity_bench(args) -> int:
    defaults = {"widths": (2, 4, 8, 16, 32, 64, 128, 256), "local_widths": None,
                "radius": 0.6, "q": 4, "min_leaf": 1,
                "standardized_distance": False, "jobs": os.cpu_count() or 1}
    cfg = _merge_config(args, defaults)
    widths = cfg["widths"]
    if isinstance(widths, str):
        widths = _parse_widths(widths)
    local = cfg["local_widths"]
    if isinstance(local, str):
        local = _parse_widths(local)

    ds, source = _load_any_dataset(args.dataset, getattr(args, "target_column", None),
                                   getattr(args, "target_kind", None))
    bench_cfg = PurityBenchConfig(
        widths=tuple(widths), local_widths=None if local is None else tuple(local),
        radius_fraction=float(cfg["radius"]), q=int(cfg["q"]),
        min_leaf=int(cfg["min_leaf"]),
        standardized_distance=bool(cfg["standardized_distance"]),
        jobs=int(cfg["jobs"]))
    result = purity_benchmark(ds, bench_cfg, dataset_name=args.dataset)

    out = _outdir(args)
    manifest = Manifest("purity-bench", sys.argv[1:], args.seed,
                        {**cfg, "widths": list(bench_cfg.widths),
                         "local_widths": list(bench_cfg.local_widths),
                         "dataset": args.dataset})
    manifest.add_input(source)
    write_purity_csv(result, out / "purity_curves.csv")
    write_purity_summary(result, out / "purity_summary.json")
    manifest.write(out)
    print(f"{args.dataset}: quartile_global={result.quartile_global:.6g} "
          f"(used {result.quartile_used}/{result.quartile_theoretical}), "
          f"crossing width={result.crossing_width()}")
    return 0


def cmd_ols_report(args) -> int:
    defaults = {"off_means": "0,1", "on_mean": 1.0, "on_count": 10,
                "ratios": "1:1,3:1", "counts_base": 10}
    cfg = _merge_config(args, defaults)
    off_means = tuple(float(v) for v in str(cfg["off_means"]).split(","))
    ratios = tuple(tuple(int(v) for v in r.split(":"))
                   for r in str(cfg["ratios"]).split(","))
    scenario = OlsScenario(off_means=off_means, on_mean=float(cfg["on_mean"]),
                           on_count=int(cfg["on_count"]), ratios=ratios,
                           counts_base=int(cfg["counts_base"]))
    rows = ols_sensitivity_report(scenario, RngStream(args.seed).child("ols-report"))

    out = _outdir(args)
    manifest = Manifest("ols-report", sys.argv[1:], args.seed,
                        {**cfg, "off_means": list(off_means),
                         "ratios": [list(r) for r in ratios]})
    write_ols_report_csv(rows, out / "ols_report.csv")
    manifest.write(out)
    for r in rows:
        print(f"ratio {r.ratio}: coefficient={r.coefficient:.9f} "
              f"analytic={r.analytic_coefficient:.9f}")
    return 0


def cmd_segment(args) -> int:
    defaults = {"n": 10, "compactness": 10.0, "iterations": 10, "resize": None}
    cfg = _merge_config(args, defaults)
    img = load_png(args.image)
    if cfg["resize"]:
        img = resize_image(img, int(cfg["resize"]))
    seg = slic_segment(img, int(cfg["n"]), float(cfg["compactness"]),
                       int(cfg["iterations"]))
    out = _outdir(args)
    manifest = Manifest("segment", sys.argv[1:], args.seed, cfg)
    manifest.add_input(args.image)
    seg.to_label_png(out / "labels.png")
    (out / "segment_sizes.json").write_text(seg.sizes_json() + "\n", encoding="utf-8")
    manifest.write(out)
    print(f"{seg.n_segments} segments; sizes {seg.sizes.tolist()}")
    return 0


def cmd_discretize(args) -> int:
    defaults = {"q": 4, "row": None, "target_column": None, "target_kind": None}
    cfg = _merge_config(args, defaults)
    ds, source = _load_any_dataset(args.dataset, cfg["target_column"], cfg["target_kind"])
    disc = quantile_discretize(ds, int(cfg["q"]))
    out = _outdir(args)
    manifest = Manifest("discretize", sys.argv[1:], args.seed,
                        {**cfg, "dataset": args.dataset})
    manifest.add_input(source)
    (out / "discretization.json").write_text(disc.to_json() + "\n", encoding="utf-8")

    counts = {}
    used, theoretical = count_encodings(ds, disc)
    counts["discrete"] = {"used": used, "theoretical": theoretical}
    if cfg["row"] is not None:
        row = int(cfg["row"])
        anchor = Anchor.from_instance(tuple(ds.rows[row]), disc)
        b_used, b_theo = count_encodings(ds, disc, anchor)
        counts["binary"] = {"anchor_row": row, "used": b_used, "theoretical": b_theo}
    (out / "encoding_counts.json").write_text(
        json.dumps(counts, indent=2) + "\n", encoding="utf-8")
    manifest.write(out)
    print(json.dumps(counts))
    return 0


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="irkit",
        description="Interpretable-representation toolkit: explain predictions, "
                    "sweep occlusion strategies, benchmark discretizations.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, seed_required):
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--seed", type=int, required=seed_required, default=None,
                       help="master seed" + ("" if seed_required else " (default 0)"))
        p.add_argument("--config", help="JSON config file (flags take precedence)")

    p = sub.add_parser("explain", help="explain one dataset row")
    p.add_argument("--dataset", required=True, help="registry name or CSV path")
    p.add_argument("--row", type=int, required=True)
    p.add_argument("--ir", help="quantile:Q or tree:LEAVES (default quantile:4)")
    p.add_argument("--surrogate", help="ols or tree:LEAVES (default ols)")
    p.add_argument("--n", type=int, help="sample count (default 1000)")
    p.add_argument("--scale", type=float, help="sampler scale (default 1.0)")
    p.add_argument("--flip", type=float, help="categorical flip probability")
    p.add_argument("--target-class", dest="target_class", type=int)
    p.add_argument("--crisp", action="store_const", const=True, default=None,
                   help="regress on crisp indicator instead of probability")
    p.add_argument("--kernel-width", dest="kernel_width", type=float)
    p.add_argument("--blackbox", help="builtin:NAME or an external command")
    p.add_argument("--target-column", dest="target_column")
    p.add_argument("--target-kind", dest="target_kind", choices=["label", "numeric"])
    common(p, seed_required=True)
    p.set_defaults(func=cmd_explain)

    p = sub.add_parser("sweep", help="occlusion-strategy sweep over images")
    p.add_argument("--images", required=True, help="directory of PNG/JPEG images")
    p.add_argument("--blackbox", required=True,
                   help="builtin:colour-mass or an external command")
    p.add_argument("--segments", help="comma list, default 5,10,15,20,30,40")
    p.add_argument("--strategies", help="comma list or 'all'")
    p.add_argument("--repeats", type=int)
    p.add_argument("--compactness", type=float)
    p.add_argument("--iterations", type=int)
    p.add_argument("--resize", type=int, help="resize inputs to SIZE x SIZE")
    p.add_argument("--timeout", type=float, help="backend timeout in seconds")
    p.add_argument("--jobs", type=int)
    common(p, seed_required=True)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("purity-bench", help="tree vs quartile purity benchmark")
    p.add_argument("--dataset", required=True)
    p.add_argument("--widths", help="e.g. 2..256 or 2,4,8,16")
    p.add_argument("--local-widths", dest="local_widths")
    p.add_argument("--radius", type=float, help="neighbourhood radius fraction")
    p.add_argument("--q", type=int, help="quantile count (default 4)")
    p.add_argument("--min-leaf", dest="min_leaf", type=int)
    p.add_argument("--standardized-distance", dest="standardized_distance",
                   action="store_const", const=True, default=None)
    p.add_argument("--target-column", dest="target_column")
    p.add_argument("--target-kind", dest="target_kind", choices=["label", "numeric"])
    p.add_argument("--jobs", type=int)
    common(p, seed_required=False)
    p.set_defaults(func=cmd_purity_bench)

    p = sub.add_parser("ols-report", help="OLS count-sensitivity report")
    p.add_argument("--off-means", dest="off_means", help="comma list, default 0,1")
    p.add_argument("--on-mean", dest="on_mean", type=float)
    p.add_argument("--on-count", dest="on_count", type=int)
    p.add_argument("--ratios", help="e.g. 1:1,3:1")
    p.add_argument("--counts-base", dest="counts_base", type=int)
    common(p, seed_required=True)
    p.set_defaults(func=cmd_ols_report)

    p = sub.add_parser("segment", help="segment one image")
    p.add_argument("--image", required=True)
    p.add_argument("--n", type=int, help="segment count (default 10)")
    p.add_argument("--compactness", type=float)
    p.add_argument("--iterations", type=int)
    p.add_argument("--resize", type=int)
    common(p, seed_required=False)
    p.set_defaults(func=cmd_segment)

    p = sub.add_parser("discretize", help="quantile-discretize a dataset")
    p.add_argument("--dataset", required=True)
    p.add_argument("--q", type=int)
    p.add_argument("--row", type=int, help="also report binary counts for this anchor")
    p.add_argument("--target-column", dest="target_column")
    p.add_argument("--target-kind", dest="target_kind", choices=["label", "numeric"])
    common(p, seed_required=False)
    p.set_defaults(func=cmd_discretize)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.seed is None:
        args.seed = 0
    try:
        return args.func(args)
    except (BackendError, ProtocolError) as e:
        print(f"irkit: backend error: {e}", file=sys.stderr)
        if isinstance(e, BackendError) and e.stderr_excerpt:
            print(f"--- backend stderr ---\n{e.stderr_excerpt}", file=sys.stderr)
        return BACKEND_EXIT
    except (DatasetError, ParseError, SchemaError, OSError) as e:
        print(f"irkit: input error: {e}", file=sys.stderr)
        return IO_EXIT
    except (ParameterError, ConfigError) as e:
        print(f"irkit: usage error: {e}", file=sys.stderr)
        return USAGE_EXIT
    except IrkitError as e:
        print(f"irkit: error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
