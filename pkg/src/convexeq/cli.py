"""
Command line: ``convexeq solve|verify|figure|catalog``.

Exit codes: 0 success, 1 input error (including an unsound reduction
request), 2 solver non-convergence. ``verify`` also exits 1 when the
reduction and the brute force disagree, unless ``--expect-disagree`` is
given, which inverts that test.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from convexeq.geometry import ConvergenceError, Polytope
from convexeq.instancefile import InstanceError, load

log = logging.getLogger("convexeq")


def _jsonable(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return "inf" if obj > 0 else ("-inf" if obj < 0 else "nan")
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def _emit(report: dict, out: str | None) -> None:
    text = json.dumps(_jsonable(report), indent=2) + "\n"
    sys.stdout.write(text)
    if out:
        Path(out).write_text(text)


def _load(args):
    inst = load(args.path)
    if args.seed is not None:
        inst.seed = args.seed
    return inst


def cmd_solve(args) -> int:
    from convexeq.runner import solve

    inst = _load(args)
    report = solve(inst, args.mode, args.tol, args.unsafe, args.resolution)
    _emit(report, args.out)
    return 0


def cmd_verify(args) -> int:
    from convexeq.runner import verify

    inst = _load(args)
    report = verify(inst, args.mode, args.tol, args.unsafe, args.resolution)
    agree = report["comparison"]["agree"]
    cross = report.get("cross_check", {}).get("consistent", True)
    report["expect_disagree"] = args.expect_disagree
    _emit(report, args.out)
    if args.expect_disagree:
        return 0 if not agree else 1
    return 0 if agree and cross else 1


def cmd_figure(args) -> int:
    from convexeq.partition import format_csv, partition_table, sample_exterior
    from convexeq.plotting import plot_partition, pretty_plot, save_svg

    inst = _load(args)
    if inst.dimension != 2 or not isinstance(inst.body, Polytope):
        raise InstanceError("body: figures need a planar polytope")
    p = inst.payload
    window = p.get("window", [-3.0, 3.0, -3.0, 3.0])
    samples = p.get("samples", 2000)
    rng = np.random.default_rng(inst.seed)
    pts = sample_exterior(inst.body, samples, window, rng)
    rows = partition_table(inst.body, pts, args.tol or inst.tolerances.feas)

    stem = Path(args.out) if args.out else Path(Path(args.path).stem)
    svg_path = stem.with_suffix(".svg")
    csv_path = stem.with_suffix(".csv")
    if stem.parent != Path("."):
        stem.parent.mkdir(parents=True, exist_ok=True)
    csv_path.write_text(format_csv(rows))
    fig, ax = pretty_plot()
    plot_partition(inst.body, rows, window, p.get("boundary_samples", 3), ax=ax)
    save_svg(fig, svg_path)
    counts = {}
    for r in rows:
        counts[r[4]] = counts.get(r[4], 0) + 1
    _emit({"id": inst.id, "seed": inst.seed, "svg": str(svg_path), "csv": str(csv_path),
           "samples": len(rows), "faces": dict(sorted(counts.items()))}, None)
    return 0


def cmd_catalog(args) -> int:
    from convexeq.instances import catalog, export, replay

    if args.export:
        for path in export(args.export):
            print(path)
        return 0
    failed = 0
    for pi in catalog():
        checks = replay(pi)
        bad = [c for c in checks if not c[1]]
        failed += bool(bad)
        print(f"{'PASS' if not bad else 'FAIL'}  {pi.id}  ({len(checks)} checks)")
        for name, _, detail in bad:
            print(f"      {name}: {detail}")
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="convexeq", description=__doc__.split("\n\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, modes=True):
        p.add_argument("path", help="JSON instance file")
        p.add_argument("--tol", type=float, default=None, help="inequality tolerance (default from file)")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--resolution", type=float, default=None, help="brute-force grid spacing")
        if modes:
            p.add_argument("--mode", choices=["generators", "extreme", "exposed", "brute"], default=None)
            p.add_argument("--unsafe", action="store_true",
                           help="run a reduction even without the declared properties")
        p.add_argument("--out", default=None, help="report file (figure: output path stem)")

    p = sub.add_parser("solve", help="run the instance's problem")
    common(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="compare the reduction with brute force")
    common(p)
    p.add_argument("--expect-disagree", action="store_true",
                   help="succeed only when the two answers differ (counterexamples)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("figure", help="draw the partition of the exterior (SVG + CSV)")
    common(p, modes=False)
    p.set_defaults(func=cmd_figure)

    p = sub.add_parser("catalog", help="replay or export the built-in instances")
    p.add_argument("--export", metavar="DIR", default=None)
    p.set_defaults(func=cmd_catalog)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    logging.captureWarnings(True)
    try:
        return args.func(args)
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        # InstanceError and UnsoundReductionError are ValueErrors
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
