"""Command-line interface: ``tropicount {count,extract,boundary-svg,train,verify,trend}``."""
from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .counting import boundary_geometry_2d, count_affine_pieces, count_boundary_pieces
from .geometry import PointSet
from .network import NetworkSpec, ParseError, dumps_network, dumps_points, loads_network, loads_points, \
    random_network
from .oracle import DEFAULT_REGION_CAP, RegionCapExceeded, oracle_counts
from .svg import boundary_svg, trend_svg
from .training import PRESETS, REGIMES, TrainingDiverged, moving_average, preset_config, preset_data, \
    read_trend_csv, train, write_trend_csv
from .tropical import DcpaFunction, dcpa_extract

EXIT_OK, EXIT_FAIL, EXIT_MISMATCH, EXIT_CAP, EXIT_PARSE = 0, 1, 2, 3, 4


def code_version() -> str:
    from importlib.metadata import PackageNotFoundError, version

    try:
        return version("artifact")
    except PackageNotFoundError:
        return "0+unknown"


@dataclass
class RunManifest:
    command: str
    config: dict
    seed: int | None
    version: str = field(default_factory=code_version)
    wall_clock_seconds: float = 0.0
    outputs: list = field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True) + "\n"


class InputError(Exception):
    pass


# ---------------------------------------------------------------------------
# inputs


def load_function(path: str) -> tuple[DcpaFunction, NetworkSpec | None]:
    """A DCPA pair from a network file (JSON) or a point-list file."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(str(exc)) from exc
    try:
        if text.lstrip().startswith("{"):
            net = loads_network(text)
            if net.output_dim != 1:
                raise InputError(f"need a single output, got {net.output_dim}")
            return dcpa_extract(net), net
        sec = loads_points(text)
    except ParseError as exc:
        raise InputError(f"{path}: {exc}") from exc
    try:
        return DcpaFunction(PointSet(sec["P"]), PointSet(sec["N"])), None
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from exc


def parse_box(text: str) -> tuple[float, float, float, float]:
    try:
        vals = tuple(float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("box must be xmin,xmax,ymin,ymax") from None
    if len(vals) != 4 or not (vals[0] < vals[1] and vals[2] < vals[3]):
        raise argparse.ArgumentTypeError("box must be xmin,xmax,ymin,ymax with min < max")
    return vals


def parse_width_ranges(text: str) -> list[tuple[int, int]]:
    """``2-3..6-3..6-1`` -> ``[(2, 2), (3, 6), (3, 6), (1, 1)]``."""
    out = []
    for part in text.split("-"):
        lo, _, hi = part.partition("..")
        try:
            lo_i = int(lo)
            hi_i = int(hi) if hi else lo_i
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad width {part!r}") from None
        if lo_i < 1 or hi_i < lo_i:
            raise argparse.ArgumentTypeError(f"bad width range {part!r}")
        out.append((lo_i, hi_i))
    if len(out) < 2:
        raise argparse.ArgumentTypeError("need at least input and output widths")
    return out


def positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def _write(path: Path, text: str, manifest: RunManifest) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    manifest.outputs.append(str(path))


def _report(args, manifest: RunManifest, result: dict, start: float) -> None:
    manifest.wall_clock_seconds = round(time.perf_counter() - start, 3)
    if args.report_json:
        manifest.outputs.append(args.report_json)
        doc = {"result": result, "manifest": asdict(manifest)}
        Path(args.report_json).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


# ---------------------------------------------------------------------------
# commands


def cmd_count(args) -> int:
    start = time.perf_counter()
    f, _ = load_function(args.file)
    rep = count_boundary_pieces(f)
    total = count_affine_pieces(f)
    print(f"#Boundary = {rep.boundary_piece_count}")
    print(f"#Total = {total}")
    print(f"degenerate = {str(rep.degenerate).lower()} (flat cells {rep.degenerate_flat_cells}, "
          f"mixed 2+-cells {rep.mixed_higher_cells})")
    man = RunManifest("count", {"file": args.file}, None)
    _report(args, man, {"boundary": rep.boundary_piece_count, "total": total, "degenerate": rep.degenerate,
                        "degenerate_flat_cells": rep.degenerate_flat_cells,
                        "mixed_higher_cells": rep.mixed_higher_cells}, start)
    return EXIT_OK


def cmd_extract(args) -> int:
    start = time.perf_counter()
    f, _ = load_function(args.file)
    man = RunManifest("extract", {"file": args.file}, None)
    text = dumps_points({"P": f.P.points, "N": f.N.points})
    if args.out:
        _write(Path(args.out), text, man)
    else:
        sys.stdout.write(text)
    _report(args, man, {"P": len(f.P), "N": len(f.N)}, start)
    return EXIT_OK


def _overlay_data(args):
    if not args.data:
        return None
    train_set, _ = preset_data(args.data, args.seed)
    return train_set


def cmd_boundary_svg(args) -> int:
    start = time.perf_counter()
    f, _ = load_function(args.file)
    if f.input_dim != 2:
        raise InputError(f"boundary drawing needs two inputs, got {f.input_dim}")
    segs = boundary_geometry_2d(f)
    man = RunManifest("boundary-svg", {"file": args.file, "box": list(args.box), "data": args.data}, args.seed)
    out = Path(args.out or "boundary.svg")
    _write(out, boundary_svg(segs, args.box, data=_overlay_data(args)), man)
    print(f"#Boundary = {len(segs)} -> {out}")
    _report(args, man, {"boundary": len(segs)}, start)
    return EXIT_OK


def cmd_train(args) -> int:
    start = time.perf_counter()
    cfg = preset_config(args.preset, args.regime, args.seed, strength=args.strength, iters=args.iters,
                        batch=args.batch, stride=args.stride, weight_decay=args.weight_decay, lr=args.lr)
    train_set, test_set = preset_data(args.preset, args.seed)
    outdir = Path(args.out or f"run-{args.preset}-{args.regime}-{args.seed}")
    man = RunManifest("train", {"preset": args.preset, "count": args.count, **asdict(cfg)}, args.seed)
    _write(outdir / "config.txt", cfg.to_text(), man)
    status = EXIT_OK
    try:
        hist = train(train_set, cfg, test=test_set, count=args.count, robustness_sigma=PRESETS[args.preset].sigma)
    except TrainingDiverged as exc:
        print(f"error: {exc}; partial trend kept", file=sys.stderr)
        hist = exc.history
        status = EXIT_FAIL
    with open(outdir / "trend.csv", "w") as fh:
        write_trend_csv([r for _, r in hist], fh)
    man.outputs.append(str(outdir / "trend.csv"))
    result = {"checkpoints": len(hist)}
    if hist and status == EXIT_OK:
        net, rec = hist[-1]
        _write(outdir / "final.json", dumps_network(net), man)
        f = dcpa_extract(net)
        segs = boundary_geometry_2d(f)
        box = (-1.2, 1.2, -1.2, 1.2) if args.preset == "spiral" else (-2.0, 2.0, -2.0, 2.0)
        _write(outdir / "boundary.svg", boundary_svg(segs, box, data=train_set), man)
        result.update(asdict(rec))
        print(f"iteration {rec.iteration}: #Boundary={rec.boundary} #Total={rec.total} F-norm={rec.fnorm:.4g} "
              f"train acc={rec.train_acc:.2f}% test acc={rec.test_acc:.2f}% R={rec.robustness:.2f}%")
    man.wall_clock_seconds = round(time.perf_counter() - start, 3)
    man.outputs.append(str(outdir / "manifest.json"))
    (outdir / "manifest.json").write_text(man.to_json())
    _report(args, man, result, start)
    return status


def _verify_one(task):
    k, widths, seed, cap, merge, final = task
    rng = np.random.default_rng([seed, k])
    net = random_network(widths, rng, final_activation=final)
    f = dcpa_extract(net)
    rep = count_boundary_pieces(f)
    total = count_affine_pieces(f)
    try:
        ob, ot = oracle_counts(net, merge=merge, cap=cap)
    except RegionCapExceeded:
        return {"index": k, "widths": list(widths), "cap_exceeded": True}
    return {"index": k, "widths": list(widths), "boundary": rep.boundary_piece_count, "total": total,
            "oracle_boundary": ob, "oracle_total": ot, "degenerate": rep.degenerate,
            "match": rep.boundary_piece_count == ob and total == ot, "cap_exceeded": False}


def cmd_verify(args) -> int:
    start = time.perf_counter()
    ranges = parse_width_ranges(args.widths)
    rng = np.random.default_rng(args.seed)
    tasks = []
    for k in range(args.count):
        widths = tuple(int(rng.integers(lo, hi + 1)) for lo, hi in ranges)
        tasks.append((k, widths, args.seed, args.cap, args.merge, args.final_activation))
    if args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            rows = list(pool.map(_verify_one, tasks))
    else:
        rows = [_verify_one(t) for t in tasks]
    capped = [r for r in rows if r["cap_exceeded"]]
    judged = [r for r in rows if not r["cap_exceeded"] and not r["degenerate"]]
    matched = [r for r in judged if r["match"]]
    for r in rows:
        if r["cap_exceeded"]:
            print(f"net {r['index']} {r['widths']}: oracle region cap exceeded")
        elif not r["match"]:
            tag = " (degenerate, excluded)" if r["degenerate"] else ""
            print(f"net {r['index']} {r['widths']}: boundary {r['boundary']} vs oracle {r['oracle_boundary']}, "
                  f"total {r['total']} vs oracle {r['oracle_total']}{tag}")
    print(f"{len(matched)}/{len(judged)} matches ({len(rows) - len(judged) - len(capped)} degenerate excluded, "
          f"{len(capped)} over cap)")
    man = RunManifest("verify", {"widths": args.widths, "count": args.count, "cap": args.cap,
                                 "merge": args.merge, "final_activation": args.final_activation}, args.seed)
    _report(args, man, {"nets": rows, "matched": len(matched), "judged": len(judged)}, start)
    if capped:
        return EXIT_CAP
    return EXIT_OK if len(matched) == len(judged) else EXIT_MISMATCH


def cmd_trend(args) -> int:
    start = time.perf_counter()
    try:
        recs = read_trend_csv(Path(args.csv).read_text())
    except (OSError, ValueError) as exc:
        raise InputError(f"{args.csv}: {exc}") from exc
    its = [r.iteration for r in recs]
    nan = float("nan")
    series = {
        "boundary": moving_average([nan if r.boundary is None else r.boundary for r in recs], args.window),
        "total": moving_average([nan if r.total is None else r.total for r in recs], args.window),
        "fnorm": moving_average([r.fnorm for r in recs], args.window),
    }
    man = RunManifest("trend", {"csv": args.csv, "window": args.window}, None)
    out = Path(args.out or "trend.svg")
    _write(out, trend_svg(its, series, title=f"moving average, window {args.window}"), man)
    peaks = {k: its[int(np.nanargmax(v))] if not np.all(np.isnan(v)) else None for k, v in series.items()}
    print("argmax iteration: " + ", ".join(f"{k}={v}" for k, v in peaks.items()))
    _report(args, man, {"argmax_iteration": peaks}, start)
    return EXIT_OK


# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    """Usage errors exit with the parse-error code instead of argparse's 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_PARSE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="tropicount", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--report-json", metavar="PATH", help="write a machine-readable report and manifest")

    sp = sub.add_parser("count", help="exact #Boundary and #Total of a network or DCPA file")
    sp.add_argument("file")
    common(sp)
    sp.set_defaults(func=cmd_count)

    sp = sub.add_parser("extract", help="write the DCPA point lists of a network")
    sp.add_argument("file")
    sp.add_argument("--out")
    common(sp)
    sp.set_defaults(func=cmd_extract)

    sp = sub.add_parser("boundary-svg", help="draw the exact decision boundary of a planar network")
    sp.add_argument("file")
    sp.add_argument("--box", type=parse_box, default=(-2.0, 2.0, -2.0, 2.0))
    sp.add_argument("--out")
    sp.add_argument("--data", choices=sorted(PRESETS), help="overlay a preset's training set")
    sp.add_argument("--seed", type=int, default=0)
    common(sp)
    sp.set_defaults(func=cmd_boundary_svg)

    sp = sub.add_parser("train", help="train a preset and track exact piece counts")
    sp.add_argument("preset", choices=sorted(PRESETS))
    sp.add_argument("--regime", choices=REGIMES, default="ce")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--strength", type=float)
    sp.add_argument("--iters", type=int)
    sp.add_argument("--batch", type=int)
    sp.add_argument("--stride", type=int)
    sp.add_argument("--lr", type=float)
    sp.add_argument("--weight-decay", type=float)
    sp.add_argument("--count", choices=("all", "last", "none"), default="all")
    sp.add_argument("--out", help="output directory")
    common(sp)
    sp.set_defaults(func=cmd_train)

    sp = sub.add_parser("verify", help="cross-check exact counts against the activation-region oracle")
    sp.add_argument("--widths", default="2-5-5-1", help="e.g. 2-5-5-1 or 2-3..6-3..6-1")
    sp.add_argument("--count", type=positive_int, default=50)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--cap", type=int, default=DEFAULT_REGION_CAP)
    sp.add_argument("--merge", action="store_true", help="merge adjacent regions with equal affine maps")
    sp.add_argument("--final-activation", choices=("linear", "relu"), default="linear",
                    help="relu also rectifies the output, which makes the nets degenerate")
    sp.add_argument("--jobs", type=positive_int, default=1)
    common(sp)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("trend", help="plot smoothed #Boundary, #Total and F-norm from a trend CSV")
    sp.add_argument("csv")
    sp.add_argument("--window", type=positive_int, default=5)
    sp.add_argument("--out")
    common(sp)
    sp.set_defaults(func=cmd_trend)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except RegionCapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP


if __name__ == "__main__":
    sys.exit(main())
