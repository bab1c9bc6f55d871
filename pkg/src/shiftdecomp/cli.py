"""Command-line driver.

Exit statuses: 0 ok, 2 usage/input error, 3 thresholds not met after all
retries (best attempt still written), 4 validation failure.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import graph as gmod
from .engine import Decomposition, RunConfig, partition, partition_once
from .metrics import SWEEP_BETAS, sweep, validate
from .render import render_grid_svg
from .shifts import ShiftAssignment, load_shifts

log = logging.getLogger("shiftdecomp")

EXIT_OK, EXIT_USAGE, EXIT_UNMET, EXIT_INVALID = 0, 2, 3, 4


class UsageError(Exception):
    pass


def _seed(text: str) -> int:
    try:
        v = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _betas(text: str) -> list[float]:
    try:
        vals = [float(t) for t in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad beta list {text!r}") from None
    return vals


def _read_graph(path: str) -> gmod.Graph:
    try:
        with open(path) as fh:
            return gmod.load_edgelist(fh)
    except OSError as e:
        raise UsageError(f"cannot read graph {path}: {e.strerror}") from None
    except gmod.GraphError as e:
        raise UsageError(f"{path}: {e}") from None


def read_labels(path: str, n: int | None = None) -> np.ndarray:
    try:
        with open(path) as fh:
            lines = fh.readlines()
    except OSError as e:
        raise UsageError(f"cannot read labels {path}: {e.strerror}") from None
    pairs = {}
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        try:
            v, c = int(parts[0]), int(parts[1])
            if len(parts) != 2:
                raise ValueError
        except (ValueError, IndexError):
            raise UsageError(f"{path}:{lineno}: expected '<vertex> <center>'") from None
        pairs[v] = c
    size = len(pairs) if n is None else n
    if sorted(pairs) != list(range(size)):
        raise UsageError(f"{path}: labels must cover vertices 0..{size - 1} exactly once")
    return np.array([pairs[v] for v in range(size)], dtype=np.int64)


def _write(path: str, text: str) -> None:
    Path(path).write_text(text)


# -- commands -----------------------------------------------------------------


def _graph_from_args(args) -> gmod.Graph:
    kind = args.kind
    params = {
        "grid": lambda: dict(rows=args.rows, cols=args.cols),
        "path": lambda: dict(n=args.n),
        "complete": lambda: dict(n=args.n),
        "gnp": lambda: dict(n=args.n, p=args.p, seed=args.graph_seed),
    }[kind]()
    missing = [k for k, v in params.items() if v is None]
    if missing:
        raise UsageError(f"--kind {kind} needs " + ", ".join("--" + k for k in missing))
    try:
        return gmod.gen(kind, **params)
    except gmod.GraphError as e:
        raise UsageError(str(e)) from None


def cmd_gen(args) -> int:
    g = _graph_from_args(args)
    with open(args.out, "w") as fh:
        gmod.save_edgelist(g, fh)
    log.info("wrote %s (n=%d, m=%d)", args.out, g.n, g.m)
    return EXIT_OK


def cmd_partition(args) -> int:
    g = _read_graph(args.graph)
    try:
        cfg = RunConfig(
            beta=args.beta,
            seed=args.seed,
            tiebreak=args.tiebreak,
            max_retries=args.max_retries,
            diam_threshold=args.diam_threshold,
            cut_threshold=args.cut_threshold,
        )
    except ValueError as e:
        raise UsageError(str(e)) from None

    if args.shifts_file:
        try:
            with open(args.shifts_file) as fh:
                delta = load_shifts(fh, g.n)
            s = ShiftAssignment.from_deltas(delta, cfg.beta, cfg.tiebreak, cfg.seed)
        except OSError as e:
            raise UsageError(f"cannot read shifts {args.shifts_file}: {e.strerror}") from None
        except ValueError as e:
            raise UsageError(f"{args.shifts_file}: {e}") from None
        d, rep = partition_once(g, s, args.threads)
        diam_thr, cut_thr = cfg.thresholds(g)
        ok = rep.cut_edges <= cut_thr and 2 * rep.max_piece_radius <= diam_thr
        rep = replace(
            rep, seed=cfg.seed, thresholds_met=ok, diam_threshold=diam_thr, cut_threshold=cut_thr
        )
    else:
        d, rep = partition(g, cfg, args.threads)

    _write(args.out, d.labels_text())
    doc = dict(rep.as_dict(), tiebreak=cfg.tiebreak)
    text = json.dumps(doc, indent=2) + "\n"
    if args.report:
        _write(args.report, text)
    else:
        sys.stdout.write(text)
    if not rep.thresholds_met:
        log.warning("thresholds not met after %d attempt(s); wrote best attempt", rep.retries)
        return EXIT_UNMET
    return EXIT_OK


def cmd_sweep(args) -> int:
    if not args.betas:
        raise UsageError("need at least one beta")
    if args.trials < 1:
        raise UsageError("--trials must be >= 1")
    if args.graph:
        g = _read_graph(args.graph)
        dims = (args.rows, args.cols) if args.rows and args.cols else None
    else:
        g = _graph_from_args(args)
        dims = (args.rows, args.cols) if args.kind == "grid" else None
    if args.render_dir and dims is None:
        raise UsageError("--render-dir needs a grid (use --kind grid or pass --rows/--cols)")
    try:
        stats = sweep(g, args.betas, args.trials, args.seed, args.tiebreak, threads=args.threads)
    except ValueError as e:
        raise UsageError(str(e)) from None
    _write(args.out, stats.to_csv())
    if args.render_dir:
        os.makedirs(args.render_dir, exist_ok=True)
        for beta, d in stats.examples.items():
            svg = render_grid_svg(dims[0], dims[1], d.owner)
            _write(os.path.join(args.render_dir, f"beta_{beta:g}.svg"), svg)
    for k, v in stats.monotonicity().items():
        log.info("%s: %s", k, v)
    return EXIT_OK


def cmd_render(args) -> int:
    if args.rows < 1 or args.cols < 1:
        raise UsageError("grid dimensions must be positive")
    owner = read_labels(args.labels)
    if len(owner) != args.rows * args.cols:
        raise UsageError(f"{len(owner)} labels for a {args.rows}x{args.cols} grid")
    _write(args.out, render_grid_svg(args.rows, args.cols, owner, cell=args.cell))
    return EXIT_OK


def cmd_validate(args) -> int:
    g = _read_graph(args.graph)
    owner = read_labels(args.labels, g.n)
    try:
        cfg = RunConfig(
            beta=args.beta, diam_threshold=args.diam_threshold, cut_threshold=args.cut_threshold
        )
    except ValueError as e:
        raise UsageError(str(e)) from None
    diam_thr, cut_thr = cfg.thresholds(g)
    rep = validate(g, Decomposition(owner), args.beta, diam_thr, cut_thr, args.exact_limit)
    print(f"is_partition {rep.is_partition}")
    print(f"pieces_connected {rep.pieces_connected}")
    print(f"cut_edges {rep.cut_edges}")
    print(f"cut_fraction {rep.cut_fraction!r}")
    print(f"max_strong_diameter {rep.max_strong_diameter!r}")
    print(f"diameter_exact {rep.diameter_exact}")
    print(f"pass_cut {rep.pass_cut}")
    print(f"pass_diam {rep.pass_diam}")
    for v in rep.violations:
        print(f"violation: {v}")
    return EXIT_OK if rep.ok else EXIT_INVALID


# -- parser -------------------------------------------------------------------


def _add_kind_args(p: argparse.ArgumentParser, required: bool) -> None:
    p.add_argument("--kind", choices=["grid", "path", "complete", "gnp"], required=required)
    p.add_argument("--rows", type=int)
    p.add_argument("--cols", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--p", type=float)
    p.add_argument("--graph-seed", type=_seed, default=0, help="seed for gnp")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="shiftdecomp", description="Low-diameter decomposition by exponential shifts"
    )
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="write a generated graph as an edge list")
    _add_kind_args(p, required=True)
    p.add_argument("-o", "--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("partition", help="decompose a graph")
    p.add_argument("graph")
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--tiebreak", choices=["fractional", "permutation"], default="fractional")
    p.add_argument("--max-retries", type=int, default=10)
    p.add_argument("--diam-threshold", type=float)
    p.add_argument("--cut-threshold", type=float)
    p.add_argument("--shifts-file", help="explicit '<vertex> <delta>' shifts; skips sampling")
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("-o", "--out", required=True, help="labels output")
    p.add_argument("--report", help="report output (default stdout)")
    p.set_defaults(func=cmd_partition)

    p = sub.add_parser("sweep", help="Monte Carlo sweep over beta, CSV output")
    p.add_argument("--graph", help="edge-list file (alternative to --kind)")
    _add_kind_args(p, required=False)
    p.add_argument("--betas", type=_betas, default=list(SWEEP_BETAS))
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--tiebreak", choices=["fractional", "permutation"], default="fractional")
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--render-dir", help="write one SVG per beta (grid graphs only)")
    p.add_argument("-o", "--out", required=True)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("render", help="SVG of a grid decomposition")
    p.add_argument("--rows", type=int, required=True)
    p.add_argument("--cols", type=int, required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--cell", type=int, default=4)
    p.add_argument("-o", "--out", required=True)
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("validate", help="check labels against the decomposition definition")
    p.add_argument("graph")
    p.add_argument("labels")
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--diam-threshold", type=float)
    p.add_argument("--cut-threshold", type=float)
    p.add_argument("--exact-limit", type=int, default=5000)
    p.set_defaults(func=cmd_validate)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(message)s",
    )
    if args.command == "sweep" and not args.graph and not args.kind:
        print("shiftdecomp sweep: need --graph or --kind", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as e:
        print(f"shiftdecomp {args.command}: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
