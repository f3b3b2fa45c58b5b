"""Command line interface: one JSON report per run."""
from __future__ import annotations

import argparse
import json
import os
import sys

from . import __version__
from .errors import CrosskitError

SCHEMA_VERSION = 1


def _unit_interval(text):
    try:
        x = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not 0 < x <= 1:
        raise argparse.ArgumentTypeError("must lie in (0, 1]")
    return x


def _positive_int(text):
    try:
        x = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if x < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return x


def _default_threads():
    try:
        return max(1, int(os.environ.get("CROSSKIT_THREADS", "1")))
    except ValueError:
        return 1


def _read_graph(path):
    from .graph import parse_graph
    if path == "-":
        return parse_graph(sys.stdin.read())
    with open(path, encoding="utf-8") as fh:
        return parse_graph(fh.read())


def _write(path, text):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


# -- subcommands ---------------------------------------------------------------


def cmd_estimate(a):
    from .pipeline import estimate_cr
    G = _read_graph(a.input)
    r = estimate_cr(G, a.eps, max_classes=a.max_classes, min_classes=a.min_classes,
                    max_nodes=a.budget, time_limit=a.time_limit, seed=a.seed, restarts=a.restarts)
    return r.to_dict()


def cmd_draw(a):
    from .drawing.svg import render_svg
    from .pipeline import draw_cr
    G = _read_graph(a.input)
    D, r = draw_cr(G, a.eps, q=a.q, max_classes=a.max_classes, min_classes=a.min_classes,
                   max_nodes=a.budget, time_limit=a.time_limit, seed=a.seed, restarts=a.restarts)
    out = r.to_dict()
    if not a.trace:
        out.pop("trace", None)
    out["drawing"] = D.to_dict()
    if a.svg:
        _write(a.svg, render_svg(D))
    return out


def cmd_exact(a):
    from .drawing.svg import render_svg
    from .exact import crossing_number_exact
    G = _read_graph(a.input)
    s = crossing_number_exact(G, max_nodes=a.budget, time_limit=a.time_limit, seed=a.seed,
                              restarts=a.restarts)
    out = s.to_dict()
    if hasattr(s.drawing, "to_dict"):
        out["drawing"] = s.drawing.to_dict()
    if a.svg:
        _write(a.svg, render_svg(s.drawing))
    return out


def cmd_cutnorm(a):
    from .cutnorm import cut_distance
    G1, G2 = _read_graph(a.first), _read_graph(a.second)
    return cut_distance(G1, G2, limit=a.exact_limit, restarts=a.restarts, seed=a.seed).to_dict()


def cmd_regularity(a):
    from .cutnorm import fk_partition
    G = _read_graph(a.input)
    return fk_partition(G, a.eps, max_classes=a.max_classes, seed=a.seed, limit=a.exact_limit,
                        restarts=a.restarts).to_dict()


def cmd_sylvester(a):
    from .graphon import region_by_name, sylvester_convex_probability
    R = region_by_name(a.region, a.params)
    p, rad = sylvester_convex_probability(R, a.samples, a.seed, threads=a.threads)
    return {"region": a.region, "params": a.params, "samples": a.samples, "estimate": p,
            "radius": rad, "level": 0.99}


def cmd_cdbounds(a):
    from .graphon import cd_sandwich, constant_graphon, step_from_graph
    if (a.input is None) == (a.constant is None):
        raise CrosskitError("give either an input graph or --constant")
    W = step_from_graph(_read_graph(a.input)) if a.input else constant_graphon(a.constant)
    out = cd_sandwich(W, a.refinement, max_nodes=a.budget, time_limit=a.time_limit, seed=a.seed).to_dict()
    out["graphon"] = W.to_dict()
    return out


def cmd_recupper(a):
    from .graphon import rectilinear_density_upper, region_by_name
    from math import comb
    R = region_by_name(a.region, a.params)
    best, pts, hist = rectilinear_density_upper(a.n, a.samples, a.seed, R)
    return {"n": a.n, "samples": a.samples, "best": best, "density": best / comb(a.n, 4),
            "points": pts.tolist(), "history": hist}


def cmd_probe(a):
    from .pipeline import estimability_probe
    G = _read_graph(a.input)
    return estimability_probe(G, a.k, a.trials, a.seed, epsilon=a.eps, min_classes=a.min_classes,
                              restarts=a.restarts)


# -- parser ---------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    common.add_argument("--out", default=None, help="write the JSON report here instead of stdout")
    common.add_argument("--threads", type=_positive_int, default=_default_threads(),
                        help="worker threads (default $CROSSKIT_THREADS or 1)")

    budget = argparse.ArgumentParser(add_help=False)
    budget.add_argument("--budget", type=_positive_int, default=500_000, help="search node limit")
    budget.add_argument("--time-limit", type=float, default=120.0, help="solver time limit in seconds")
    budget.add_argument("--restarts", type=_positive_int, default=20, help="heuristic restarts")

    part = argparse.ArgumentParser(add_help=False)
    part.add_argument("--eps", type=_unit_interval, default=0.25, help="regularity target in (0, 1]")
    part.add_argument("--max-classes", type=_positive_int, default=256, help="class budget")
    part.add_argument("--min-classes", type=_positive_int, default=6, help="split to at least this many classes")

    p = argparse.ArgumentParser(prog="crosskit", description="Crossing number estimation and drawing tools.")
    p.add_argument("--version", action="version", version=f"crosskit {__version__}")
    sub = p.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    s = sub.add_parser("estimate", parents=[common, budget, part], help="estimate cr through a regular partition")
    s.add_argument("input", help="graph file ('-' for stdin)")
    s.set_defaults(func=cmd_estimate)

    s = sub.add_parser("draw", parents=[common, budget, part], help="build a drawing from the estimate")
    s.add_argument("input", help="graph file ('-' for stdin)")
    s.add_argument("--q", type=_positive_int, default=10, help="weight rounding resolution 1/q")
    s.add_argument("--svg", default=None, help="write an SVG picture here")
    s.add_argument("--trace", action="store_true", help="include the transfer trace")
    s.set_defaults(func=cmd_draw)

    s = sub.add_parser("exact", parents=[common, budget], help="exact crossing number of a small graph")
    s.add_argument("input", help="graph file ('-' for stdin)")
    s.add_argument("--svg", default=None, help="write an SVG picture here")
    s.set_defaults(func=cmd_exact)

    s = sub.add_parser("cutnorm", parents=[common], help="labelled cut distance of two graphs")
    s.add_argument("first", help="first graph file")
    s.add_argument("second", help="second graph file")
    s.add_argument("--exact-limit", type=int, default=24, help="largest n solved exactly")
    s.add_argument("--restarts", type=_positive_int, default=20, help="heuristic restarts")
    s.set_defaults(func=cmd_cutnorm)

    s = sub.add_parser("regularity", parents=[common], help="Frieze-Kannan partition")
    s.add_argument("input", help="graph file ('-' for stdin)")
    s.add_argument("--eps", type=_unit_interval, default=0.25, help="target defect in (0, 1]")
    s.add_argument("--max-classes", type=_positive_int, default=256, help="class budget")
    s.add_argument("--exact-limit", type=int, default=24, help="largest n certified exactly")
    s.add_argument("--restarts", type=_positive_int, default=20, help="heuristic restarts")
    s.set_defaults(func=cmd_regularity)

    s = sub.add_parser("sylvester", parents=[common], help="four-point convex position probability")
    s.add_argument("--region", default="square", help="square, disk, triangle, annulus or boxes")
    s.add_argument("--params", type=float, nargs="*", default=[], help="region parameters")
    s.add_argument("--samples", type=_positive_int, default=1_000_000, help="number of 4-point samples")
    s.set_defaults(func=cmd_sylvester)

    s = sub.add_parser("cdbounds", parents=[common], help="crossing density bounds of a step graphon")
    s.add_argument("input", nargs="?", default=None, help="graph whose step graphon is used")
    s.add_argument("--constant", type=float, default=None, help="use the constant graphon with this value")
    s.add_argument("--refinement", type=_positive_int, default=1, help="parts per block")
    s.add_argument("--budget", type=_positive_int, default=500_000, help="search node limit")
    s.add_argument("--time-limit", type=float, default=120.0, help="solver time limit in seconds")
    s.set_defaults(func=cmd_cdbounds)

    s = sub.add_parser("recupper", parents=[common], help="rectilinear crossing upper bound for K_n")
    s.add_argument("--n", type=int, required=True, help="number of points (at least 4)")
    s.add_argument("--samples", type=_positive_int, default=100_000, help="number of point sets")
    s.add_argument("--region", default="square", help="sampling region")
    s.add_argument("--params", type=float, nargs="*", default=[], help="region parameters")
    s.set_defaults(func=cmd_recupper)

    s = sub.add_parser("probe", parents=[common], help="estimates on random induced subgraphs")
    s.add_argument("input", help="graph file ('-' for stdin)")
    s.add_argument("--k", type=_positive_int, required=True, help="sample size")
    s.add_argument("--trials", type=_positive_int, default=20, help="number of samples")
    s.add_argument("--eps", type=_unit_interval, default=0.25, help="regularity target in (0, 1]")
    s.add_argument("--min-classes", type=_positive_int, default=6, help="split to at least this many classes")
    s.add_argument("--restarts", type=_positive_int, default=10, help="heuristic restarts")
    s.set_defaults(func=cmd_probe)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        a = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        result = a.func(a)
    except (CrosskitError, ValueError, OSError) as exc:
        print(f"crosskit {a.command}: error: {exc}", file=sys.stderr)
        return 1
    config = {k: v for k, v in sorted(vars(a).items()) if k not in ("func", "out", "threads")}
    doc = {"schema_version": SCHEMA_VERSION, "command": a.command, "config": config, "result": result}
    _write(a.out, json.dumps(doc, indent=2, sort_keys=True, default=str) + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
