"""``wellkit`` command line.

Exit codes: 0 ok, 1 property violation, 2 parse error, 3 non-generic input,
4 size limit exceeded.
"""
from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import applications, render, stability
from .errors import NonGenericError, SizeLimitError
from .fixtures import CROSSING_RADII, four_crossing_map
from .io import ParseError, dumps, load_diagram, load_map
from .matching import bottleneck
from .persistence import PersistenceDiagram, bottleneck_small, persistence_diagram
from .wellcore import (WellDiagram, build_well_module, robustness, well_diagram, well_function,
                       well_group_at)

EXIT_OK, EXIT_VIOLATION, EXIT_PARSE, EXIT_NONGENERIC, EXIT_SIZE = 0, 1, 2, 3, 4


@dataclass
class RunConfig:
    command: str
    inputs: tuple[str, ...]
    a: object
    jitter: bool
    seed: int
    fmt: str
    output: str | None
    threads: int


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_PARSE, f"{self.prog}: error: {message}\n")


def _target(text, default=None):
    if text is None:
        return default
    if isinstance(text, (int, float, list)):
        return text
    try:
        parts = [float(t) for t in str(text).split(",")]
    except ValueError as exc:
        raise ParseError(f"bad target {text!r}") from exc
    return parts[0] if len(parts) == 1 else parts


def _grid(text: str):
    try:
        axes = []
        for part in text.split(","):
            lo, hi, n = part.split(":")
            axes.append(np.linspace(float(lo), float(hi), int(n)))
    except ValueError as exc:
        raise ParseError(f"bad grid {text!r}; expected x0:x1:nx,y0:y1:ny") from exc
    if len(axes) != 2:
        raise ParseError("grid needs two axes")
    return axes


def _emit(cfg: RunConfig, text: str):
    if cfg.output:
        Path(cfg.output).write_text(text)
    else:
        sys.stdout.write(text)


def _map_and_target(cfg: RunConfig):
    fmap, stored = load_map(cfg.inputs[0])
    a = _target(cfg.a, None)
    if a is None:
        a = _target(stored, 0.0 if fmap.codomain_dim == 1 else [0.0, 0.0])
    return fmap, a


# ------------------------------------------------------------------ commands

def cmd_well_diagram(cfg: RunConfig, extended: bool = False) -> int:
    fmap, a = _map_and_target(cfg)
    d = well_diagram(build_well_module(fmap, a, jitter=cfg.jitter, extended=extended))
    _emit(cfg, render.well_diagram_svg(d) if cfg.fmt == "svg" else dumps(d.to_json()))
    return EXIT_OK


def cmd_persistence(cfg: RunConfig) -> int:
    fmap, a = _map_and_target(cfg)
    d = persistence_diagram(fmap, a, jitter=cfg.jitter)
    _emit(cfg, render.persistence_svg(d) if cfg.fmt == "svg" else dumps(d.to_json()))
    return EXIT_OK


def cmd_bottleneck(cfg: RunConfig) -> int:
    d1, d2 = (load_diagram(p) for p in cfg.inputs)
    if isinstance(d1, WellDiagram) and isinstance(d2, WellDiagram):
        out = bottleneck(d1, d2).to_json()
    elif isinstance(d1, PersistenceDiagram) and isinstance(d2, PersistenceDiagram):
        out = {"bottleneck": bottleneck_small(d1, d2)}
    else:
        raise ParseError("both inputs must be diagrams of the same kind")
    _emit(cfg, dumps(out))
    return EXIT_OK


def cmd_robustness(cfg: RunConfig, fixed_points: bool, orbit: int | None, mode: str,
                   samples: int) -> int:
    if fixed_points or orbit:
        fmap, _ = load_map(cfg.inputs[0])
        prob = applications.FixedPointProblem(fmap)
        if orbit:
            res = applications.orbit_robustness(prob, orbit, mode, samples, cfg.seed,
                                                jitter=cfg.jitter)
            payload = res.to_json()
            rows = res.result.points
            diag = res.result.diagram
        else:
            res = applications.fixed_point_robustness(prob, jitter=cfg.jitter)
            payload, rows, diag = res.to_json(), res.points, res.diagram
    else:
        fmap, a = _map_and_target(cfg)
        w = well_function(fmap, a, jitter=cfg.jitter)
        rows = robustness(w)
        diag = well_diagram(build_well_module(w))
        payload = {"diagram": diag.to_json(),
                   "points": [{"position": list(p.position), "index": p.index,
                               "robustness": p.value,
                               "boundary_limited": p.boundary_limited} for p in rows]}
    if cfg.fmt == "csv":
        lines = ["position,index,robustness,boundary_limited"]
        for p in rows:
            pos = " ".join(repr(c) for c in p.position)
            val = "inf" if p.value == float("inf") else repr(p.value)
            lines.append(f"{pos},{p.index},{val},{str(p.boundary_limited).lower()}")
        _emit(cfg, "\n".join(lines) + "\n")
    elif cfg.fmt == "svg":
        _emit(cfg, render.well_diagram_svg(diag))
    else:
        _emit(cfg, dumps(payload))
    return EXIT_OK


def cmd_stability(cfg: RunConfig, trials: int, suite: str) -> int:
    names = list(stability.SUITES) if suite == "all" else [suite]
    reports = {n: stability.SUITES[n](trials, cfg.seed) for n in names}
    total = sum(r.violations for r in reports.values())
    payload = {"seed": cfg.seed, "trials": trials, "violations": total,
               "suites": {n: r.to_json() for n, r in reports.items()}}
    if cfg.fmt == "text":
        lines = [f"{n}: trials {r.trials} violations {r.violations} "
                 f"worst_slack {r.worst_slack:.6g}" for n, r in reports.items()]
        lines.append(f"violations: {total}")
        _emit(cfg, "\n".join(lines) + "\n")
    else:
        _emit(cfg, dumps(payload))
    return EXIT_VIOLATION if total else EXIT_OK


def cmd_contour_field(cfg: RunConfig, grid: str) -> int:
    fmap, _ = load_map(cfg.inputs[0])
    xs, ys = _grid(grid)
    field = applications.contour_field(fmap, xs, ys, threads=cfg.threads)
    if cfg.fmt == "svg":
        _emit(cfg, render.heatmap_svg(field.values, xs, ys))
    elif cfg.fmt == "json":
        _emit(cfg, dumps(field.to_json()))
    else:
        _emit(cfg, field.to_csv())
    return EXIT_OK


def table1_ranks(a: float = 0.0) -> tuple[list[int], list[int]]:
    w = well_function(four_crossing_map(a), a)
    snaps = [well_group_at(w, r=r) for r in CROSSING_RADII]
    return [s.homology_rank for s in snaps], [s.rank for s in snaps]


def cmd_table1(cfg: RunConfig) -> int:
    a = float(_target(cfg.a, 0.0))
    f_ranks, u_ranks = table1_ranks(a)
    if cfg.fmt == "json":
        _emit(cfg, dumps({"intervals": ["(0,1)", "(1,2)", "(2,3)", "(3,inf)"],
                          "F": f_ranks, "U": u_ranks}))
    else:
        _emit(cfg, "radius  (0,1) (1,2) (2,3) (3,inf)\n"
                   f"F: {' '.join(map(str, f_ranks))}\n"
                   f"U: {' '.join(map(str, u_ranks))}\n")
    return EXIT_OK


# -------------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--a", help="target point, e.g. 0 or 0.1,-0.2")
    common.add_argument("--jitter", action="store_true",
                        help="perturb degenerate vertex values instead of failing")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--threads", type=int, default=0, help="worker threads (0: all cores)")
    common.add_argument("-o", "--output")

    p = _Parser(prog="wellkit", description="Robustness of zeros and fixed points of PL maps.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("well-diagram", parents=[common], help="well diagram of f against a")
    s.add_argument("input")
    s.add_argument("--extended", action="store_true",
                   help="boundary contact does not kill classes")
    s.add_argument("--format", dest="fmt", choices=["json", "svg"], default="json")

    s = sub.add_parser("persistence", parents=[common], help="sublevel persistence of |f - a|")
    s.add_argument("input")
    s.add_argument("--format", dest="fmt", choices=["json", "svg"], default="json")

    s = sub.add_parser("bottleneck", parents=[common], help="distance between two diagram files")
    s.add_argument("inputs", nargs=2)
    s.set_defaults(fmt="json")

    s = sub.add_parser("robustness", parents=[common], help="per-point robustness")
    s.add_argument("input")
    g = s.add_mutually_exclusive_group()
    g.add_argument("--fixed-points", action="store_true")
    g.add_argument("--orbit", type=int, metavar="J")
    s.add_argument("--mode", choices=["unrestricted", "composite-sampled"], default="unrestricted")
    s.add_argument("--samples", type=int, default=8)
    s.add_argument("--format", dest="fmt", choices=["json", "csv", "svg"], default="json")

    s = sub.add_parser("stability", parents=[common], help="randomized property suites")
    s.add_argument("--trials", type=int, default=500)
    s.add_argument("--suite", choices=["all", *stability.SUITES], default="all")
    s.add_argument("--format", dest="fmt", choices=["json", "text"], default="text")

    s = sub.add_parser("contour-field", parents=[common], help="robustness over a grid of targets")
    s.add_argument("input")
    s.add_argument("--grid", required=True, help="x0:x1:nx,y0:y1:ny")
    s.add_argument("--format", dest="fmt", choices=["csv", "json", "svg"], default="csv")

    s = sub.add_parser("table1", parents=[common], help="rank table of the four-crossing example")
    s.add_argument("--format", dest="fmt", choices=["text", "json"], default="text")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    seed = args.seed
    env = os.environ.get("WELLKIT_SEED")
    if env:
        try:
            seed = int(env)
        except ValueError:
            print(f"wellkit: error: WELLKIT_SEED must be an integer, got {env!r}", file=sys.stderr)
            return EXIT_PARSE
    inputs = tuple(getattr(args, "inputs", None) or
                   ([args.input] if getattr(args, "input", None) else []))
    cfg = RunConfig(args.command, inputs, args.a, args.jitter, seed, args.fmt, args.output,
                    args.threads or os.cpu_count() or 1)
    try:
        if args.command == "well-diagram":
            return cmd_well_diagram(cfg, args.extended)
        if args.command == "persistence":
            return cmd_persistence(cfg)
        if args.command == "bottleneck":
            return cmd_bottleneck(cfg)
        if args.command == "robustness":
            return cmd_robustness(cfg, args.fixed_points, args.orbit, args.mode, args.samples)
        if args.command == "stability":
            return cmd_stability(cfg, args.trials, args.suite)
        if args.command == "contour-field":
            return cmd_contour_field(cfg, args.grid)
        return cmd_table1(cfg)
    except ParseError as exc:
        print(f"wellkit: error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except NonGenericError as exc:
        print(f"wellkit: error: {exc}", file=sys.stderr)
        return EXIT_NONGENERIC
    except SizeLimitError as exc:
        print(f"wellkit: error: {exc}", file=sys.stderr)
        return EXIT_SIZE
    except ValueError as exc:
        print(f"wellkit: error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
