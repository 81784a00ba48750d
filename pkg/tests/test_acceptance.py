"""Acceptance gate.

Each criterion prints one ``PASS``/``FAIL`` line with its runtime.  Run on its
own with ``python tests/test_acceptance.py`` or through pytest.
"""
import io
import math
import sys
import time
from contextlib import redirect_stdout

import numpy as np
import pytest

from wellkit.applications import FixedPointProblem, fixed_point_robustness
from wellkit.cli import main as cli_main
from wellkit.cli import table1_ranks
from wellkit.fixtures import four_crossing_map, squaring_map
from wellkit.matching import brute_force_bottleneck, bottleneck
from wellkit.mesh import Interval1D, TriangulatedRect, build_map
from wellkit.oracles import clamp_kill_cost_2d, clamp_oracle_rank_1d, safe_radius_grid
from wellkit.stability import bridge_suite, distance_suite, shrinking_suite, stability_suite
from wellkit.wellcore import (build_well_module, components_at, well_diagram, well_function,
                              well_group_at, winding_number)

INF = math.inf


def c1_table():
    ok = True
    for a in (0.0, 0.37, -1.25):
        f_ranks, u_ranks = table1_ranks(a)
        ok &= f_ranks == [4, 3, 2, 1] and u_ranks == [4, 2, 2, 0]
    return ok, "F = 4 3 2 1, U = 4 2 2 0" if ok else f"got {f_ranks} {u_ranks}"


def c2_diagram():
    d = well_diagram(build_well_module(four_crossing_map(), 0.0))
    return d.as_pairs() == [(1.0, 2), (3.0, 2)], f"diagram {d.as_pairs()}"


def c3_brouwer():
    got = []
    b1 = build_map(Interval1D(-1.0, 1.0, 11), [0.3] * 11)
    b2 = build_map(TriangulatedRect(-1, 1, -1, 1, 9, 9), np.tile([0.3, -0.15], (81, 1)))
    for b in (b1, b2):
        got.append(fixed_point_robustness(FixedPointProblem(b)).diagram.as_pairs())
    return all(g == [(INF, 1)] for g in got), f"m=1 {got[0]}, m=2 {got[1]}"


def c4_matching(pairs=1200, seed=0):
    rng = np.random.default_rng(seed)
    mismatches = 0
    for _ in range(pairs):
        total = int(rng.integers(0, 9))
        k = int(rng.integers(0, total + 1))
        pts = np.where(rng.random(total) < 0.1, INF,
                       np.where(rng.random(total) < 0.3, rng.integers(1, 5, total),
                                rng.uniform(0.01, 4.0, total)))
        u, v = pts[:k].tolist(), pts[k:].tolist()
        if bottleneck(u, v).bottleneck != brute_force_bottleneck(u, v):
            mismatches += 1
    return mismatches == 0, f"{pairs} pairs, {mismatches} mismatches"


def _suite(fn, trials=500, seed=2024):
    rep = fn(trials, seed)
    return rep.violations == 0 and rep.trials >= trials, (
        f"{rep.trials} trials, {rep.violations} violations, worst slack {rep.worst_slack:.3g}")


def c7_oracle(instances=320, radii=50, seed=7):
    rng = np.random.default_rng(seed)
    mismatches = checked = 0
    for _ in range(instances):
        n = int(rng.integers(2, 13))
        fm = build_map(Interval1D(0.0, 1.0, n), rng.uniform(-1.0, 1.0, n))
        w = well_function(fm, 0.0)
        grid = safe_radius_grid(np.unique(w.vertex_values),
                                float(w.vertex_values.max()) * 1.1, radii, 1e-5)
        for r in grid:
            checked += 1
            if well_group_at(w, r=float(r)).rank != clamp_oracle_rank_1d(fm, 0.0, float(r)):
                mismatches += 1
    return mismatches == 0, f"{instances} instances x {radii} radii, {mismatches} mismatches"


def c8_winding():
    t = np.linspace(0.0, 2 * np.pi, 2000, endpoint=False)
    loop = np.column_stack([np.cos(t) ** 2 - np.sin(t) ** 2, 2 * np.cos(t) * np.sin(t)])
    deg = winding_number(loop)
    fm = squaring_map(20)
    a = (1e-3, 2e-3)
    w = well_function(fm, a)
    r = 0.05
    comps = [c for c in components_at(w, r) if w.mesh.zero_mask[list(c.members)].any()]
    ok = deg == 2 and len(comps) == 1 and comps[0].degree == 2 and comps[0].well
    z = w.mesh.points[np.flatnonzero(w.mesh.zero_mask)[0]]
    cost = clamp_kill_cost_2d(fm, a, r, z)
    ok &= cost > r
    return ok, f"loop degree {deg}, component degree {comps[0].degree}, clamp cost {cost:.3g} > {r}"


def c9_determinism():
    outs = []
    for argv in (["table1"], ["stability", "--trials", "60", "--seed", "7"]):
        runs = []
        for _ in range(2):
            buf = io.StringIO()
            with redirect_stdout(buf):
                code = cli_main(argv)
            runs.append((code, buf.getvalue().encode()))
        outs.append(runs[0] == runs[1] and runs[0][0] == 0 and runs[0][1])
    return all(outs), "table1 and stability byte-identical" if all(outs) else "outputs differ"


CRITERIA = [
    (1, "rank table", c1_table, 1.0),
    (2, "fixture well diagram", c2_diagram, 1.0),
    (3, "Brouwer constant maps", c3_brouwer, None),
    (4, "sorted matching vs brute force", c4_matching, 30.0),
    (5, "stability suite", lambda: _suite(stability_suite), 60.0),
    (6.1, "distance suite", lambda: _suite(distance_suite), 60.0),
    (6.2, "shrinking suite", lambda: _suite(shrinking_suite), 60.0),
    (6.3, "bridge suite", lambda: _suite(bridge_suite), 60.0),
    (7, "degree vs clamp oracle", c7_oracle, 60.0),
    (8, "winding number", c8_winding, 5.0),
    (9, "determinism", c9_determinism, None),
]


def evaluate(number, name, fn, limit):
    t0 = time.perf_counter()
    ok, detail = fn()
    dt = time.perf_counter() - t0
    timed_ok = limit is None or dt < limit
    status = "PASS" if ok and timed_ok else "FAIL"
    budget = f" / {limit:.0f}s" if limit else ""
    line = f"criterion {number}: {status}  {name}: {detail} ({dt:.2f}s{budget})"
    return ok and timed_ok, line


@pytest.mark.parametrize("number,name,fn,limit", CRITERIA, ids=[f"c{c[0]}" for c in CRITERIA])
def test_criterion(number, name, fn, limit, capsys):
    ok, line = evaluate(number, name, fn, limit)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


if __name__ == "__main__":
    results = [evaluate(*c) for c in CRITERIA]
    for _, line in results:
        print(line)
    sys.exit(0 if all(ok for ok, _ in results) else 1)
