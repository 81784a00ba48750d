"""Fixed points, periodic orbits and robustness fields over target grids.

A fixed point of a self-map ``b`` of a box is a zero of ``x - b(x)``.  Outside
the box ``b`` is continued by clamping the argument onto the box; if ``b``
maps the box into itself, ``x - b(x)`` then never vanishes outside and its
sublevel sets retract onto their parts in the box, so touching the box
boundary no longer makes a class killable.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import NonGenericError
from .mesh import (Interval1D, SampledMap, TriangulatedRect, as_target, build_map,
                   build_map_on_points, evaluate)
from .wellcore import (WellDiagram, ZeroRobustness, build_well_module, components_at,
                       robustness, well_diagram, well_function)

INF = math.inf


@dataclass(frozen=True)
class FixedPointProblem:
    b: SampledMap
    extension: str = "clamped"

    def __post_init__(self):
        if self.b.codomain_dim != self.b.dim:
            raise ValueError("a fixed-point problem needs a self-map")
        if self.extension not in ("clamped", "none"):
            raise ValueError(f"unknown extension {self.extension!r}")

    @property
    def box(self):
        return self.b.domain

    @property
    def self_map_violation(self) -> float:
        """Largest distance of a value of ``b`` from the box (0 for a self-map)."""
        v = self.b.values
        clamped = self.box.clamp(v[:, 0] if self.b.dim == 1 else v)
        clamped = np.asarray(clamped).reshape(v.shape)
        return float(np.max(np.linalg.norm(v - clamped, axis=1)))

    @property
    def extended(self) -> bool:
        return self.extension == "clamped" and self.self_map_violation == 0.0

    def difference_map(self) -> SampledMap:
        pts = self.b.points.reshape(self.b.n_vertices, -1)
        return _with_values(self.b, pts - self.b.values)


def _with_values(m: SampledMap, vals) -> SampledMap:
    if m.dim == 1 and not m.structured:
        return build_map_on_points(m.domain, m.points, vals)
    return build_map(m.domain, vals)


@dataclass(frozen=True)
class FixedPointResult:
    diagram: WellDiagram
    points: tuple[ZeroRobustness, ...]
    extended: bool
    self_map_violation: float
    notes: tuple[str, ...] = ()

    def to_json(self) -> dict:
        return {"diagram": self.diagram.to_json(),
                "points": [{"position": list(p.position), "index": p.index,
                            "robustness": "inf" if p.value == INF else p.value,
                            "boundary_limited": p.boundary_limited} for p in self.points],
                "extended": self.extended,
                "self_map_violation": self.self_map_violation,
                "notes": list(self.notes)}


def fixed_point_robustness(p: FixedPointProblem, *, jitter: bool = False) -> FixedPointResult:
    notes = []
    if p.self_map_violation > 0:
        notes.append("b leaves the box; boundary contact treated as killing")
    f = p.difference_map()
    w = well_function(f, np.zeros(f.codomain_dim), jitter=jitter, extended=p.extended)
    diag = well_diagram(build_well_module(w))
    return FixedPointResult(diag, tuple(robustness(w)), p.extended, p.self_map_violation,
                            tuple(notes))


# ------------------------------------------------------------------- orbits

def compose_pl_1d(outer: SampledMap, inner: SampledMap) -> SampledMap:
    """Exact PL composite ``outer(clamp(inner(x)))`` on the union of breakpoints."""
    xs, vs = inner.points, inner.values[:, 0]
    knots = outer.points
    lo, hi = outer.domain.lo, outer.domain.hi
    out_x = [xs[0]]
    for k in range(len(xs) - 1):
        v0, v1 = vs[k], vs[k + 1]
        if v0 != v1:
            a, b = sorted((v0, v1))
            inner_knots = knots[(knots > a) & (knots < b)]
            s = (inner_knots - v0) / (v1 - v0)
            out_x.extend(np.sort(xs[k] + s * (xs[k + 1] - xs[k])))
        out_x.append(xs[k + 1])
    out_x = np.unique(np.asarray(out_x))
    inner_v = np.interp(out_x, xs, vs)
    val = np.interp(np.clip(inner_v, lo, hi), knots, outer.values[:, 0])
    return build_map_on_points(inner.domain, out_x, val)


def iterate_map(b: SampledMap, j: int) -> SampledMap:
    """``b`` composed with itself ``j`` times: exact in 1-D, resampled in 2-D
    on a mesh refined by a factor of ``4 j``."""
    if j < 1:
        raise ValueError("j must be a positive integer")
    if b.dim == 1:
        out = b
        for _ in range(j - 1):
            out = compose_pl_1d(b, out)
        return out
    d = b.domain
    fine = TriangulatedRect(d.x_lo, d.x_hi, d.y_lo, d.y_hi,
                            (d.nx - 1) * 4 * j + 1, (d.ny - 1) * 4 * j + 1)
    x = fine.points()
    for _ in range(j):
        x = evaluate(b, x, clamp=True)
    return build_map(fine, x)


def orbit_basepoints(b: SampledMap, j: int, candidates, tol: float = 1e-9) -> np.ndarray:
    """Filter ``candidates`` to points returning to themselves after ``j``
    forward steps of ``b`` (direct iteration on the original mesh)."""
    pts = np.asarray(candidates, dtype=float)
    x = pts.copy()
    for _ in range(j):
        x = evaluate(b, x, clamp=True)
        if b.dim == 1:
            x = x[:, 0]
    err = np.abs(x - pts) if b.dim == 1 else np.linalg.norm(x - pts, axis=1)
    return pts[err <= tol * max(1.0, float(np.max(np.abs(pts), initial=0.0)))]


@dataclass(frozen=True)
class OrbitEstimate:
    """Composite-space estimate for one orbit basepoint."""

    position: tuple[float, ...]
    robustness: float          # unrestricted
    kill_radius: float | None  # smallest sampled ||h - b|| whose j-fold composite kills it
    kill_distance: float | None  # ||h^j - b^j|| for that h
    upper_bound: bool = True


@dataclass(frozen=True)
class OrbitResult:
    j: int
    mode: str
    result: FixedPointResult
    estimates: tuple[OrbitEstimate, ...] = field(default=())

    def to_json(self) -> dict:
        enc = lambda x: None if x is None else ("inf" if x == INF else x)  # noqa: E731
        out = {"j": self.j, "mode": self.mode, **self.result.to_json()}
        if self.mode == "composite-sampled":
            out["composite_upper_bounds"] = [
                {"position": list(e.position), "robustness": enc(e.robustness),
                 "kill_radius": enc(e.kill_radius), "kill_distance": enc(e.kill_distance),
                 "label": "upper bound (sampled)"} for e in self.estimates]
        return out


def orbit_robustness(p: FixedPointProblem, j: int, mode: str = "unrestricted",
                     samples: int = 8, seed: int = 0, *, jitter: bool = False,
                     steps: int = 20) -> OrbitResult:
    """Robustness of period-``j`` points as fixed points of the ``j``-fold iterate.

    ``mode="composite-sampled"`` (1-D) also draws perturbations ``h`` of ``b``
    (two constant shifts, a contraction, then uniform vertex noise) on a geometric grid of
    ``steps`` radii and records, per basepoint, the
    smallest radius at which some ``h^j`` loses every fixed point in the
    basepoint's component.  That radius is only an upper bound for the
    robustness against composite perturbations.
    """
    if mode not in ("unrestricted", "composite-sampled"):
        raise ValueError(f"unknown mode {mode!r}")
    bj = iterate_map(p.b, j)
    pj = FixedPointProblem(bj, p.extension)
    f = pj.difference_map()
    if np.all(f.values == 0.0):
        raise NonGenericError("degenerate iterate: every point is fixed", np.arange(f.n_vertices))
    res = fixed_point_robustness(pj, jitter=jitter)
    if mode == "unrestricted":
        return OrbitResult(j, mode, res)
    if p.b.dim != 1:
        raise ValueError("composite-sampled mode is implemented for 1-D maps")
    if samples < 1:
        raise ValueError("samples must be at least 1")
    return OrbitResult(j, mode, res, _composite_estimates(p, pj, j, res, samples, seed, steps))


def _composite_estimates(p, pj, j, res, samples, seed, steps):
    d = p.b.domain
    top = float(d.hi - d.lo)
    radii = np.geomspace(top * 1e-3, top, steps)
    f = pj.difference_map()
    wf = well_function(f, 0.0, extended=pj.extended)
    out = []
    for z in res.points:
        found = None
        for si, r in enumerate(radii):
            for s in range(samples):
                if s < 2:
                    # constant shifts are the cheapest way to unfold a fold
                    noise = np.full(p.b.values.shape, r if s == 0 else -r)
                elif s == 2:
                    # contraction toward the middle of the range flattens
                    # period-doubling cascades
                    dev = p.b.values - 0.5 * (p.b.values.max() + p.b.values.min())
                    noise = -dev * (r / max(float(np.max(np.abs(dev))), 1e-300))
                else:
                    rng = np.random.default_rng([seed, si, s])
                    noise = rng.uniform(-r, r, p.b.values.shape)
                h = build_map(d, np.clip(p.b.values + noise, d.lo, d.hi) if p.extended
                              else p.b.values + noise)
                hj = iterate_map(h, j)
                dist = _sup_between(hj, pj.b)
                if _kills(wf, hj, z.position[0], dist):
                    found = (float(np.max(np.abs(h.values - p.b.values))), dist)
                    break
            if found:
                break
        out.append(OrbitEstimate(z.position, z.value, *(found or (None, None))))
    return tuple(out)


def _sup_between(g1: SampledMap, g2: SampledMap) -> float:
    xs = np.union1d(g1.points, g2.points)
    return float(np.max(np.abs(np.interp(xs, g1.points, g1.values[:, 0])
                               - np.interp(xs, g2.points, g2.values[:, 0]))))


def _kills(wf, hj: SampledMap, x0: float, dist: float) -> bool:
    """True if ``x - h^j(x)`` has no zero in the component of ``{|F| <= dist}``
    containing ``x0`` (``F`` the unperturbed difference map)."""
    comps = components_at(wf, dist)
    xs = wf.mesh.points
    v0 = int(np.argmin(np.abs(xs - x0)))
    lab = np.full(len(xs), -1)
    for k, c in enumerate(comps):
        lab[list(c.members)] = k
    target = lab[v0]
    gx, gv = hj.points, hj.points - hj.values[:, 0]
    for k in range(len(gx) - 1):
        a, b = gv[k], gv[k + 1]
        if a == 0.0 or a * b < 0.0:
            x = gx[k] if a == 0.0 else gx[k] + a / (a - b) * (gx[k + 1] - gx[k])
        elif k == len(gx) - 2 and b == 0.0:
            x = gx[k + 1]
        else:
            continue
        e = int(np.clip(np.searchsorted(xs, x, side="right") - 1, 0, len(xs) - 2))
        v = min((e, e + 1), key=lambda q: wf.vertex_values[q])
        if lab[v] == target:
            return False
    return True


# ---------------------------------------------------------- contour field

@dataclass(frozen=True)
class ContourField:
    xs: np.ndarray
    ys: np.ndarray
    values: np.ndarray          # (len(ys), len(xs))
    boundary_limited: np.ndarray
    jittered: np.ndarray

    def __post_init__(self):
        if self.values.shape != (len(self.ys), len(self.xs)):
            raise ValueError("field values do not match the grid")

    def to_csv(self) -> str:
        lines = ["y\\x," + ",".join(_fmt(x) for x in self.xs)]
        for y, row in zip(self.ys, self.values):
            lines.append(_fmt(y) + "," + ",".join(_fmt(v) for v in row))
        return "\n".join(lines) + "\n"

    def to_json(self) -> dict:
        return {"xs": [float(x) for x in self.xs], "ys": [float(y) for y in self.ys],
                "values": [[_jsonnum(v) for v in row] for row in self.values],
                "boundary_limited": self.boundary_limited.tolist(),
                "jittered": self.jittered.tolist()}


def _fmt(v: float) -> str:
    return "inf" if v == INF else repr(float(v))


def _jsonnum(v: float):
    return "inf" if v == INF else float(v)


def field_value(fmap: SampledMap, a) -> tuple[float, bool, bool]:
    """Largest robustness over classes of the preimage of ``a``."""
    a = as_target(a, fmap.codomain_dim)
    try:
        w = well_function(fmap, a)
        jit = False
    except NonGenericError:
        w = well_function(fmap, a, jitter=True)
        jit = True
    diag = well_diagram(build_well_module(w))
    if not diag.points:
        return 0.0, False, jit
    top = diag.points[-1]
    flags = [p.flag for p in diag.points if p.value == top.value]
    return float(top.value), "boundary" in flags, jit


def contour_field(fmap: SampledMap, xs, ys, *, threads: int | None = None) -> ContourField:
    """Robustness field over the rectangular grid of targets ``xs`` by ``ys``."""
    if fmap.dim != 2 or fmap.codomain_dim != 2:
        raise ValueError("contour fields need a map from the plane to the plane")
    xs, ys = np.asarray(xs, float), np.asarray(ys, float)
    targets = [(x, y) for y in ys for x in xs]
    threads = threads or os.cpu_count() or 1
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            out = list(ex.map(lambda t: field_value(fmap, t), targets))
    else:
        out = [field_value(fmap, t) for t in targets]
    shape = (len(ys), len(xs))
    return ContourField(xs, ys,
                        np.array([o[0] for o in out]).reshape(shape),
                        np.array([o[1] for o in out]).reshape(shape),
                        np.array([o[2] for o in out]).reshape(shape))
