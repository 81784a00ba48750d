"""Explicit perturbation oracles, independent of the degree machinery.

They work on the *unrefined* PL map and build concrete clamping
perturbations.  Used by the harness and tests to validate that nonzero
degree is exactly what makes a component survive every ``r``-perturbation.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .mesh import SampledMap, as_target

DELTA_REL = 1e-6


@dataclass(frozen=True)
class ClampComponent:
    lo: float
    hi: float
    has_zero: bool
    cost_up: float
    cost_down: float

    def killable(self, r: float, slack: float) -> bool:
        return min(self.cost_up, self.cost_down) <= r + slack


def _breakpoints(x: np.ndarray, v: np.ndarray, levels) -> tuple[np.ndarray, np.ndarray]:
    xs, vs = [x[0]], [v[0]]
    for k in range(len(x) - 1):
        x0, x1, v0, v1 = x[k], x[k + 1], v[k], v[k + 1]
        cuts = []
        for t in levels:
            if (v0 - t) * (v1 - t) < 0:
                s = (t - v0) / (v1 - v0)
                cuts.append((s, t))
        for s, t in sorted(cuts):
            xs.append(x0 + s * (x1 - x0))
            vs.append(t)
        xs.append(x1)
        vs.append(v1)
    return np.array(xs), np.array(vs)


def clamp_components_1d(fmap: SampledMap, a, r: float, delta: float | None = None):
    """Components of ``{|f - a| <= r}`` with the cost of the cheapest upward and
    downward clamp that empties each of them.

    The upward clamp replaces ``f`` by ``max(f, a + delta)`` on the smallest
    interval around the component whose ends already satisfy
    ``f >= a + delta`` (or sit on the domain boundary, where no continuity is
    needed); the downward clamp is symmetric.
    """
    if fmap.dim != 1:
        raise ValueError("1-D maps only")
    t = float(as_target(a, 1)[0])
    if delta is None:
        delta = DELTA_REL * max(fmap.value_range(), 1.0)
    x, v = _breakpoints(fmap.domain.points(), np.asarray(fmap.values[:, 0], float),
                        [t - r, t - delta, t, t + delta, t + r])
    d = v - t
    n = len(x)
    inside = np.abs(d) <= r * (1 + 1e-12) + 1e-300
    # a segment is in the sublevel set iff both ends are (PL between breakpoints)
    comps = []
    k = 0
    while k < n:
        if not inside[k]:
            k += 1
            continue
        j = k
        while j + 1 < n and inside[j + 1]:
            j += 1
        comps.append((k, j))
        k = j + 1
    out = []
    for k, j in comps:
        has_zero = bool(np.any(d[k:j + 1] == 0.0) or np.any(d[k:j] * d[k + 1:j + 1] < 0))
        out.append(ClampComponent(float(x[k]), float(x[j]), has_zero,
                                  _clamp_cost(d, k, j, delta, +1),
                                  _clamp_cost(d, k, j, delta, -1)))
    return out


def _clamp_cost(d: np.ndarray, k: int, j: int, delta: float, sign: int) -> float:
    s = sign * d
    lo = k
    while lo > 0 and s[lo] < delta:
        lo -= 1
    hi = j
    while hi < len(d) - 1 and s[hi] < delta:
        hi += 1
    return float(max(0.0, np.max(delta - s[lo:hi + 1])))


def clamp_oracle_rank_1d(fmap: SampledMap, a, r: float) -> int:
    """Number of sublevel components that no explicit clamp of cost ``<= r`` empties."""
    delta = DELTA_REL * max(fmap.value_range(), 1.0)
    comps = clamp_components_1d(fmap, a, r, delta)
    return sum(1 for c in comps if c.has_zero and not c.killable(r, delta))


def safe_radius_grid(critical, top: float, n: int, gap: float) -> np.ndarray:
    """``n`` radii in ``(0, top]`` kept at least ``gap`` away from ``critical``."""
    crit = np.sort(np.asarray(list(critical), dtype=float))
    grid = []
    for r in np.linspace(top / n, top, n):
        if len(crit):
            k = int(np.argmin(np.abs(crit - r)))
            if abs(crit[k] - r) < gap:
                nb = [c for c in crit if c > crit[k]]
                r = (crit[k] + nb[0]) / 2 if nb else crit[k] + max(gap, 1.0)
                if np.min(np.abs(crit - r)) < gap:
                    r = crit[k] + gap * 2
        grid.append(float(r))
    return np.array(grid)


# -------------------------------------------------------------------- 2-D

def _segment_dist(p, q) -> float:
    u = q - p
    den = float(u @ u)
    s = 0.0 if den == 0 else min(1.0, max(0.0, -float(p @ u) / den))
    return float(np.linalg.norm(p + s * u))


def _image_dist(tri: np.ndarray) -> float:
    """Distance from the origin to the filled triangle with vertices ``tri``."""
    p0, p1, p2 = tri
    m = np.column_stack([p1 - p0, p2 - p0])
    det = np.linalg.det(m)
    if det != 0:
        lam = np.linalg.solve(m, -p0)
        if lam[0] >= 0 and lam[1] >= 0 and lam.sum() <= 1:
            return 0.0
    return min(_segment_dist(p0, p1), _segment_dist(p1, p2), _segment_dist(p0, p2))


def triangles_near(fmap: SampledMap, a, r: float) -> np.ndarray:
    """Mask of mesh triangles whose image meets the closed ``r``-ball about ``a``."""
    a = as_target(a, 2)
    d = fmap.values[fmap.cells] - a
    return np.array([_image_dist(t) <= r for t in d])


def half_plane_clamp_cost(fmap: SampledMap, a, seed_vertices, theta: float,
                          delta: float) -> float:
    """Cost of pushing ``f - a`` into the half-plane ``<y, e_theta> >= delta``
    everywhere near ``seed_vertices`` with a PL bump that vanishes where the
    half-plane condition already holds."""
    a = as_target(a, 2)
    e = np.array([np.cos(theta), np.sin(theta)])
    s = (fmap.values - a) @ e
    ptr, idx = _adjacency(fmap)
    seen = np.zeros(fmap.n_vertices, dtype=bool)
    stack = [v for v in seed_vertices if s[v] < delta]
    for v in stack:
        seen[v] = True
    cost = 0.0
    while stack:
        v = stack.pop()
        cost = max(cost, delta - s[v])
        for u in idx[ptr[v]:ptr[v + 1]]:
            if not seen[u] and s[u] < delta:
                seen[u] = True
                stack.append(u)
    return float(cost)


def _adjacency(fmap: SampledMap):
    e = fmap.edges()
    src = np.concatenate([e[:, 0], e[:, 1]])
    dst = np.concatenate([e[:, 1], e[:, 0]])
    order = np.argsort(src, kind="stable")
    ptr = np.zeros(fmap.n_vertices + 1, dtype=np.int64)
    np.add.at(ptr, src + 1, 1)
    return np.cumsum(ptr), dst[order]


def clamp_kill_cost_2d(fmap: SampledMap, a, r: float, point, n_directions: int = 64) -> float:
    """Cheapest half-plane clamp (over ``n_directions`` angles) that empties the
    component of ``{|f - a| <= r}`` containing ``point``; components are
    unions of mesh triangles whose image meets the ``r``-ball, joined through
    shared vertices."""
    near = triangles_near(fmap, a, r)
    tris = fmap.cells
    point = np.asarray(point, float)
    # triangle containing the point
    start = None
    for t in np.flatnonzero(near):
        p = fmap.points[tris[t]]
        m = np.column_stack([p[1] - p[0], p[2] - p[0]])
        lam = np.linalg.solve(m, point - p[0])
        if lam.min() >= -1e-12 and lam.sum() <= 1 + 1e-12:
            start = t
            break
    if start is None:
        return 0.0
    by_vertex: dict[int, list[int]] = {}
    for t in np.flatnonzero(near):
        for v in tris[t]:
            by_vertex.setdefault(int(v), []).append(int(t))
    comp, stack = {start}, [start]
    while stack:
        t = stack.pop()
        for v in tris[t]:
            for t2 in by_vertex[int(v)]:
                if t2 not in comp:
                    comp.add(t2)
                    stack.append(t2)
    seeds = sorted({int(v) for t in comp for v in tris[t]})
    delta = DELTA_REL * max(fmap.value_range(), 1.0)
    return min(half_plane_clamp_cost(fmap, a, seeds, th, delta)
               for th in np.linspace(0, 2 * np.pi, n_directions, endpoint=False))
