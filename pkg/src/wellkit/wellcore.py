"""Well functions, well groups, well modules and well diagrams.

Perturbations are all continuous maps with the sup-norm, so the well
function is ``w(x) = |f(x) - a|`` and a sublevel component is *well* (cannot
be emptied by an ``r``-perturbation) exactly when its integer degree is
nonzero and it stays clear of the domain boundary.  With ``extended=True``
the map is taken to continue outside the box without new zeros or merges
(the clamped fixed-point extension), so boundary contact no longer kills.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Union

import numpy as np

from . import kernels
from .errors import BoundaryContactError, ConsistencyError
from .linalg_z2 import BitMatrix, Subspace, intersect, kernel, preimage, push, quotient_basis
from .linalg_z2 import rank as z2rank
from .linalg_z2 import solve
from .mesh import SampledMap, as_target, refine, require_generic
from .persistence import well_values

INF = math.inf


@dataclass(frozen=True, eq=False)
class WellFunction:
    mesh: SampledMap          # zero-refined
    vertex_values: np.ndarray
    target: np.ndarray
    extended: bool = False

    @cached_property
    def edges(self) -> np.ndarray:
        return self.mesh.edges()

    @cached_property
    def adjacency(self) -> tuple[np.ndarray, np.ndarray]:
        n = self.mesh.n_vertices
        e = self.edges
        src = np.concatenate([e[:, 0], e[:, 1]])
        dst = np.concatenate([e[:, 1], e[:, 0]])
        order = np.lexsort((dst, src))
        src, dst = src[order], dst[order]
        ptr = np.zeros(n + 1, dtype=np.int64)
        np.add.at(ptr, src + 1, 1)
        return np.cumsum(ptr), dst.astype(np.int64)

    @cached_property
    def sweep(self) -> "Sweep":
        order = np.lexsort((np.arange(self.mesh.n_vertices), self.vertex_values))
        ptr, idx = self.adjacency
        vals, ncomp, nwell, bdeath, exits = kernels.sweep(
            order.astype(np.int64), self.vertex_values, ptr, idx,
            self.mesh.zero_index.astype(np.int64), self.mesh.boundary.astype(np.uint8),
            bool(self.extended))
        return Sweep(vals, ncomp, nwell, bdeath, exits)

    @property
    def zeros(self) -> np.ndarray:
        """Zero vertex ids, ordered by position (x, then y)."""
        z = np.flatnonzero(self.mesh.zero_mask)
        pts = self.mesh.points[z]
        if pts.ndim == 1:
            return z[np.argsort(pts, kind="stable")]
        return z[np.lexsort((pts[:, 1], pts[:, 0]))]


@dataclass(frozen=True)
class Sweep:
    values: np.ndarray        # distinct vertex well values, ascending
    n_components: np.ndarray  # rank F after each value
    well_rank: np.ndarray     # rank U after each value
    boundary_death: np.ndarray
    exits: np.ndarray         # per vertex; first non-well radius of a zero

    def rank_at(self, r: float) -> int:
        k = np.searchsorted(self.values, r, side="right") - 1
        return 0 if k < 0 else int(self.well_rank[k])

    def components_at(self, r: float) -> int:
        k = np.searchsorted(self.values, r, side="right") - 1
        return 0 if k < 0 else int(self.n_components[k])


@dataclass(frozen=True)
class ComponentSnapshot:
    radius: float
    members: tuple[int, ...]
    boundary_data: tuple
    degree: int | None
    touches_domain_boundary: bool
    well: bool


@dataclass(frozen=True)
class WellGroupSnapshot:
    radius: float
    components: tuple[ComponentSnapshot, ...]
    well_basis: Subspace
    labels: np.ndarray = field(repr=False, compare=False)

    @property
    def rank(self) -> int:
        return self.well_basis.rank

    @property
    def homology_rank(self) -> int:
        return len(self.components)

    @property
    def flagged(self) -> list[int]:
        """Components excluded because they reach the domain boundary."""
        return [k for k, c in enumerate(self.components) if c.touches_domain_boundary]


MapLike = Union[SampledMap, WellFunction]


def well_function(fmap: SampledMap, a, *, jitter: bool = False,
                  extended: bool = False) -> WellFunction:
    """Refine ``fmap`` so zeros of ``f - a`` are vertices; store ``|f - a|`` per vertex."""
    if fmap.dim != fmap.codomain_dim:
        raise ValueError("well groups need equal domain and codomain dimension")
    a = as_target(a, fmap.codomain_dim)
    fmap = require_generic(fmap, a, jitter=jitter)
    refined = refine(fmap, a)
    w = well_values(refined, a)
    w.setflags(write=False)
    return WellFunction(refined, w, a, bool(extended))


def _wf(fmap: MapLike, a=None, jitter: bool = False, extended: bool = False) -> WellFunction:
    if isinstance(fmap, WellFunction):
        return fmap
    return well_function(fmap, a, jitter=jitter, extended=extended)


# ------------------------------------------------------------------ degrees

def _crossing(p, q) -> int:
    """Signed crossing of the segment p->q with the positive x-ray from 0."""
    c = p[0] * q[1] - p[1] * q[0]
    if p[1] <= 0.0:
        if q[1] > 0.0 and c > 0.0:
            return 1
    elif q[1] <= 0.0 and c < 0.0:
        return -1
    return 0


def winding_number(loop) -> int:
    """Winding number about the origin of a closed polygon (last point joins first)."""
    pts = np.asarray(loop, dtype=float)
    total = 0
    for k in range(len(pts)):
        total += _crossing(pts[k], pts[(k + 1) % len(pts)])
    return total


def segments_winding(segments) -> int:
    """Sum of signed ray crossings over directed segments forming closed cycles."""
    return sum(_crossing(p, q) for p, q in segments)


def _boundary_1d(mesh: SampledMap, a, members, extended):
    lo, hi = min(members), max(members)
    d = mesh.values[:, 0] - a[0]
    n = mesh.n_vertices
    left = None if lo == 0 else int(np.sign(d[lo - 1]))
    right = None if hi == n - 1 else int(np.sign(d[hi + 1]))
    if extended:
        if left is None:
            left = int(np.sign(d[0]))
        if right is None:
            right = int(np.sign(d[n - 1]))
    return (left, right)


def _boundary_2d(mesh: SampledMap, members) -> tuple:
    inside = np.zeros(mesh.n_vertices, dtype=bool)
    inside[list(members)] = True
    tris = mesh.cells[inside[mesh.cells].any(axis=1)]
    p = mesh.points[tris]
    orient = np.sign((p[:, 1, 0] - p[:, 0, 0]) * (p[:, 2, 1] - p[:, 0, 1])
                     - (p[:, 1, 1] - p[:, 0, 1]) * (p[:, 2, 0] - p[:, 0, 0]))
    tris = np.where(orient[:, None] > 0, tris, tris[:, [0, 2, 1]])
    directed = set()
    for a_, b_, c_ in tris.tolist():
        directed.update(((a_, b_), (b_, c_), (c_, a_)))
    return tuple(sorted(e for e in directed if (e[1], e[0]) not in directed))


def local_degree(fmap: MapLike, a, c: ComponentSnapshot, *, extended: bool | None = None) -> int:
    """Integer degree of ``f - a`` on the component ``c``.

    1-D: half the difference of the signs just outside the right and left
    ends.  2-D: winding number of ``f - a`` along the oriented boundary of the
    component's closed star, by signed crossings of the positive x-ray.
    """
    if isinstance(fmap, WellFunction):
        mesh, a, ext = fmap.mesh, fmap.target, fmap.extended
    else:
        mesh, ext = fmap, False
        a = as_target(a, mesh.codomain_dim)
    if extended is not None:
        ext = extended
    if c.touches_domain_boundary and not ext:
        raise BoundaryContactError("component reaches the domain boundary; degree undefined")
    if mesh.dim == 1:
        left, right = c.boundary_data
        if left is None or right is None:
            left, right = _boundary_1d(mesh, a, c.members, True)
        return (right - left) // 2
    d = mesh.values - a
    return segments_winding((d[u], d[v]) for u, v in c.boundary_data)


def components_at(w: WellFunction, r: float) -> list[ComponentSnapshot]:
    """Components of the lower-star sublevel complex ``{w <= r}`` with degrees."""
    if r < 0:
        r = 0.0
    labels = kernels.label_components((w.vertex_values <= r).astype(np.uint8),
                                      w.edges[:, 0], w.edges[:, 1])
    _, comps = _group_labels(labels)
    out = []
    for members in comps:
        touches = bool(w.mesh.boundary[list(members)].any())
        if w.mesh.dim == 1:
            bdata = _boundary_1d(w.mesh, w.target, members, w.extended)
        else:
            bdata = _boundary_2d(w.mesh, members)
        snap = ComponentSnapshot(r, members, bdata, None, touches, False)
        if touches and not w.extended:
            deg = None
        else:
            deg = local_degree(w, None, snap)
        out.append(ComponentSnapshot(r, members, bdata, deg, touches,
                                     deg is not None and deg != 0))
    return out


def _group_labels(labels: np.ndarray):
    k = int(labels.max()) + 1 if len(labels) and labels.max() >= 0 else 0
    groups = [[] for _ in range(k)]
    for v, lab in enumerate(labels.tolist()):
        if lab >= 0:
            groups[lab].append(v)
    return k, [tuple(g) for g in groups]


def well_group_at(fmap: MapLike, a=None, r: float = 0.0, *, jitter: bool = False,
                  extended: bool = False) -> WellGroupSnapshot:
    w = _wf(fmap, a, jitter, extended)
    comps = components_at(w, r)
    labels = kernels.label_components((w.vertex_values <= max(r, 0.0)).astype(np.uint8),
                                      w.edges[:, 0], w.edges[:, 1])
    basis = tuple(1 << k for k, c in enumerate(comps) if c.well)
    return WellGroupSnapshot(float(r), tuple(comps), Subspace(len(comps), basis), labels)


def inclusion_matrix(src: WellGroupSnapshot, dst: WellGroupSnapshot) -> BitMatrix:
    """Map on H_0 induced by ``{w <= src.radius} -> {w <= dst.radius}``."""
    if dst.radius < src.radius:
        raise ValueError("inclusion goes from smaller to larger radius")
    cols = []
    for c in src.components:
        cols.append(1 << int(dst.labels[c.members[0]]))
    return BitMatrix.from_columns(cols, len(dst.components))


def terminal_critical_values(fmap: MapLike, a=None, *, jitter: bool = False,
                             extended: bool = False, method: str = "sweep") -> list[float]:
    """Radii at which the well rank drops.

    ``method="sweep"`` reads the incremental degree-tracking sweep;
    ``method="resample"`` re-evaluates :func:`well_group_at` between
    consecutive events (vertex well values) and is kept as a cross-check.
    """
    w = _wf(fmap, a, jitter, extended)
    if method == "sweep":
        s = w.sweep
        out = [float(s.values[k]) for k in range(1, len(s.values))
               if s.well_rank[k] < s.well_rank[k - 1]]
        return out
    if method != "resample":
        raise ValueError(f"unknown method {method!r}")
    events = np.unique(w.vertex_values)
    ranks = [well_group_at(w, r=float(e)).rank for e in events]
    return [float(events[k]) for k in range(1, len(events)) if ranks[k] < ranks[k - 1]]


# ---------------------------------------------------------------- the module

@dataclass(frozen=True)
class WellModule:
    terminal_values: tuple[float, ...]
    radii: tuple[float, ...]
    groups: tuple[WellGroupSnapshot, ...]
    homology_maps: tuple[BitMatrix, ...]   # f_{i,i+1}; the last maps into the zero sentinel
    vanishing: tuple[Subspace, ...]        # K_i in F_i
    quotient_reps: tuple[tuple[int, ...], ...]
    forward: tuple[BitMatrix, ...]         # a_i : U_i -> Q_i in basis coordinates
    backward: tuple[BitMatrix, ...]        # b_i : U_{i+1} -> Q_i, i < l
    boundary_flags: tuple[bool, ...]       # per terminal value
    extended: bool = False

    @property
    def l(self) -> int:
        return len(self.terminal_values)

    @property
    def ranks(self) -> tuple[int, ...]:
        return tuple(g.rank for g in self.groups)

    @property
    def quotient_ranks(self) -> tuple[int, ...]:
        return tuple(len(q) for q in self.quotient_reps)

    def multiplicity(self, i: int) -> int:
        """Number of classes falling ill at ``u_i`` (1-based), from ker a + coker b."""
        ker_a = self.vanishing[i - 1].rank
        coker_b = len(self.quotient_reps[i - 1]) - (
            z2rank(self.backward[i - 1]) if i - 1 < len(self.backward) else 0)
        return ker_a + coker_b


def _coords_in(basis: list[int], v: int) -> int:
    m = BitMatrix.from_columns(basis, max([b.bit_length() for b in basis + [v]] + [0]))
    x = solve(m, v)
    if x is None:
        raise ConsistencyError("vector outside the expected span")
    return x


def _basis_matrix(vectors: list[int], coords_basis: list[int], offset: int, rows: int) -> BitMatrix:
    cols = [_coords_in(coords_basis, v) >> offset for v in vectors]
    return BitMatrix.from_columns(cols, rows)


def build_well_module(fmap: MapLike, a=None, *, jitter: bool = False,
                      extended: bool = False) -> WellModule:
    w = _wf(fmap, a, jitter, extended)
    us = terminal_critical_values(w)
    l = len(us)
    if l == 0:
        radii = [0.0]
    else:
        radii = [us[0] / 2.0] + [(us[i] + us[i + 1]) / 2.0 for i in range(l - 1)] + [us[-1] + 1.0]
    groups = [well_group_at(w, r=r) for r in radii]
    fmaps, ks, qs, fwd, bwd = [], [], [], [], []
    for i, g in enumerate(groups):
        if i < l:
            f = inclusion_matrix(g, groups[i + 1])
        else:
            f = BitMatrix.zeros(0, g.homology_rank)
        fmaps.append(f)
        k_i = intersect(g.well_basis, kernel(f))
        reps = quotient_basis(g.well_basis, k_i)
        ks.append(k_i)
        qs.append(tuple(reps))
        lb = list(k_i.basis) + reps
        fwd.append(_basis_matrix(list(g.well_basis.basis), lb, k_i.rank, len(reps)))
        if i < l:
            nxt = groups[i + 1].well_basis
            fu = f @ g.well_basis.as_matrix()
            cols = []
            for eta in nxt.basis:
                xi = solve(fu, eta)
                if xi is None:
                    raise ConsistencyError(
                        f"well group at r={radii[i + 1]} is not in the image of r={radii[i]}")
                cols.append(_coords_in(lb, g.well_basis.combine(xi)) >> k_i.rank)
            bwd.append(BitMatrix.from_columns(cols, len(reps)))
    s = w.sweep
    flags = tuple(bool(s.boundary_death[np.searchsorted(s.values, u)]) for u in us)
    mod = WellModule(tuple(us), tuple(radii), tuple(groups), tuple(fmaps), tuple(ks),
                     tuple(qs), tuple(fwd), tuple(bwd), flags, w.extended)
    for i in range(len(groups)):
        if z2rank(mod.forward[i]) != mod.forward[i].rows:
            raise ConsistencyError(f"forward map a_{i} is not surjective")
    for i, b in enumerate(mod.backward):
        if z2rank(b) != b.cols:
            raise ConsistencyError(f"backward map b_{i} is not injective")
    return mod


# ----------------------------------------------------------- left filtration

@dataclass(frozen=True)
class BasisVector:
    coords: int        # in the basis of U_0
    kind: str          # "ker" (conventional death) or "coker" (unconventional)
    index: int         # i of ker a_i / coker b_i
    robustness: float  # u_{i+1}


@dataclass(frozen=True)
class LeftFiltration:
    A: tuple[Subspace, ...]
    B: tuple[Subspace, ...]
    compatible_basis: tuple[BasisVector, ...]

    @property
    def ranks(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        return tuple(s.rank for s in self.A), tuple(s.rank for s in self.B)


def _to_u0(module: WellModule, i: int) -> BitMatrix:
    """``u_{0,i}``: U_0 basis coordinates -> F_i."""
    m = module.groups[0].well_basis.as_matrix()
    for k in range(i):
        m = module.homology_maps[k] @ m
    return m


def left_filtration(module: WellModule) -> LeftFiltration:
    """Nested preimages of well groups and vanishing subgroups inside U_0.

    ``B_i`` keeps the classes whose images stay in the well groups at every
    sampled radius up to ``r_i``; ``A_i`` those among them that map into the
    vanishing subgroup ``K_i``.
    """
    n0 = module.groups[0].rank
    l = module.l
    A, B = [], []
    prev_b = Subspace.full(n0)
    for i, g in enumerate(module.groups):
        u = _to_u0(module, i)
        b_i = intersect(prev_b, preimage(u, g.well_basis))
        a_i = intersect(b_i, preimage(u, module.vanishing[i]))
        A.append(a_i)
        B.append(b_i)
        prev_b = b_i
    for i in range(1, len(A)):
        if not A[i].contains(A[i - 1]):
            raise ConsistencyError(f"A_{i - 1} is not contained in A_{i}")
    if A[l] != B[l]:
        raise ConsistencyError("A_l differs from B_l")
    for i, g in enumerate(module.groups):
        lower = A[i - 1].rank if i > 0 else 0
        if B[i].rank - lower != g.rank:
            raise ConsistencyError(f"rank recovery fails at U_{i}")
    us = list(module.terminal_values) + [INF]
    basis: list[BasisVector] = []
    acc = Subspace.zero(n0)
    for i in range(l + 1):
        for v in quotient_basis(A[i], acc):
            basis.append(BasisVector(v, "ker", i, us[i]))
            acc = Subspace(n0, acc.basis + (v,))
    for i in range(l - 1, -1, -1):
        for v in quotient_basis(B[i], B[i + 1]):
            basis.append(BasisVector(v, "coker", i, us[i]))
            acc = Subspace(n0, acc.basis + (v,))
    if acc.rank != n0:
        raise ConsistencyError("compatible basis does not span U_0")
    return LeftFiltration(tuple(A), tuple(B), tuple(basis))


def class_robustness(lf: LeftFiltration, coords: int) -> float:
    """Robustness of a class of U_0 (basis coordinates) via the compatible basis:
    the largest robustness among the basis vectors it uses."""
    vecs = [b.coords for b in lf.compatible_basis]
    n = max([v.bit_length() for v in vecs + [coords]] + [0])
    x = solve(BitMatrix.from_columns(vecs, n), coords)
    if x is None:
        raise ValueError("vector not in U_0")
    used = [b.robustness for k, b in enumerate(lf.compatible_basis) if (x >> k) & 1]
    return max(used, default=0.0)


# ---------------------------------------------------------------- diagrams

@dataclass(frozen=True)
class DiagramPoint:
    value: float
    multiplicity: int
    flag: str = "interior"


@dataclass(frozen=True)
class WellDiagram:
    """Non-zero points with multiplicities; infinitely many zeros are implicit."""

    points: tuple[DiagramPoint, ...]
    rank_at_zero: int

    def __post_init__(self):
        merged: dict[tuple[float, str], int] = {}
        for p in self.points:
            if p.multiplicity <= 0:
                raise ValueError("multiplicities must be positive")
            if not p.value > 0:
                raise ValueError("diagram points must be positive (zeros are implicit)")
            merged[(p.value, p.flag)] = merged.get((p.value, p.flag), 0) + p.multiplicity
        pts = tuple(DiagramPoint(v, m, f) for (v, f), m in sorted(merged.items()))
        object.__setattr__(self, "points", pts)

    def values(self) -> list[float]:
        """The multiset expanded into a sorted list."""
        out = []
        for p in self.points:
            out.extend([p.value] * p.multiplicity)
        return sorted(out)

    @property
    def mass(self) -> int:
        return sum(p.multiplicity for p in self.points)

    def as_pairs(self) -> list[tuple[float, int]]:
        agg: dict[float, int] = {}
        for p in self.points:
            agg[p.value] = agg.get(p.value, 0) + p.multiplicity
        return sorted(agg.items())

    def to_json(self) -> dict:
        return {"points": [{"value": "inf" if p.value == INF else p.value,
                            "multiplicity": p.multiplicity, "flag": p.flag}
                           for p in self.points],
                "rank_at_zero": self.rank_at_zero}

    @classmethod
    def from_json(cls, data: dict) -> "WellDiagram":
        pts = []
        for p in data["points"]:
            v = p["value"]
            v = INF if v == "inf" else float(v)
            pts.append(DiagramPoint(v, int(p["multiplicity"]), p.get("flag", "interior")))
        rank0 = int(data.get("rank_at_zero", sum(p.multiplicity for p in pts)))
        return cls(tuple(pts), rank0)

    @classmethod
    def from_values(cls, values) -> "WellDiagram":
        vals = [float(v) for v in values if v != 0]
        return cls(tuple(DiagramPoint(v, 1) for v in vals), len(vals))


def well_diagram(module: WellModule) -> WellDiagram:
    pts = []
    for i in range(1, module.l + 1):
        mu = module.multiplicity(i)
        if mu:
            flag = "boundary" if module.boundary_flags[i - 1] else "interior"
            pts.append(DiagramPoint(module.terminal_values[i - 1], mu, flag))
    last = module.groups[-1].rank
    if last:
        pts.append(DiagramPoint(INF, last))
    return WellDiagram(tuple(pts), module.groups[0].rank)


def compute_well_diagram(fmap: MapLike, a=None, *, jitter: bool = False,
                         extended: bool = False) -> WellDiagram:
    return well_diagram(build_well_module(fmap, a, jitter=jitter, extended=extended))


def sweep_diagram(fmap: MapLike, a=None, *, jitter: bool = False,
                  extended: bool = False) -> WellDiagram:
    """Well diagram read straight from the sweep's rank drops (no module)."""
    w = _wf(fmap, a, jitter, extended)
    s = w.sweep
    pts = []
    for k in range(1, len(s.values)):
        drop = int(s.well_rank[k - 1] - s.well_rank[k])
        if drop > 0:
            pts.append(DiagramPoint(float(s.values[k]), drop,
                                    "boundary" if s.boundary_death[k] else "interior"))
    rank0 = int(s.well_rank[0]) if len(s.values) and s.values[0] == 0.0 else 0
    tail = int(s.well_rank[-1]) if len(s.values) else 0
    if tail:
        pts.append(DiagramPoint(INF, tail))
    return WellDiagram(tuple(pts), rank0)


@dataclass(frozen=True)
class ZeroRobustness:
    vertex: int
    position: tuple[float, ...]
    index: int
    value: float
    boundary_limited: bool


def robustness(fmap: MapLike, a=None, *, jitter: bool = False,
               extended: bool = False) -> list[ZeroRobustness]:
    """Robustness of each zero of ``f - a``: the first radius at which the image
    of its class leaves the well group (``inf`` if it never does)."""
    w = _wf(fmap, a, jitter, extended)
    s = w.sweep
    out = []
    for z in w.zeros:
        val = float(s.exits[z])
        limited = False
        if val != INF:
            k = int(np.searchsorted(s.values, val))
            limited = bool(s.boundary_death[k])
        pos = tuple(float(c) for c in np.atleast_1d(w.mesh.points[z]))
        out.append(ZeroRobustness(int(z), pos, int(w.mesh.zero_index[z]), val, limited))
    return out
