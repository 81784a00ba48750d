"""Lower-star filtrations of the well function and their persistence diagrams."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from . import kernels
from .errors import SizeLimitError
from .mesh import SampledMap, as_target, refine, require_generic

INF = math.inf
BOTTLENECK_SMALL_LIMIT = 12


class Cell(NamedTuple):
    id: int
    dim: int
    value: float
    boundary: tuple[int, ...]


@dataclass(frozen=True)
class Filtration:
    cells: tuple[Cell, ...]

    def __post_init__(self):
        seen = {}
        prev = -INF
        for c in self.cells:
            if c.value < prev:
                raise ValueError("filtration values must be non-decreasing")
            prev = c.value
            for b in c.boundary:
                if b not in seen:
                    raise ValueError(f"boundary cell {b} of cell {c.id} does not precede it")
                if seen[b] != c.dim - 1:
                    raise ValueError(f"cell {c.id}: boundary cell {b} has wrong dimension")
            if c.dim > 0 and not c.boundary:
                raise ValueError(f"cell {c.id} of dimension {c.dim} has empty boundary")
            if c.id in seen:
                raise ValueError(f"duplicate cell id {c.id}")
            seen[c.id] = c.dim

    def __len__(self):
        return len(self.cells)


class PersistencePair(NamedTuple):
    dim: int
    birth: float
    death: float

    @property
    def persistence(self) -> float:
        return self.death - self.birth


@dataclass(frozen=True)
class PersistenceDiagram:
    """Multiset of birth-death pairs; diagonal points are implicit."""

    pairs: tuple[PersistencePair, ...]

    def __post_init__(self):
        for p in self.pairs:
            if p.dim < 0 or not p.birth <= p.death:
                raise ValueError(f"invalid pair {p}")
        object.__setattr__(self, "pairs", tuple(sorted(self.pairs)))

    def off_diagonal(self, dim: int | None = None) -> list[PersistencePair]:
        return [p for p in self.pairs if p.death > p.birth and (dim is None or p.dim == dim)]

    def essential(self, dim: int | None = None) -> list[PersistencePair]:
        return [p for p in self.pairs if p.death == INF and (dim is None or p.dim == dim)]

    def same_points(self, other: "PersistenceDiagram") -> bool:
        return self.off_diagonal() == other.off_diagonal()

    def to_json(self, include_diagonal: bool = False) -> list[dict]:
        pts = self.pairs if include_diagonal else self.off_diagonal()
        return [{"dim": p.dim, "birth": p.birth,
                 "death": "inf" if p.death == INF else p.death} for p in pts]

    @classmethod
    def from_json(cls, data: Sequence[dict]) -> "PersistenceDiagram":
        out = []
        for d in data:
            death = d["death"]
            death = INF if death == "inf" else float(death)
            out.append(PersistencePair(int(d["dim"]), float(d["birth"]), death))
        return cls(tuple(out))


# ----------------------------------------------------------------- filtrations

def lower_star_filtration(fmap: SampledMap, vertex_values) -> Filtration:
    """Every cell enters at the maximum of its vertex values.

    Ties are broken by dimension, then cell id, so the order is deterministic.
    Cell ids: vertices ``0..nv-1``, then edges, then triangles.
    """
    w = np.asarray(vertex_values, dtype=float)
    nv = fmap.n_vertices
    if w.shape != (nv,):
        raise ValueError("need one value per vertex")
    entries = [(float(w[v]), 0, v, ()) for v in range(nv)]
    edges = fmap.edges()
    edge_id = {}
    for k, (u, v) in enumerate(edges.tolist()):
        cid = nv + k
        edge_id[(u, v)] = cid
        entries.append((float(max(w[u], w[v])), 1, cid, (u, v)))
    if fmap.dim == 2:
        base = nv + len(edges)
        for k, tri in enumerate(fmap.cells.tolist()):
            a, b, c = sorted(tri)
            bd = (edge_id[(a, b)], edge_id[(b, c)], edge_id[(a, c)])
            entries.append((float(max(w[a], w[b], w[c])), 2, base + k, bd))
    entries.sort(key=lambda e: (e[0], e[1], e[2]))
    return Filtration(tuple(Cell(cid, dim, val, bd) for val, dim, cid, bd in entries))


def well_values(refined: SampledMap, a) -> np.ndarray:
    a = as_target(a, refined.codomain_dim)
    w = np.linalg.norm(refined.values - a, axis=1)
    w[refined.zero_mask] = 0.0
    return w


def sublevel_filtration(fmap: SampledMap, a, *, jitter: bool = False) -> Filtration:
    """Lower-star filtration of ``x -> |f(x) - a|`` on the zero-refined mesh."""
    fmap = require_generic(fmap, a, jitter=jitter)
    refined = refine(fmap, a)
    return lower_star_filtration(refined, well_values(refined, a))


# ------------------------------------------------------------------- reduction

def reduce(filt: Filtration) -> PersistenceDiagram:
    """Standard column reduction over Z/2; unpaired cells never die."""
    pos = {c.id: k for k, c in enumerate(filt.cells)}
    ptr = [0]
    idx: list[int] = []
    for c in filt.cells:
        try:
            idx.extend(pos[b] for b in c.boundary)
        except KeyError as exc:
            raise ValueError(f"malformed boundary in cell {c.id}") from exc
        ptr.append(len(idx))
    low = kernels.reduce_columns(np.array(ptr, dtype=np.int64), np.array(idx, dtype=np.int64))
    cells = filt.cells
    paired = np.zeros(len(cells), dtype=bool)
    pairs = []
    for j, i in enumerate(low.tolist()):
        if i >= 0:
            paired[i] = paired[j] = True
            pairs.append(PersistencePair(cells[i].dim, cells[i].value, cells[j].value))
    for k, c in enumerate(cells):
        if not paired[k]:
            pairs.append(PersistencePair(c.dim, c.value, INF))
    return PersistenceDiagram(tuple(pairs))


def persistence_diagram(fmap: SampledMap, a, *, jitter: bool = False) -> PersistenceDiagram:
    return reduce(sublevel_filtration(fmap, a, jitter=jitter))


def critical_values(d: PersistenceDiagram) -> list[float]:
    """Distinct finite birth and death values of the off-diagonal points."""
    vals = set()
    for p in d.off_diagonal():
        vals.add(p.birth)
        if p.death != INF:
            vals.add(p.death)
    return sorted(vals)


# ---------------------------------------------------------- bottleneck oracle

def _linf(p, q) -> float:
    db = abs(p[0] - q[0])
    if p[1] == INF and q[1] == INF:
        dd = 0.0
    elif p[1] == INF or q[1] == INF:
        return INF
    else:
        dd = abs(p[1] - q[1])
    return max(db, dd)


def _to_diag(p) -> float:
    return INF if p[1] == INF else (p[1] - p[0]) / 2.0


def _perfect_matching(cost: np.ndarray, eps: float) -> bool:
    n = cost.shape[0]
    allowed = [np.flatnonzero(cost[i] <= eps).tolist() for i in range(n)]
    match_r = [-1] * n

    def augment(i, seen):
        for j in allowed[i]:
            if not seen[j]:
                seen[j] = True
                if match_r[j] < 0 or augment(match_r[j], seen):
                    match_r[j] = i
                    return True
        return False

    return all(augment(i, [False] * n) for i in range(n))


def _bottleneck_points(a: list, b: list) -> float:
    n, m = len(a), len(b)
    size = n + m
    if size == 0:
        return 0.0
    cost = np.zeros((size, size))
    for i in range(size):
        for j in range(size):
            if i < n and j < m:
                cost[i, j] = _linf(a[i], b[j])
            elif i < n:
                cost[i, j] = _to_diag(a[i]) if j - m == i else INF
            elif j < m:
                cost[i, j] = _to_diag(b[j]) if i - n == j else INF
            else:
                cost[i, j] = 0.0
    cands = np.unique(cost[np.isfinite(cost)])
    lo, hi = 0, len(cands) - 1
    if hi < 0 or not _perfect_matching(cost, cands[hi]):
        return INF
    while lo < hi:
        mid = (lo + hi) // 2
        if _perfect_matching(cost, cands[mid]):
            hi = mid
        else:
            lo = mid + 1
    return float(cands[lo])


def bottleneck_small(d1: PersistenceDiagram, d2: PersistenceDiagram, *,
                     per_dimension: bool = True) -> float:
    """Exact L-infinity bottleneck distance for small diagrams.

    Threshold search over candidate edge lengths with a perfect-matching test
    on the diagonal-augmented bipartite graph.  Limited to
    ``BOTTLENECK_SMALL_LIMIT`` off-diagonal points per diagram.
    """
    p1, p2 = d1.off_diagonal(), d2.off_diagonal()
    if max(len(p1), len(p2)) > BOTTLENECK_SMALL_LIMIT:
        raise SizeLimitError(
            f"bottleneck_small handles at most {BOTTLENECK_SMALL_LIMIT} off-diagonal points")
    if not per_dimension:
        return _bottleneck_points([(p.birth, p.death) for p in p1],
                                  [(p.birth, p.death) for p in p2])
    dims = {p.dim for p in p1} | {p.dim for p in p2}
    return max((_bottleneck_points([(p.birth, p.death) for p in p1 if p.dim == k],
                                   [(p.birth, p.death) for p in p2 if p.dim == k])
                for k in dims), default=0.0)
