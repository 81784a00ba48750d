"""Sampled piecewise-linear domains and maps.

A :class:`SampledMap` stores one value vector per vertex of a 1-D interval
mesh or a triangulated rectangle and is interpreted as the piecewise-linear
interpolant over edges or triangles.  Maps are immutable; refinement and
jitter return new maps.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .errors import NonGenericError

# Relative size of the deterministic jitter applied to degenerate vertices.
JITTER_SCALE = 1e-9
GOLDEN_ANGLE = np.pi * (3.0 - np.sqrt(5.0))


@dataclass(frozen=True)
class Interval1D:
    lo: float
    hi: float
    n: int

    def __post_init__(self):
        if not (np.isfinite(self.lo) and np.isfinite(self.hi)):
            raise ValueError("interval bounds must be finite")
        if not self.lo < self.hi:
            raise ValueError(f"need lo < hi, got lo={self.lo}, hi={self.hi}")
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f"need at least 2 samples, got n={self.n}")

    dim = 1

    @property
    def n_vertices(self) -> int:
        return int(self.n)

    def points(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, int(self.n))

    def cells(self) -> np.ndarray:
        k = np.arange(int(self.n) - 1)
        return np.stack([k, k + 1], axis=1)

    def boundary_mask(self) -> np.ndarray:
        mask = np.zeros(int(self.n), dtype=bool)
        mask[[0, -1]] = True
        return mask

    def contains(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return (x >= self.lo) & (x <= self.hi)

    def clamp(self, x) -> np.ndarray:
        return np.clip(np.asarray(x, dtype=float), self.lo, self.hi)

    def to_json(self) -> dict:
        return {"kind": "interval", "lo": self.lo, "hi": self.hi, "n": int(self.n)}


@dataclass(frozen=True)
class TriangulatedRect:
    """Regular grid on a rectangle, each cell cut along its lower-left to
    upper-right diagonal.  Vertex ``(i, j)`` has index ``j * nx + i``."""

    x_lo: float
    x_hi: float
    y_lo: float
    y_hi: float
    nx: int
    ny: int

    def __post_init__(self):
        bounds = (self.x_lo, self.x_hi, self.y_lo, self.y_hi)
        if not all(np.isfinite(b) for b in bounds):
            raise ValueError("rectangle bounds must be finite")
        if not (self.x_lo < self.x_hi and self.y_lo < self.y_hi):
            raise ValueError("need x_lo < x_hi and y_lo < y_hi")
        for name in ("nx", "ny"):
            v = getattr(self, name)
            if int(v) != v or v < 2:
                raise ValueError(f"need {name} >= 2, got {v}")

    dim = 2

    @property
    def n_vertices(self) -> int:
        return int(self.nx) * int(self.ny)

    @property
    def spacing(self) -> tuple[float, float]:
        return ((self.x_hi - self.x_lo) / (self.nx - 1), (self.y_hi - self.y_lo) / (self.ny - 1))

    def points(self) -> np.ndarray:
        xs = np.linspace(self.x_lo, self.x_hi, int(self.nx))
        ys = np.linspace(self.y_lo, self.y_hi, int(self.ny))
        gx, gy = np.meshgrid(xs, ys)
        return np.stack([gx.ravel(), gy.ravel()], axis=1)

    def cells(self) -> np.ndarray:
        nx, ny = int(self.nx), int(self.ny)
        i, j = np.meshgrid(np.arange(nx - 1), np.arange(ny - 1))
        ll = (j * nx + i).ravel()
        lr, ul = ll + 1, ll + nx
        ur = ul + 1
        lower = np.stack([ll, lr, ur], axis=1)
        upper = np.stack([ll, ur, ul], axis=1)
        # interleave so triangles of one cell are adjacent: 2c, 2c+1
        tris = np.empty((2 * len(ll), 3), dtype=np.int64)
        tris[0::2] = lower
        tris[1::2] = upper
        return tris

    def boundary_mask(self) -> np.ndarray:
        nx, ny = int(self.nx), int(self.ny)
        mask = np.zeros((ny, nx), dtype=bool)
        mask[0, :] = mask[-1, :] = True
        mask[:, 0] = mask[:, -1] = True
        return mask.ravel()

    def contains(self, x) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=float))
        return ((x[:, 0] >= self.x_lo) & (x[:, 0] <= self.x_hi)
                & (x[:, 1] >= self.y_lo) & (x[:, 1] <= self.y_hi))

    def clamp(self, x) -> np.ndarray:
        x = np.array(x, dtype=float)
        x[..., 0] = np.clip(x[..., 0], self.x_lo, self.x_hi)
        x[..., 1] = np.clip(x[..., 1], self.y_lo, self.y_hi)
        return x

    def to_json(self) -> dict:
        return {"kind": "grid", "x_lo": self.x_lo, "x_hi": self.x_hi,
                "y_lo": self.y_lo, "y_hi": self.y_hi,
                "nx": int(self.nx), "ny": int(self.ny)}


Domain = Union[Interval1D, TriangulatedRect]


def _frozen(arr, dtype=None):
    out = np.array(arr, dtype=dtype, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class SampledMap:
    """PL map over a mesh of ``domain``.

    ``points``/``cells`` start as the domain's own grid; refinement inserts
    vertices that carry the target value exactly (``zero_mask``) together with
    their signed local index (``zero_index``).
    """

    domain: Domain
    values: np.ndarray
    points: np.ndarray
    cells: np.ndarray
    boundary: np.ndarray
    zero_mask: np.ndarray
    zero_index: np.ndarray
    structured: bool = True
    target: np.ndarray | None = field(default=None)

    @property
    def dim(self) -> int:
        return self.domain.dim

    @property
    def codomain_dim(self) -> int:
        return self.values.shape[1]

    @property
    def n_vertices(self) -> int:
        return self.values.shape[0]

    def edges(self) -> np.ndarray:
        """Unique undirected edges as sorted index pairs."""
        if self.dim == 1:
            return self.cells
        t = self.cells
        e = np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [0, 2]]])
        e.sort(axis=1)
        return np.unique(e, axis=0)

    def value_range(self) -> float:
        return float(np.max(np.ptp(self.values, axis=0)))

    def __repr__(self):
        return (f"SampledMap(domain={self.domain!r}, n_vertices={self.n_vertices}, "
                f"codomain_dim={self.codomain_dim})")


def _as_values(values, n_vertices: int, codomain_dim: int | None) -> np.ndarray:
    vals = np.asarray(values, dtype=float)
    if vals.ndim == 1:
        vals = vals[:, None]
    if vals.ndim != 2:
        raise ValueError("values must be a sequence of scalars or vectors")
    if vals.shape[0] != n_vertices:
        raise ValueError(f"expected {n_vertices} values, got {vals.shape[0]}")
    if codomain_dim is not None and vals.shape[1] != codomain_dim:
        raise ValueError(f"expected codomain_dim {codomain_dim}, got {vals.shape[1]}")
    if vals.shape[1] not in (1, 2):
        raise ValueError("codomain_dim must be 1 or 2")
    if not np.all(np.isfinite(vals)):
        raise ValueError("values must be finite")
    return vals


def build_map(domain: Domain, values, codomain_dim: int | None = None) -> SampledMap:
    """Validate ``values`` against ``domain`` and assemble a :class:`SampledMap`."""
    vals = _as_values(values, domain.n_vertices, codomain_dim)
    n = domain.n_vertices
    return SampledMap(
        domain=domain,
        values=_frozen(vals),
        points=_frozen(domain.points()),
        cells=_frozen(domain.cells(), dtype=np.int64),
        boundary=_frozen(domain.boundary_mask()),
        zero_mask=_frozen(np.zeros(n, dtype=bool)),
        zero_index=_frozen(np.zeros(n, dtype=np.int64)),
    )


def build_map_on_points(domain: Interval1D, xs, values) -> SampledMap:
    """1-D PL map on arbitrary increasing breakpoints spanning ``domain``."""
    xs = np.asarray(xs, dtype=float)
    if domain.dim != 1:
        raise ValueError("breakpoint maps are 1-D only")
    if xs.ndim != 1 or len(xs) < 2 or np.any(np.diff(xs) <= 0):
        raise ValueError("breakpoints must be strictly increasing")
    if xs[0] != domain.lo or xs[-1] != domain.hi:
        raise ValueError("breakpoints must start and end at the domain bounds")
    vals = _as_values(values, len(xs), None)
    n = len(xs)
    k = np.arange(n - 1)
    bd = np.zeros(n, dtype=bool)
    bd[[0, -1]] = True
    return SampledMap(domain, _frozen(vals), _frozen(xs), _frozen(np.stack([k, k + 1], axis=1)),
                      _frozen(bd), _frozen(np.zeros(n, dtype=bool)),
                      _frozen(np.zeros(n, dtype=np.int64)), structured=False)


def as_target(a, codomain_dim: int) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(a, dtype=float)).ravel()
    if arr.shape != (codomain_dim,):
        raise ValueError(f"target must have {codomain_dim} components, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("target must be finite")
    return arr


# ---------------------------------------------------------------- evaluation

def _locate_triangles(fmap: SampledMap, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Triangle index and barycentric coordinates for each query point."""
    if fmap.structured:
        d = fmap.domain
        nx, ny = int(d.nx), int(d.ny)
        dx, dy = d.spacing
        sx = (x[:, 0] - d.x_lo) / dx
        sy = (x[:, 1] - d.y_lo) / dy
        i = np.clip(np.floor(sx).astype(np.int64), 0, nx - 2)
        j = np.clip(np.floor(sy).astype(np.int64), 0, ny - 2)
        fx, fy = sx - i, sy - j
        upper = fy > fx
        tri = 2 * (j * (nx - 1) + i) + upper
    else:
        tri = np.empty(len(x), dtype=np.int64)
        p = fmap.points[fmap.cells]
        p0 = p[:, 0]
        m = np.stack([p[:, 1] - p0, p[:, 2] - p0], axis=2)
        inv = np.linalg.inv(m)
        for k, q in enumerate(x):
            lam = np.einsum("tij,tj->ti", inv, q - p0)
            bary = np.column_stack([1 - lam.sum(axis=1), lam])
            tri[k] = int(np.argmax(bary.min(axis=1)))
    p = fmap.points[fmap.cells[tri]]
    m = np.stack([p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]], axis=2)
    lam = np.linalg.solve(m, (x - p[:, 0])[..., None])[..., 0]
    bary = np.column_stack([1 - lam.sum(axis=1), lam])
    return tri, bary


def evaluate(fmap: SampledMap, x, *, clamp: bool = False) -> np.ndarray:
    """Evaluate the PL interpolant at one point or an array of points.

    With ``clamp=True`` points outside the domain are first projected onto it
    (the constant-in-direction extension); otherwise they raise.
    """
    dom = fmap.domain
    if fmap.dim == 1:
        xs = np.asarray(x, dtype=float)
        scalar = xs.ndim == 0
        xs = np.atleast_1d(xs)
        if clamp:
            xs = dom.clamp(xs)
        elif not np.all(dom.contains(xs)):
            raise ValueError("evaluation point outside the domain")
        out = np.column_stack([np.interp(xs, fmap.points, fmap.values[:, c])
                               for c in range(fmap.codomain_dim)])
        return out[0] if scalar else out
    xs = np.asarray(x, dtype=float)
    scalar = xs.ndim == 1
    xs = np.atleast_2d(xs)
    if clamp:
        xs = dom.clamp(xs)
    elif not np.all(dom.contains(xs)):
        raise ValueError("evaluation point outside the domain")
    tri, bary = _locate_triangles(fmap, xs)
    vals = fmap.values[fmap.cells[tri]]
    out = np.einsum("ki,kic->kc", bary, vals)
    return out[0] if scalar else out


def eval(fmap: SampledMap, x) -> np.ndarray:  # noqa: A001 - public name
    """Evaluate ``fmap`` at ``x``; exact at vertices."""
    return evaluate(fmap, x)


# -------------------------------------------------------------- genericity

def _bad_edges_2d(vals: np.ndarray, edges: np.ndarray, a: np.ndarray,
                  skip: np.ndarray) -> np.ndarray:
    """Edges whose image segment passes through ``a`` (excluding zero vertices)."""
    keep = ~(skip[edges[:, 0]] | skip[edges[:, 1]])
    e = edges[keep]
    p = vals[e[:, 0]] - a
    q = vals[e[:, 1]] - a
    cross = p[:, 0] * q[:, 1] - p[:, 1] * q[:, 0]
    dot = (p * q).sum(axis=1)
    return e[(cross == 0.0) & (dot <= 0.0)]


def check_generic(fmap: SampledMap, a) -> np.ndarray:
    """Indices of vertices that make ``fmap`` degenerate against ``a``.

    Designated zero vertices produced by refinement are exempt.
    """
    a = as_target(a, fmap.codomain_dim)
    hit = np.all(fmap.values == a, axis=1) & ~fmap.zero_mask
    bad = set(np.flatnonzero(hit).tolist())
    if fmap.dim == 2 and fmap.codomain_dim == 2:
        skip = fmap.zero_mask | hit
        for u, v in _bad_edges_2d(fmap.values, fmap.edges(), a, skip):
            bad.update((int(u), int(v)))
    return np.array(sorted(bad), dtype=np.int64)


def require_generic(fmap: SampledMap, a, *, jitter: bool = False) -> SampledMap:
    """Return ``fmap`` (jittered if asked) or raise :class:`NonGenericError`."""
    bad = check_generic(fmap, a)
    if len(bad) == 0:
        return fmap
    if not jitter:
        raise NonGenericError(
            f"non-generic input: {len(bad)} vertex value(s) degenerate against the target "
            "(pass jitter=True to perturb them deterministically)", bad)
    return apply_jitter(fmap, a)


def apply_jitter(fmap: SampledMap, a, max_rounds: int = 8) -> SampledMap:
    """Nudge degenerate vertices by ``1e-9 * value range``.

    1-D: sign by index parity.  2-D: direction by a golden-angle turn per index.
    """
    a = as_target(a, fmap.codomain_dim)
    free = ~fmap.zero_mask
    if np.all(fmap.values[free] == a):
        raise NonGenericError("degenerate input: map is identically equal to the target",
                              np.flatnonzero(free))
    scale = fmap.value_range()
    if scale == 0.0:
        scale = max(1.0, float(np.max(np.abs(a))))
    eta = JITTER_SCALE * scale
    vals = np.array(fmap.values)
    current = fmap
    for rnd in range(max_rounds):
        bad = check_generic(current, a)
        if len(bad) == 0:
            return current
        signs = np.where(bad % 2 == 0, 1.0, -1.0)
        if fmap.codomain_dim == 1:
            vals[bad, 0] += signs * eta * (rnd + 1)
        else:
            # per-vertex directions: a shared one cannot move an edge whose
            # end values are antipodal off the target
            theta = GOLDEN_ANGLE * bad + 1.1 * rnd
            vals[bad] += eta * np.column_stack([np.cos(theta), np.sin(theta)])
        current = _replace_values(fmap, vals)
    if len(check_generic(current, a)):
        raise NonGenericError("jitter failed to resolve degenerate input", check_generic(current, a))
    return current


def _replace_values(fmap: SampledMap, vals) -> SampledMap:
    return SampledMap(fmap.domain, _frozen(vals), fmap.points, fmap.cells, fmap.boundary,
                      fmap.zero_mask, fmap.zero_index, fmap.structured, fmap.target)


# --------------------------------------------------------------- refinement

def refine_at_crossings(fmap: SampledMap, a) -> SampledMap:
    """Insert a vertex with value exactly ``a`` on every edge where ``f - a``
    changes sign (1-D only).  The interpolant is unchanged as a function."""
    if fmap.dim != 1 or fmap.codomain_dim != 1:
        raise ValueError("refine_at_crossings needs a 1-D map with scalar values")
    a = as_target(a, 1)
    t = a[0]
    x, v = fmap.points, fmap.values[:, 0]
    zm, zi, bd = fmap.zero_mask, fmap.zero_index, fmap.boundary
    d = v - t
    xs, vs, zms, zis, bds = [x[0]], [v[0]], [zm[0]], [zi[0]], [bd[0]]
    for k in range(len(x) - 1):
        if d[k] * d[k + 1] < 0.0:
            s = (t - v[k]) / (v[k + 1] - v[k])
            xs.append(x[k] + s * (x[k + 1] - x[k]))
            vs.append(t)
            zms.append(True)
            zis.append(1 if d[k + 1] > 0 else -1)
            bds.append(False)
        xs.append(x[k + 1])
        vs.append(v[k + 1])
        zms.append(zm[k + 1])
        zis.append(zi[k + 1])
        bds.append(bd[k + 1])
    if len(xs) == len(x):
        return fmap if fmap.target is not None and np.array_equal(fmap.target, a) else \
            SampledMap(fmap.domain, fmap.values, fmap.points, fmap.cells, fmap.boundary,
                       fmap.zero_mask, fmap.zero_index, fmap.structured, _frozen(a))
    n = len(xs)
    k = np.arange(n - 1)
    return SampledMap(
        domain=fmap.domain,
        values=_frozen(np.array(vs)[:, None]),
        points=_frozen(xs),
        cells=_frozen(np.stack([k, k + 1], axis=1), dtype=np.int64),
        boundary=_frozen(bds, dtype=bool),
        zero_mask=_frozen(zms, dtype=bool),
        zero_index=_frozen(zis, dtype=np.int64),
        structured=False,
        target=_frozen(a),
    )


def _orientation(p: np.ndarray) -> np.ndarray:
    u, w = p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]
    return np.sign(u[:, 0] * w[:, 1] - u[:, 1] * w[:, 0])


def refine_at_zeros(fmap: SampledMap, a) -> SampledMap:
    """Split every triangle whose affine image strictly contains ``a`` at the
    zero, so that zeros of a generic 2-D map become vertices."""
    if fmap.dim != 2 or fmap.codomain_dim != 2:
        raise ValueError("refine_at_zeros needs a 2-D map with 2-D values")
    a = as_target(a, 2)
    tris = fmap.cells
    vals = fmap.values[tris]                      # (t, 3, 2)
    has_zero_vertex = fmap.zero_mask[tris].any(axis=1)
    v0 = vals[:, 0]
    m = np.stack([vals[:, 1] - v0, vals[:, 2] - v0], axis=2)
    det = m[:, 0, 0] * m[:, 1, 1] - m[:, 0, 1] * m[:, 1, 0]
    ok = (det != 0.0) & ~has_zero_vertex
    lam = np.zeros((len(tris), 2))
    rhs = (a - v0)[ok]
    mm = m[ok]
    d = det[ok]
    lam[ok, 0] = (mm[:, 1, 1] * rhs[:, 0] - mm[:, 0, 1] * rhs[:, 1]) / d
    lam[ok, 1] = (-mm[:, 1, 0] * rhs[:, 0] + mm[:, 0, 0] * rhs[:, 1]) / d
    bary = np.column_stack([1 - lam.sum(axis=1), lam])
    inside = ok & np.all(bary > 0.0, axis=1)
    if not inside.any():
        return SampledMap(fmap.domain, fmap.values, fmap.points, fmap.cells, fmap.boundary,
                          fmap.zero_mask, fmap.zero_index, fmap.structured, _frozen(a))
    orient = _orientation(fmap.points[tris])
    pts, vls = [fmap.points], [fmap.values]
    zm, zi, bd = [fmap.zero_mask], [fmap.zero_index], [fmap.boundary]
    new_tris = [tris[~inside]]
    nv = fmap.n_vertices
    for t in np.flatnonzero(inside):
        p = fmap.points[tris[t]]
        z = bary[t] @ p
        pts.append(z[None, :])
        vls.append(a[None, :])
        zm.append(np.array([True]))
        zi.append(np.array([int(np.sign(det[t]) * orient[t])], dtype=np.int64))
        bd.append(np.array([False]))
        i0, i1, i2 = tris[t]
        new_tris.append(np.array([[nv, i1, i2], [i0, nv, i2], [i0, i1, nv]], dtype=np.int64))
        nv += 1
    return SampledMap(
        domain=fmap.domain,
        values=_frozen(np.concatenate(vls)),
        points=_frozen(np.concatenate(pts)),
        cells=_frozen(np.concatenate(new_tris), dtype=np.int64),
        boundary=_frozen(np.concatenate(bd)),
        zero_mask=_frozen(np.concatenate(zm)),
        zero_index=_frozen(np.concatenate(zi), dtype=np.int64),
        structured=False,
        target=_frozen(a),
    )


def refine(fmap: SampledMap, a) -> SampledMap:
    """Make every zero of ``f - a`` a vertex (crossings in 1-D, stellar splits in 2-D)."""
    if fmap.dim == 1:
        if fmap.codomain_dim != 1:
            raise ValueError("1-D domains need scalar values")
        return refine_at_crossings(fmap, a)
    if fmap.codomain_dim != 2:
        raise ValueError("2-D domains need 2-D values")
    return refine_at_zeros(fmap, a)


def map_from_function(domain: Domain, func) -> SampledMap:
    """Sample ``func`` at the vertices of ``domain``."""
    pts = domain.points()
    if domain.dim == 1:
        vals = np.array([np.atleast_1d(func(x)) for x in pts], dtype=float)
    else:
        vals = np.array([np.atleast_1d(func(p)) for p in pts], dtype=float)
    return build_map(domain, vals)
