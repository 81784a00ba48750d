"""Randomized property checks for the distance, bridge, shrinking-wellness
and stability results about well groups and well diagrams.

Each check returns a :class:`StabilityReport`; a violation is an observation
exceeding its bound by more than ``1e-9`` times the value scale.  Suites draw
1-D maps with uniform vertex values in ``[-1, 1]`` on 4 to 16 vertices and use
target ``a = 0``; trial ``k`` of seed ``s`` always uses the generator seeded with
``[s, k]`` so any single trial can be replayed.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import NonGenericError
from .linalg_z2 import BitMatrix, push
from .matching import bottleneck
from .mesh import Interval1D, SampledMap, as_target, build_map, evaluate
from .wellcore import (WellFunction, WellModule, build_well_module, inclusion_matrix,
                       sweep_diagram, well_diagram, well_function, well_group_at)

TOL = 1e-9
INF = math.inf


@dataclass
class StabilityReport:
    name: str
    trials: int = 0
    violations: int = 0
    worst_slack: float = INF
    seed: int | None = None
    skipped: int = 0
    failures: list = field(default_factory=list)

    def record(self, bound: float, observed: float, scale: float = 1.0, info=None) -> bool:
        self.trials += 1
        slack = bound - observed
        if slack < self.worst_slack:
            self.worst_slack = slack
        bad = observed > bound + TOL * max(scale, 1.0)
        if bad:
            self.violations += 1
            if len(self.failures) < 10:
                self.failures.append(info)
        return not bad

    def merge(self, other: "StabilityReport") -> "StabilityReport":
        self.trials += other.trials
        self.violations += other.violations
        self.skipped += other.skipped
        self.worst_slack = min(self.worst_slack, other.worst_slack)
        self.failures.extend(other.failures[: max(0, 10 - len(self.failures))])
        return self

    @property
    def ok(self) -> bool:
        return self.violations == 0

    def to_json(self) -> dict:
        d = asdict(self)
        d["worst_slack"] = "inf" if self.worst_slack == INF else self.worst_slack
        return d


def _check_shared(f: SampledMap, g: SampledMap):
    if f.domain != g.domain or f.values.shape != g.values.shape:
        raise ValueError("maps must share a mesh")


def sup_distance(f: SampledMap, g: SampledMap) -> float:
    """Sup-norm distance of two PL maps on the same mesh (attained at vertices)."""
    _check_shared(f, g)
    return float(np.max(np.linalg.norm(f.values - g.values, axis=1)))


def _scale(*maps: SampledMap) -> float:
    return max(float(np.max(np.abs(m.values))) for m in maps)


# ------------------------------------------------------------------ checks

def check_distance_lemma(f: SampledMap, g: SampledMap, a, *, samples: int = 0,
                         rng: np.random.Generator | None = None) -> StabilityReport:
    """Well functions of two maps differ by at most their sup-norm distance.

    Checked at every vertex and, if ``samples > 0``, at random domain points.
    """
    _check_shared(f, g)
    a = as_target(a, f.codomain_dim)
    rep = StabilityReport("distance")
    eps = sup_distance(f, g)
    wf = np.linalg.norm(f.values - a, axis=1)
    wg = np.linalg.norm(g.values - a, axis=1)
    observed = float(np.max(np.abs(wf - wg)))
    if samples:
        rng = rng or np.random.default_rng(0)
        d = f.domain
        if f.dim == 1:
            x = rng.uniform(d.lo, d.hi, samples)
        else:
            x = np.column_stack([rng.uniform(d.x_lo, d.x_hi, samples),
                                 rng.uniform(d.y_lo, d.y_hi, samples)])
        sf = np.linalg.norm(evaluate(f, x).reshape(samples, -1) - a, axis=1)
        sg = np.linalg.norm(evaluate(g, x).reshape(samples, -1) - a, axis=1)
        observed = max(observed, float(np.max(np.abs(sf - sg))))
    rep.record(eps, observed, _scale(f, g), {"eps": eps, "observed": observed})
    return rep


def diagram_distance(f: SampledMap, g: SampledMap, a) -> float:
    return bottleneck(well_diagram(build_well_module(f, a)),
                      well_diagram(build_well_module(g, a))).bottleneck


def check_stability(f: SampledMap, g: SampledMap | None = None, a=0.0, trials: int = 1,
                    seed: int = 0, eps: float | None = None) -> StabilityReport:
    """Bottleneck distance of well diagrams is at most the sup-norm distance.

    With ``g`` given, compares the two maps once.  Otherwise draws ``trials``
    vertexwise uniform perturbations of ``f`` (amplitude ``eps``, or a random
    one per trial) and uses the realized sup-norm as the bound.
    """
    rep = StabilityReport("stability", seed=seed)
    if g is not None:
        e = sup_distance(f, g)
        obs = diagram_distance(f, g, a)
        rep.record(e, obs, _scale(f, g), {"eps": e, "observed": obs})
        return rep
    for k in range(trials):
        rng = np.random.default_rng([seed, k])
        amp = eps if eps is not None else float(rng.uniform(0.001, 0.5))
        g = build_map(f.domain, f.values + rng.uniform(-amp, amp, f.values.shape))
        try:
            rep.merge(check_stability(f, g, a))
        except NonGenericError:
            rep.skipped += 1
    return rep


def check_shrinking_wellness(module: WellModule) -> StabilityReport:
    """Each well group lies in the image of the previous one under inclusion."""
    rep = StabilityReport("shrinking")
    for i in range(len(module.groups) - 1):
        u, nxt = module.groups[i], module.groups[i + 1]
        _containment(rep, module.homology_maps[i], u, nxt, i)
    if not module.groups:
        rep.record(0.0, 0.0)
    return rep


def _containment(rep: StabilityReport, f: BitMatrix, src, dst, info) -> bool:
    img = push(f, src.well_basis)
    missing = sum(1 for v in dst.well_basis.basis if v not in img)
    return rep.record(0.0, float(missing), 1.0, info)


def check_shrinking_wellness_grid(w: WellFunction, radii) -> StabilityReport:
    """All pairs ``r <= s`` of ``radii``: ``U(s)`` inside the image of ``U(r)``."""
    rep = StabilityReport("shrinking")
    snaps = [well_group_at(w, r=float(r)) for r in sorted(radii)]
    for i in range(len(snaps)):
        for j in range(i + 1, len(snaps)):
            _containment(rep, inclusion_matrix(snaps[i], snaps[j]), snaps[i], snaps[j],
                         (snaps[i].radius, snaps[j].radius))
    return rep


def bridge_matrix(wg: WellFunction, wf: WellFunction, r: float, s: float):
    """Component map from ``{g_A <= r}`` into ``{f_A <= s}`` (1-D meshes).

    A vertex of a component of ``g``'s sublevel set lies at most ``s`` from the
    target under ``f``; it falls on an edge of ``f``'s refined mesh, along which
    the well function is linear, so the lower endpoint carries its label.
    """
    src = well_group_at(wg, r=r)
    dst = well_group_at(wf, r=s)
    xf = wf.mesh.points
    cols = []
    for c in src.components:
        x = float(wg.mesh.points[c.members[0]])
        k = int(np.clip(np.searchsorted(xf, x, side="right") - 1, 0, len(xf) - 2))
        ends = (k, k + 1)
        v = min(ends, key=lambda e: wf.vertex_values[e])
        lab = int(dst.labels[v])
        if lab < 0:
            raise AssertionError("bridge point outside the target sublevel set")
        cols.append(1 << lab)
    return BitMatrix.from_columns(cols, len(dst.components)), src, dst


def check_bridge(f: SampledMap, g: SampledMap, a, r: float) -> bool:
    """``U_f(r + eps)`` lies in the bridge image of ``V_g(r)``."""
    if f.dim != 1:
        raise ValueError("the bridge check is implemented for 1-D meshes")
    _check_shared(f, g)
    eps = sup_distance(f, g)
    wf, wg = well_function(f, a), well_function(g, a)
    beta, src, dst = bridge_matrix(wg, wf, r, r + eps)
    img = push(beta, src.well_basis)
    return all(v in img for v in dst.well_basis.basis)


# ------------------------------------------------------------------ suites

def random_map(rng: np.random.Generator, lo: int = 4, hi: int = 16) -> SampledMap:
    n = int(rng.integers(lo, hi + 1))
    return build_map(Interval1D(0.0, 1.0, n), rng.uniform(-1.0, 1.0, n))


def _perturbed(rng, f: SampledMap) -> SampledMap:
    amp = float(rng.uniform(0.001, 0.5))
    return build_map(f.domain, f.values + rng.uniform(-amp, amp, f.values.shape))


def distance_suite(trials: int, seed: int) -> StabilityReport:
    rep = StabilityReport("distance", seed=seed)
    for k in range(trials):
        rng = np.random.default_rng([seed, k])
        f = random_map(rng)
        g = _perturbed(rng, f)
        rep.merge(check_distance_lemma(f, g, 0.0, samples=16, rng=rng))
    return rep


def stability_suite(trials: int, seed: int) -> StabilityReport:
    rep = StabilityReport("stability", seed=seed)
    for k in range(trials):
        rng = np.random.default_rng([seed, k])
        f = random_map(rng)
        g = _perturbed(rng, f)
        try:
            sub = check_stability(f, g, 0.0)
            # the module route and the sweep route must agree on both diagrams
            for m in (f, g):
                d1 = well_diagram(build_well_module(m, 0.0))
                if d1 != sweep_diagram(m, 0.0):
                    sub.violations += 1
                    sub.failures.append({"trial": k, "reason": "diagram routes disagree"})
        except NonGenericError:
            rep.skipped += 1
            continue
        if sub.failures:
            sub.failures = [{"trial": k, **(x or {})} for x in sub.failures]
        rep.merge(sub)
    return rep


def shrinking_suite(trials: int, seed: int) -> StabilityReport:
    rep = StabilityReport("shrinking", seed=seed)
    for k in range(trials):
        rng = np.random.default_rng([seed, k])
        f = random_map(rng)
        w = well_function(f, 0.0)
        rep.merge(check_shrinking_wellness(build_well_module(w)))
        top = float(w.vertex_values.max()) * 1.2
        rep.merge(check_shrinking_wellness_grid(w, np.sort(rng.uniform(0, top, 6))))
    return rep


def bridge_suite(trials: int, seed: int) -> StabilityReport:
    rep = StabilityReport("bridge", seed=seed)
    for k in range(trials):
        rng = np.random.default_rng([seed, k])
        f = random_map(rng)
        g = build_map(f.domain, f.values + rng.uniform(-0.3, 0.3, f.values.shape))
        r = float(rng.uniform(0.0, 1.0))
        ok = check_bridge(f, g, 0.0, r)
        rep.record(0.0, 0.0 if ok else 1.0, 1.0, {"trial": k, "r": r})
    return rep


SUITES = {
    "distance": distance_suite,
    "stability": stability_suite,
    "shrinking": shrinking_suite,
    "bridge": bridge_suite,
}


def run_all(trials: int, seed: int) -> dict[str, StabilityReport]:
    return {name: fn(trials, seed) for name, fn in SUITES.items()}
