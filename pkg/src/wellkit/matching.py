"""Bottleneck distance between well diagrams.

Well diagrams live on the extended half-line with infinitely many zeros, so
the optimal bijection is the sorted (inversion-free) one after padding the
shorter list with zeros.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

from .errors import SizeLimitError
from .wellcore import WellDiagram

INF = math.inf
EXPANSION_LIMIT = 10_000
BRUTE_FORCE_LIMIT = 8

DiagramLike = Union[WellDiagram, Iterable[float]]


def gap(u: float, v: float) -> float:
    """``|u - v|`` on the extended line, with ``inf - inf = 0``."""
    if u == INF and v == INF:
        return 0.0
    if u == INF or v == INF:
        return INF
    return abs(u - v)


def expand(d: DiagramLike, limit: int = EXPANSION_LIMIT) -> list[float]:
    """Nonzero points of ``d`` as an ascending list, multiplicities expanded."""
    if isinstance(d, WellDiagram):
        if d.mass > limit:
            raise SizeLimitError(f"diagram has {d.mass} points, limit is {limit}")
        return d.values()
    vals = [float(v) for v in d]
    if any(v < 0 or math.isnan(v) for v in vals):
        raise ValueError("well diagram points must be non-negative")
    vals = sorted(v for v in vals if v != 0.0)
    if len(vals) > limit:
        raise SizeLimitError(f"diagram has {len(vals)} points, limit is {limit}")
    return vals


def _padded(d1: DiagramLike, d2: DiagramLike) -> tuple[list[float], list[float]]:
    u, v = expand(d1), expand(d2)
    m = max(len(u), len(v))
    return [0.0] * (m - len(u)) + u, [0.0] * (m - len(v)) + v


@dataclass(frozen=True)
class MatchingResult:
    pairs: tuple[tuple[float, float], ...]
    bottleneck: float

    def to_json(self) -> dict:
        enc = lambda x: "inf" if x == INF else x  # noqa: E731
        return {"bottleneck": enc(self.bottleneck),
                "pairs": [[enc(u), enc(v)] for u, v in self.pairs]}


def bottleneck(d1: DiagramLike, d2: DiagramLike) -> MatchingResult:
    """Inversion-free matching: sort, pad with zeros, pair index by index."""
    u, v = _padded(d1, d2)
    pairs = tuple(zip(u, v))
    return MatchingResult(pairs, max((gap(p, q) for p, q in pairs), default=0.0))


def brute_force_bottleneck(d1: DiagramLike, d2: DiagramLike) -> float:
    """Minimum over every bijection of the zero-padded lists (small inputs only)."""
    u, v = expand(d1), expand(d2)
    if len(u) + len(v) > BRUTE_FORCE_LIMIT:
        raise SizeLimitError(f"brute force is limited to {BRUTE_FORCE_LIMIT} nonzero points")
    # every bijection of the zero-padded diagrams is an injective partial map
    # from u into v; unmatched points on either side go to zero
    best = INF if (u or v) else 0.0

    def search(i: int, used: frozenset, cost: float):
        nonlocal best
        if cost >= best:
            return
        if i == len(u):
            rest = max((v[j] for j in range(len(v)) if j not in used), default=0.0)
            best = min(best, max(cost, rest))
            return
        search(i + 1, used, max(cost, u[i]))
        for j in range(len(v)):
            if j not in used:
                search(i + 1, used | {j}, max(cost, gap(u[i], v[j])))

    search(0, frozenset(), 0.0)
    return best


def uncross(u: Sequence[float], v: Sequence[float], i: int, k: int) -> tuple[list[float], list[float]]:
    """Swap the partners of positions ``i`` and ``k`` if they form an inversion.

    Returns the new pairing; the differences ``|u_i - v_i|`` never get worse in
    the max.
    """
    u, v = list(u), list(v)
    if (u[i] - u[k]) * (v[i] - v[k]) < 0:
        v[i], v[k] = v[k], v[i]
    return u, v


def sorted_differences(u: Sequence[float], v: Sequence[float]) -> list[float]:
    return sorted((gap(p, q) for p, q in zip(u, v)), reverse=True)
