"""Canonical small inputs used by the tests, the CLI and the docs."""
from __future__ import annotations

import numpy as np

from .mesh import Interval1D, SampledMap, TriangulatedRect, build_map, map_from_function

# the well function of this map has critical values 3, 2 and 1 against a = 0
CROSSING_VALUES = (-4.0, 3.0, -2.0, 1.0, -4.0)
CROSSING_RADII = (0.5, 1.5, 2.5, 3.5)


def four_crossing_map(a: float = 0.0) -> SampledMap:
    """Two tall bumps and one shallow one crossing the level ``a`` four times."""
    return build_map(Interval1D(0.0, 4.0, 5), np.array(CROSSING_VALUES) + a)


def squaring_map(n: int = 20, half: float = 1.0) -> SampledMap:
    """``(x^2 - y^2, 2xy)`` on a square grid; zero of degree 2 at the origin."""
    dom = TriangulatedRect(-half, half, -half, half, n, n)
    return map_from_function(dom, lambda p: (p[0] ** 2 - p[1] ** 2, 2 * p[0] * p[1]))


def identity_map(n: int = 9, half: float = 1.0) -> SampledMap:
    dom = TriangulatedRect(-half, half, -half, half, n, n)
    return map_from_function(dom, lambda p: (p[0], p[1]))
