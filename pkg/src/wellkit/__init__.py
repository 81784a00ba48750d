"""Robustness of intersections for sampled piecewise-linear maps.

Well groups, well modules and well diagrams of zeros and fixed points, with
persistence of the well function and a bottleneck distance between diagrams.
"""
from .errors import (BoundaryContactError, ConsistencyError, NonGenericError, SizeLimitError,
                     WellkitError)
from .kernels import BACKEND
from .matching import MatchingResult, bottleneck, brute_force_bottleneck
from .mesh import Interval1D, SampledMap, TriangulatedRect, build_map, evaluate, refine
from .persistence import (PersistenceDiagram, bottleneck_small, critical_values,
                          persistence_diagram, reduce, sublevel_filtration)
from .wellcore import (LeftFiltration, WellDiagram, WellFunction, WellModule, build_well_module,
                       components_at, left_filtration, local_degree, robustness,
                       terminal_critical_values, well_diagram, well_function, well_group_at)

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "BoundaryContactError", "ConsistencyError", "Interval1D", "LeftFiltration",
    "MatchingResult", "NonGenericError", "PersistenceDiagram", "SampledMap", "SizeLimitError",
    "TriangulatedRect", "WellDiagram", "WellFunction", "WellModule", "WellkitError",
    "bottleneck", "bottleneck_small", "brute_force_bottleneck", "build_map", "build_well_module",
    "components_at", "critical_values", "evaluate", "left_filtration", "local_degree",
    "persistence_diagram", "reduce", "refine", "robustness", "sublevel_filtration",
    "terminal_critical_values", "well_diagram", "well_function", "well_group_at",
]
