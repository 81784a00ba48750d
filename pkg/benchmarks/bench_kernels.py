"""Compare the compiled kernels with the pure-Python fallback.

    python benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import timeit

import numpy as np

from wellkit import _pykernels
from wellkit.mesh import Interval1D, TriangulatedRect, build_map
from wellkit.persistence import sublevel_filtration
from wellkit.wellcore import well_function

try:
    from wellkit import _kernels
except ImportError:
    _kernels = None


def _inputs():
    rng = np.random.default_rng(0)
    line = well_function(build_map(Interval1D(0.0, 1.0, 20_000), rng.uniform(-1, 1, 20_000)), 0.0)
    grid = well_function(build_map(TriangulatedRect(0, 1, 0, 1, 60, 60),
                                   rng.uniform(-1, 1, (3600, 2))), (0.01, -0.02), jitter=True)
    return {"1-D 20k vertices": line, "2-D 60x60 grid": grid}


def _sweep_args(w):
    order = np.lexsort((np.arange(w.mesh.n_vertices), w.vertex_values)).astype(np.int64)
    ptr, idx = w.adjacency
    return (order, w.vertex_values, ptr, idx, w.mesh.zero_index.astype(np.int64),
            w.mesh.boundary.astype(np.uint8), False)


def _reduce_args(w):
    filt = sublevel_filtration(w.mesh, w.target)
    pos = {c.id: k for k, c in enumerate(filt.cells)}
    ptr, idx = [0], []
    for c in filt.cells:
        idx.extend(pos[b] for b in c.boundary)
        ptr.append(len(idx))
    return np.array(ptr, dtype=np.int64), np.array(idx, dtype=np.int64)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if _kernels is None:
        print("compiled kernels not built; only the fallback is available")
    impls = [("python", _pykernels)] + ([("cython", _kernels)] if _kernels else [])
    print(f"{'kernel':<10}{'input':<20}" + "".join(f"{n:>12}" for n, _ in impls) + "   speedup")
    for label, w in _inputs().items():
        e = w.edges
        act = (w.vertex_values <= np.median(w.vertex_values)).astype(np.uint8)
        jobs = {
            "sweep": (lambda m, a=_sweep_args(w): m.sweep(*a)),
            "label": (lambda m: m.label_components(act, e[:, 0], e[:, 1])),
            "reduce": (lambda m, a=_reduce_args(w): m.reduce_columns(*a)),
        }
        for name, job in jobs.items():
            times = [min(timeit.repeat(lambda: job(m), number=1, repeat=args.repeat))
                     for _, m in impls]
            ratio = f"{times[0] / times[1]:8.1f}x" if len(times) > 1 else ""
            print(f"{name:<10}{label:<20}" + "".join(f"{t * 1e3:10.1f}ms" for t in times)
                  + "  " + ratio)


if __name__ == "__main__":
    main()
