"""Pure-Python reference versions of the hot loops.

Same signatures and outputs as the compiled ``_kernels`` module; used when
the extension is not built or ``WELLKIT_PURE=1`` is set.
"""
import numpy as np


def _find(parent, x):
    root = x
    while parent[root] != root:
        root = parent[root]
    while parent[x] != root:
        parent[x], x = root, parent[x]
    return root


def label_components(active, edge_u, edge_v):
    """Component label per active vertex (``-1`` when inactive).

    Labels are numbered by the smallest vertex index in each component.
    """
    n = len(active)
    parent = list(range(n))
    act = [bool(x) for x in active]
    for u, v in zip(edge_u.tolist(), edge_v.tolist()):
        if act[u] and act[v]:
            ru, rv = _find(parent, u), _find(parent, v)
            if ru != rv:
                if ru < rv:
                    parent[rv] = ru
                else:
                    parent[ru] = rv
    labels = np.full(n, -1, dtype=np.int64)
    seen = {}
    for v in range(n):
        if act[v]:
            r = _find(parent, v)
            if r not in seen:
                seen[r] = len(seen)
            labels[v] = seen[r]
    return labels


def sweep(order, w, adj_ptr, adj_idx, zero_index, boundary, extended):
    """Incremental sublevel sweep tracking component degrees.

    Vertices enter in ``order`` (non-decreasing ``w``); vertices with equal
    ``w`` form one group.  Returns per-group arrays ``(values, n_components,
    well_rank, boundary_death)`` and per-vertex ``exit`` radii: for a zero
    vertex, the first group value at which its component is no longer well
    (``inf`` if never), ``nan`` for other vertices.
    """
    n = len(order)
    order = order.tolist()
    wl = w.tolist()
    ptr = adj_ptr.tolist()
    idx = adj_idx.tolist()
    parent = list(range(n))
    deg = zero_index.tolist()
    touch = [bool(b) for b in boundary]
    active = [False] * n
    is_zero = [d != 0 for d in deg]
    head = [v if is_zero[v] else -1 for v in range(n)]
    tail = list(head)
    nxt = [-1] * n
    exit_ = [float("inf") if is_zero[v] else float("nan") for v in range(n)]

    def well(r):
        return deg[r] != 0 and (extended or not touch[r])

    values, ncomp, nwell, bdeath = [], [], [], []
    n_comp = n_well = 0
    k = 0
    while k < n:
        gw = wl[order[k]]
        touched = []
        while k < n and wl[order[k]] == gw:
            v = order[k]
            k += 1
            active[v] = True
            n_comp += 1
            n_well += well(v)
            for e in range(ptr[v], ptr[v + 1]):
                u = idx[e]
                if not active[u]:
                    continue
                ru, rv = _find(parent, u), _find(parent, v)
                if ru == rv:
                    continue
                n_well -= well(ru) + well(rv)
                if ru > rv:
                    ru, rv = rv, ru
                parent[rv] = ru
                deg[ru] += deg[rv]
                touch[ru] = touch[ru] or touch[rv]
                if head[rv] != -1:
                    if head[ru] == -1:
                        head[ru] = head[rv]
                    else:
                        nxt[tail[ru]] = head[rv]
                    tail[ru] = tail[rv]
                    head[rv] = tail[rv] = -1
                n_well += well(ru)
                n_comp -= 1
            touched.append(v)
        boundary_kill = False
        for v in touched:
            r = _find(parent, v)
            if head[r] != -1 and not well(r):
                z = head[r]
                while z != -1:
                    exit_[z] = gw
                    z = nxt[z]
                head[r] = tail[r] = -1
                if deg[r] != 0 and touch[r]:
                    boundary_kill = True
        values.append(gw)
        ncomp.append(n_comp)
        nwell.append(n_well)
        bdeath.append(boundary_kill)
    return (np.array(values, dtype=float), np.array(ncomp, dtype=np.int64),
            np.array(nwell, dtype=np.int64), np.array(bdeath, dtype=bool),
            np.array(exit_, dtype=float))


def reduce_columns(col_ptr, col_idx):
    """Standard Z/2 column reduction.

    Column ``j`` holds the filtration positions of the boundary of cell ``j``.
    Returns ``low`` with the pivot row of each reduced column, ``-1`` if zero.
    """
    m = len(col_ptr) - 1
    ptr = col_ptr.tolist()
    idx = col_idx.tolist()
    low = [-1] * m
    owner = {}
    reduced = [0] * m
    for j in range(m):
        c = 0
        for e in range(ptr[j], ptr[j + 1]):
            c ^= 1 << idx[e]
        while c:
            p = c.bit_length() - 1
            o = owner.get(p)
            if o is None:
                owner[p] = j
                low[j] = p
                break
            c ^= reduced[o]
        reduced[j] = c
    return np.array(low, dtype=np.int64)
