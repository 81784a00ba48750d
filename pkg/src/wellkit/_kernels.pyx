# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops: component labelling, degree-tracking sweep, Z/2 reduction.

Mirrors ``_pykernels`` exactly; see that module for the contracts.
"""
import numpy as np
cimport numpy as cnp
from libcpp.vector cimport vector
from libc.math cimport INFINITY, NAN

cnp.import_array()


cdef inline Py_ssize_t _find(Py_ssize_t[::1] parent, Py_ssize_t x) noexcept nogil:
    cdef Py_ssize_t root = x, nx
    while parent[root] != root:
        root = parent[root]
    while parent[x] != root:
        nx = parent[x]
        parent[x] = root
        x = nx
    return root


def label_components(active, edge_u, edge_v):
    cdef const cnp.uint8_t[::1] act = np.ascontiguousarray(active, dtype=np.uint8)
    cdef const cnp.int64_t[::1] eu = np.ascontiguousarray(edge_u, dtype=np.int64)
    cdef const cnp.int64_t[::1] ev = np.ascontiguousarray(edge_v, dtype=np.int64)
    cdef Py_ssize_t n = act.shape[0], m = eu.shape[0], e, u, v, ru, rv, nlab = 0
    parent_arr = np.arange(n, dtype=np.intp)
    cdef Py_ssize_t[::1] parent = parent_arr
    labels_arr = np.full(n, -1, dtype=np.int64)
    cdef cnp.int64_t[::1] labels = labels_arr
    rootlab_arr = np.full(n, -1, dtype=np.int64)
    cdef cnp.int64_t[::1] rootlab = rootlab_arr
    with nogil:
        for e in range(m):
            u = eu[e]
            v = ev[e]
            if act[u] and act[v]:
                ru = _find(parent, u)
                rv = _find(parent, v)
                if ru != rv:
                    if ru < rv:
                        parent[rv] = ru
                    else:
                        parent[ru] = rv
        for v in range(n):
            if act[v]:
                ru = _find(parent, v)
                if rootlab[ru] < 0:
                    rootlab[ru] = nlab
                    nlab += 1
                labels[v] = rootlab[ru]
    return labels_arr


def sweep(order, w, adj_ptr, adj_idx, zero_index, boundary, bint extended):
    cdef const cnp.int64_t[::1] ordr = np.ascontiguousarray(order, dtype=np.int64)
    cdef const double[::1] wv = np.ascontiguousarray(w, dtype=np.float64)
    cdef const cnp.int64_t[::1] ptr = np.ascontiguousarray(adj_ptr, dtype=np.int64)
    cdef const cnp.int64_t[::1] idx = np.ascontiguousarray(adj_idx, dtype=np.int64)
    cdef Py_ssize_t n = ordr.shape[0]
    parent_arr = np.arange(n, dtype=np.intp)
    cdef Py_ssize_t[::1] parent = parent_arr
    deg_arr = np.array(zero_index, dtype=np.int64)
    cdef cnp.int64_t[::1] deg = deg_arr
    touch_arr = np.array(boundary, dtype=np.uint8)
    cdef cnp.uint8_t[::1] touch = touch_arr
    active_arr = np.zeros(n, dtype=np.uint8)
    cdef cnp.uint8_t[::1] active = active_arr
    head_arr = np.full(n, -1, dtype=np.intp)
    cdef Py_ssize_t[::1] head = head_arr
    tail_arr = np.full(n, -1, dtype=np.intp)
    cdef Py_ssize_t[::1] tail = tail_arr
    nxt_arr = np.full(n, -1, dtype=np.intp)
    cdef Py_ssize_t[::1] nxt = nxt_arr
    exit_arr = np.full(n, NAN, dtype=np.float64)
    cdef double[::1] ex = exit_arr

    cdef vector[double] values
    cdef vector[cnp.int64_t] ncomp, nwell
    cdef vector[cnp.uint8_t] bdeath
    cdef vector[Py_ssize_t] touched
    cdef Py_ssize_t k = 0, v, u, e, ru, rv, r, z, t, n_comp = 0, n_well = 0
    cdef double gw
    cdef bint bkill

    for v in range(n):
        if deg[v] != 0:
            head[v] = v
            tail[v] = v
            ex[v] = INFINITY

    with nogil:
        while k < n:
            gw = wv[ordr[k]]
            touched.clear()
            while k < n and wv[ordr[k]] == gw:
                v = ordr[k]
                k += 1
                active[v] = 1
                n_comp += 1
                if deg[v] != 0 and (extended or not touch[v]):
                    n_well += 1
                for e in range(ptr[v], ptr[v + 1]):
                    u = idx[e]
                    if not active[u]:
                        continue
                    ru = _find(parent, u)
                    rv = _find(parent, v)
                    if ru == rv:
                        continue
                    if deg[ru] != 0 and (extended or not touch[ru]):
                        n_well -= 1
                    if deg[rv] != 0 and (extended or not touch[rv]):
                        n_well -= 1
                    if ru > rv:
                        ru, rv = rv, ru
                    parent[rv] = ru
                    deg[ru] += deg[rv]
                    if touch[rv]:
                        touch[ru] = 1
                    if head[rv] != -1:
                        if head[ru] == -1:
                            head[ru] = head[rv]
                        else:
                            nxt[tail[ru]] = head[rv]
                        tail[ru] = tail[rv]
                        head[rv] = -1
                        tail[rv] = -1
                    if deg[ru] != 0 and (extended or not touch[ru]):
                        n_well += 1
                    n_comp -= 1
                touched.push_back(v)
            bkill = False
            for t in range(<Py_ssize_t>touched.size()):
                r = _find(parent, touched[t])
                if head[r] != -1 and not (deg[r] != 0 and (extended or not touch[r])):
                    z = head[r]
                    while z != -1:
                        ex[z] = gw
                        z = nxt[z]
                    head[r] = -1
                    tail[r] = -1
                    if deg[r] != 0 and touch[r]:
                        bkill = True
            values.push_back(gw)
            ncomp.push_back(n_comp)
            nwell.push_back(n_well)
            bdeath.push_back(bkill)

    g = values.size()
    out_v = np.empty(g, dtype=np.float64)
    out_c = np.empty(g, dtype=np.int64)
    out_w = np.empty(g, dtype=np.int64)
    out_b = np.empty(g, dtype=bool)
    for t in range(<Py_ssize_t>g):
        out_v[t] = values[t]
        out_c[t] = ncomp[t]
        out_w[t] = nwell[t]
        out_b[t] = bdeath[t] != 0
    return out_v, out_c, out_w, out_b, exit_arr


cdef extern from "<algorithm>" namespace "std" nogil:
    void sort[Iter](Iter first, Iter last)


cdef inline void _sort_unique_mod2(vector[Py_ssize_t]& v, vector[Py_ssize_t]& scratch) noexcept nogil:
    cdef size_t i = 0, n
    sort(v.begin(), v.end())
    n = v.size()
    scratch.clear()
    while i < n:
        if i + 1 < n and v[i] == v[i + 1]:
            i += 2
        else:
            scratch.push_back(v[i])
            i += 1
    v.swap(scratch)


cdef inline void _xor_into(vector[Py_ssize_t]& acc, const vector[Py_ssize_t]& other,
                           vector[Py_ssize_t]& scratch) noexcept nogil:
    # symmetric difference of two ascending index lists
    cdef size_t i = 0, j = 0, na = acc.size(), nb = other.size()
    scratch.clear()
    while i < na and j < nb:
        if acc[i] < other[j]:
            scratch.push_back(acc[i])
            i += 1
        elif acc[i] > other[j]:
            scratch.push_back(other[j])
            j += 1
        else:
            i += 1
            j += 1
    while i < na:
        scratch.push_back(acc[i])
        i += 1
    while j < nb:
        scratch.push_back(other[j])
        j += 1
    acc.swap(scratch)


def reduce_columns(col_ptr, col_idx):
    cdef const cnp.int64_t[::1] ptr = np.ascontiguousarray(col_ptr, dtype=np.int64)
    cdef const cnp.int64_t[::1] idx = np.ascontiguousarray(col_idx, dtype=np.int64)
    cdef Py_ssize_t m = ptr.shape[0] - 1, j, e, p, o
    low_arr = np.full(m, -1, dtype=np.int64)
    cdef cnp.int64_t[::1] low = low_arr
    owner_arr = np.full(max(m, 1), -1, dtype=np.intp)
    cdef Py_ssize_t[::1] owner = owner_arr
    cdef vector[vector[Py_ssize_t]] cols
    cdef vector[Py_ssize_t] scratch
    cols.resize(m)
    with nogil:
        for j in range(m):
            for e in range(ptr[j], ptr[j + 1]):
                cols[j].push_back(idx[e])
            # inputs may be unsorted or repeat an index; canonicalise first
            _sort_unique_mod2(cols[j], scratch)
            while cols[j].size() > 0:
                p = cols[j].back()
                o = owner[p]
                if o < 0:
                    owner[p] = j
                    low[j] = p
                    break
                _xor_into(cols[j], cols[o], scratch)
    return low_arr
