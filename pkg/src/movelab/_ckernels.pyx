# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: per-site sweeps, integer max-flow, up-set enumeration,
and the downwards-FKG pair scan.  Signatures mirror ``_pykernels``; callers
guarantee that integer inputs fit in int64 (see ``kernels.py``).
"""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport int64_t, uint64_t

cnp.import_array()

cdef extern from *:
    ctypedef long long int128 "__int128"


def sweep_float(arr, int n, double m00, double m01, double m10, double m11):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.array(arr, dtype=np.float64)
    cdef double[::1] v = out
    cdef Py_ssize_t size = v.shape[0]
    cdef Py_ssize_t i, block, base, k, step
    cdef double lo, hi
    for i in range(n):
        step = 1 << i
        block = step << 1
        base = 0
        while base < size:
            for k in range(base, base + step):
                lo = v[k]
                hi = v[k + step]
                v[k] = lo * m00 + hi * m10
                v[k + step] = lo * m01 + hi * m11
            base += block
    return out


def dinic(int num_nodes, int s, int t, tails, heads, caps):
    cdef int64_t[::1] tl = np.ascontiguousarray(tails, dtype=np.int64)
    cdef int64_t[::1] hd = np.ascontiguousarray(heads, dtype=np.int64)
    cdef int64_t[::1] cp0 = np.ascontiguousarray(caps, dtype=np.int64)
    cdef Py_ssize_t m = tl.shape[0]
    cdef Py_ssize_t e, a, v, w, k, qh, qt, plen
    cdef int64_t f, value = 0

    to_arr = np.empty(2 * m, dtype=np.int64)
    cap_arr = np.zeros(2 * m, dtype=np.int64)
    start_arr = np.zeros(num_nodes + 1, dtype=np.int64)
    cdef int64_t[::1] to = to_arr
    cdef int64_t[::1] cap = cap_arr
    cdef int64_t[::1] start = start_arr
    for e in range(m):
        to[2 * e] = hd[e]
        cap[2 * e] = cp0[e]
        to[2 * e + 1] = tl[e]
        start[tl[e] + 1] += 1
        start[hd[e] + 1] += 1
    for v in range(num_nodes):
        start[v + 1] += start[v]
    fill_arr = np.array(start_arr[:num_nodes], dtype=np.int64)
    adj_arr = np.empty(2 * m, dtype=np.int64)
    cdef int64_t[::1] fill = fill_arr
    cdef int64_t[::1] adj = adj_arr
    for e in range(m):
        adj[fill[tl[e]]] = 2 * e
        fill[tl[e]] += 1
        adj[fill[hd[e]]] = 2 * e + 1
        fill[hd[e]] += 1

    level_arr = np.empty(num_nodes, dtype=np.int64)
    it_arr = np.empty(num_nodes, dtype=np.int64)
    queue_arr = np.empty(num_nodes, dtype=np.int64)
    path_arr = np.empty(num_nodes + 1, dtype=np.int64)
    cdef int64_t[::1] level = level_arr
    cdef int64_t[::1] it = it_arr
    cdef int64_t[::1] queue = queue_arr
    cdef int64_t[::1] path = path_arr

    while True:
        for v in range(num_nodes):
            level[v] = -1
        level[s] = 0
        queue[0] = s
        qh = 0
        qt = 1
        while qh < qt:
            v = queue[qh]
            qh += 1
            for k in range(start[v], start[v + 1]):
                a = adj[k]
                w = to[a]
                if cap[a] > 0 and level[w] < 0:
                    level[w] = level[v] + 1
                    queue[qt] = w
                    qt += 1
        if level[t] < 0:
            break
        for v in range(num_nodes):
            it[v] = start[v]
        while True:
            # one augmenting path along the level graph
            plen = 0
            v = s
            f = 0
            while True:
                if v == t:
                    f = cap[path[0]]
                    for k in range(1, plen):
                        if cap[path[k]] < f:
                            f = cap[path[k]]
                    for k in range(plen):
                        cap[path[k]] -= f
                        cap[path[k] ^ 1] += f
                    break
                k = it[v]
                while k < start[v + 1]:
                    a = adj[k]
                    if cap[a] > 0 and level[to[a]] == level[v] + 1:
                        break
                    k += 1
                it[v] = k
                if k < start[v + 1]:
                    path[plen] = adj[k]
                    plen += 1
                    v = to[adj[k]]
                    continue
                if v == s:
                    break
                level[v] = -1
                plen -= 1
                v = to[path[plen] ^ 1]
                it[v] += 1
            if f == 0:
                break
            value += f

    flows = np.empty(m, dtype=np.int64)
    cdef int64_t[::1] fl = flows
    for e in range(m):
        fl[e] = cp0[e] - cap[2 * e]
    return value, flows, level_arr >= 0


def upset_masks(int n):
    if n == 0:
        return np.array([0, 1], dtype=np.uint64)
    prev_arr = upset_masks(n - 1)
    cdef uint64_t[::1] prev = prev_arr
    cdef Py_ssize_t p = prev.shape[0]
    cdef Py_ssize_t i, j, cnt = 0
    cdef uint64_t a0
    cdef int shift = 1 << (n - 1)
    # first pass counts, second fills
    for i in range(p):
        a0 = prev[i]
        for j in range(p):
            if prev[j] & a0 == a0:
                cnt += 1
    out_arr = np.empty(cnt, dtype=np.uint64)
    cdef uint64_t[::1] out = out_arr
    cnt = 0
    for i in range(p):
        a0 = prev[i]
        for j in range(p):
            if prev[j] & a0 == a0:
                out[cnt] = a0 | (prev[j] << shift)
                cnt += 1
    return out_arr


cdef inline int64_t _wi(int64_t[:, ::1] tab, int nb, uint64_t mask) nogil:
    cdef int64_t total = 0
    cdef int k
    for k in range(nb):
        total += tab[k, (mask >> (8 * k)) & 255]
    return total


cdef inline double _wf(double[:, ::1] tab, int nb, uint64_t mask) nogil:
    cdef double total = 0.0
    cdef int k
    for k in range(nb):
        total += tab[k, (mask >> (8 * k)) & 255]
    return total


def fkg_scan(masks, weights, w_event, bint exact, double tol):
    """Exact mode expects int64 weights whose pairwise products fit in int128."""
    from movelab._pykernels import byte_tables
    cdef uint64_t[::1] ms = np.ascontiguousarray(masks, dtype=np.uint64)
    cdef Py_ssize_t k = ms.shape[0]
    cdef Py_ssize_t i, j
    cdef int nb
    cdef int64_t[:, ::1] ti
    cdef double[:, ::1] tf
    cdef int64_t[::1] wsi
    cdef double[::1] wsf
    cdef int64_t ev_i
    cdef double ev_f
    tabs = byte_tables(list(weights))
    nb = len(tabs)
    if exact:
        ti = np.array(tabs, dtype=np.int64)
        ev_i = w_event
        wsi = np.empty(k, dtype=np.int64)
        for i in range(k):
            wsi[i] = _wi(ti, nb, ms[i])
        for i in range(k):
            for j in range(i, k):
                if <int128>_wi(ti, nb, ms[i] & ms[j]) * ev_i < <int128>wsi[i] * wsi[j]:
                    return int(i), int(j)
    else:
        tf = np.array(tabs, dtype=np.float64)
        ev_f = w_event
        wsf = np.empty(k, dtype=np.float64)
        for i in range(k):
            wsf[i] = _wf(tf, nb, ms[i])
        for i in range(k):
            for j in range(i, k):
                if _wf(tf, nb, ms[i] & ms[j]) * ev_f < wsf[i] * wsf[j] - tol:
                    return int(i), int(j)
    return None
