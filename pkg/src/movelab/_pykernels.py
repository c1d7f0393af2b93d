"""Pure-Python kernels.

Same call signatures as the compiled ``_ckernels`` module.  Every function
here must stay usable on arbitrary-precision Python ints, because exact-mode
measures whose common denominator overflows 64 bits always land here.
"""

import numpy as np


def sweep_int(nums, n, m00, m01, m10, m11):
    """Apply the integer 2x2 matrix ``[[m00, m01], [m10, m11]]`` at every site.

    ``nums[x]`` is indexed by bitmask; row = old site value, column = new.
    Works on Python ints of any size (object arrays keep them unbounded).
    """
    v = np.array(nums, dtype=object)
    for i in range(n):
        view = v.reshape(-1, 2, 1 << i)
        lo = view[:, 0, :].copy()
        hi = view[:, 1, :].copy()
        view[:, 0, :] = lo * m00 + hi * m10
        view[:, 1, :] = lo * m01 + hi * m11
    return v.tolist()


def sweep_float(arr, n, m00, m01, m10, m11):
    v = np.array(arr, dtype=np.float64)
    for i in range(n):
        view = v.reshape(-1, 2, 1 << i)
        lo = view[:, 0, :].copy()
        hi = view[:, 1, :].copy()
        view[:, 0, :] = lo * m00 + hi * m10
        view[:, 1, :] = lo * m01 + hi * m11
    return v


def dinic(num_nodes, s, t, tails, heads, caps):
    """Max flow by Dinic's algorithm.

    Returns ``(value, edge_flows, reachable)`` where ``reachable[v]`` marks
    the source side of a minimum cut (residual reachability after the final
    phase).  ``caps`` entries may be any Python ints.
    """
    m = len(tails)
    to = [0] * (2 * m)
    cap = [0] * (2 * m)
    adj = [[] for _ in range(num_nodes)]
    for e in range(m):
        u, w = tails[e], heads[e]
        to[2 * e] = w
        cap[2 * e] = caps[e]
        to[2 * e + 1] = u
        adj[u].append(2 * e)
        adj[w].append(2 * e + 1)

    value = 0
    while True:
        level = [-1] * num_nodes
        level[s] = 0
        queue = [s]
        head = 0
        while head < len(queue):
            v = queue[head]
            head += 1
            for a in adj[v]:
                if cap[a] > 0 and level[to[a]] < 0:
                    level[to[a]] = level[v] + 1
                    queue.append(to[a])
        if level[t] < 0:
            break
        it = [0] * num_nodes
        while True:
            pushed = _augment(s, t, adj, to, cap, level, it)
            if not pushed:
                break
            value += pushed

    reachable = [lv >= 0 for lv in level]
    flows = [caps[e] - cap[2 * e] for e in range(m)]
    return value, flows, reachable


def _augment(s, t, adj, to, cap, level, it):
    path = []
    v = s
    while True:
        if v == t:
            f = min(cap[a] for a in path)
            for a in path:
                cap[a] -= f
                cap[a ^ 1] += f
            return f
        arcs = adj[v]
        k = it[v]
        while k < len(arcs):
            a = arcs[k]
            w = to[a]
            if cap[a] > 0 and level[w] == level[v] + 1:
                break
            k += 1
        it[v] = k
        if k < len(arcs):
            path.append(arcs[k])
            v = to[arcs[k]]
            continue
        if v == s:
            return 0
        level[v] = -1
        a = path.pop()
        v = to[a ^ 1]
        it[v] += 1


def upset_masks(n):
    """All up-sets of {0,1}^n as bitmasks over the 2^n configurations (n <= 6).

    Recursion on the top site: an up-set is a pair (A0, A1) of up-sets of
    the (n-1)-cube with A0 contained in A1.
    """
    if n == 0:
        return np.array([0, 1], dtype=np.uint64)
    prev = upset_masks(n - 1)
    shift = np.uint64(1 << (n - 1))
    out = []
    for a0 in prev:
        sup = prev[(prev & a0) == a0]
        out.append(a0 | (sup << shift))
    return np.concatenate(out)


def byte_tables(weights):
    """Per-byte partial sums: weight of a mask = sum of tables[k][byte k]."""
    nbytes = max(1, (len(weights) + 7) // 8)
    zero = weights[0] - weights[0]
    tables = []
    for k in range(nbytes):
        tab = [zero] * 256
        for b in range(1, 256):
            low = b & -b
            idx = 8 * k + low.bit_length() - 1
            tab[b] = tab[b ^ low] + (weights[idx] if idx < len(weights) else zero)
        tables.append(tab)
    return tables


def mask_weight(tables, mask):
    total = tables[0][mask & 255]
    for k in range(1, len(tables)):
        total = total + tables[k][(mask >> (8 * k)) & 255]
    return total


def fkg_scan(masks, weights, w_event, exact, tol):
    """First index pair (i, j), i <= j, of up-set masks violating
    ``w(A_i & A_j) * w_event >= w(A_i) * w(A_j)``, else None.

    ``weights[x]`` is the (restricted, unnormalized) mass of configuration x.
    Exact mode compares Python ints; float mode allows ``tol`` slack.
    """
    tables = byte_tables(weights)
    ms = [int(a) for a in masks]
    ws = [mask_weight(tables, a) for a in ms]
    k = len(ms)
    for i in range(k):
        ai = ms[i]
        wi = ws[i]
        for j in range(i, k):
            lhs = mask_weight(tables, ai & ms[j]) * w_event
            rhs = wi * ws[j]
            if (lhs < rhs) if exact else (lhs < rhs - tol):
                return i, j
    return None
