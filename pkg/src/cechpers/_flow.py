"""Primal network simplex for dense transportation problems (real-valued).

Supply nodes 0..S-1 ship to demand nodes S..S+T-1 over a complete bipartite
arc set with cost matrix C; node S+T is an artificial root joined to every
node by an arc of cost M > max(C) / 2, so no optimal basis carries
artificial flow.  Trees are kept strongly feasible and the leaving arc is
the last blocking arc on the cycle, which rules out cycling under
degeneracy.
"""
import numpy as np
from numba import njit


@njit(cache=True)
def _arc(a, S, T, C, M):
    ST = S * T
    if a < ST:
        s = a // T
        t = a - s * T
        return s, S + t, C[s, t]
    if a < ST + S:
        return a - ST, S + T, M
    return S + T, S + (a - ST - S), M


@njit(cache=True)
def _rebuild(barc, S, T, C, M, parent, pred, up, depth, pot):
    V = S + T + 1
    root = S + T
    deg = np.zeros(V + 1, np.int64)
    for k in range(V - 1):
        u, v, _ = _arc(barc[k], S, T, C, M)
        deg[u + 1] += 1
        deg[v + 1] += 1
    for i in range(V):
        deg[i + 1] += deg[i]
    fill = deg[:V].copy()
    adj = np.empty(2 * (V - 1), np.int64)
    for k in range(V - 1):
        u, v, _ = _arc(barc[k], S, T, C, M)
        adj[fill[u]] = barc[k]
        fill[u] += 1
        adj[fill[v]] = barc[k]
        fill[v] += 1
    queue = np.empty(V, np.int64)
    queue[0] = root
    parent[root] = -1
    pred[root] = -1
    depth[root] = 0
    pot[root] = 0.0
    head, tail = 0, 1
    while head < tail:
        x = queue[head]
        head += 1
        for q in range(deg[x], deg[x + 1]):
            a = adj[q]
            if a == pred[x]:
                continue
            u, v, c = _arc(a, S, T, C, M)
            y = v if u == x else u
            parent[y] = x
            pred[y] = a
            depth[y] = depth[x] + 1
            if u == y:
                # arc y -> x points up
                up[y] = True
                pot[y] = pot[x] - c
            else:
                up[y] = False
                pot[y] = pot[x] + c
            queue[tail] = y
            tail += 1


@njit(cache=True)
def transport(supply, demand, C):
    """Minimum-cost flow; returns (flow matrix S x T, cost, pivots)."""
    S = supply.shape[0]
    T = demand.shape[0]
    V = S + T + 1
    root = S + T
    cmax = 0.0
    for s in range(S):
        for t in range(T):
            if C[s, t] > cmax:
                cmax = C[s, t]
    M = cmax + 1.0
    tol = 1e-12 * M
    ST = S * T
    A = ST + S + T
    flow = np.zeros(A)
    barc = np.empty(V - 1, np.int64)
    for s in range(S):
        barc[s] = ST + s
        flow[ST + s] = supply[s]
    for t in range(T):
        barc[S + t] = ST + S + t
        flow[ST + S + t] = demand[t]
    where = np.full(A, -1, np.int64)
    for k in range(V - 1):
        where[barc[k]] = k
    parent = np.empty(V, np.int64)
    pred = np.empty(V, np.int64)
    up = np.zeros(V, np.bool_)
    depth = np.empty(V, np.int64)
    pot = np.empty(V)
    _rebuild(barc, S, T, C, M, parent, pred, up, depth, pot)
    block = max(int(np.sqrt(A)), 10)
    nxt = 0
    pivots = 0
    while True:
        # block pricing
        best = -tol
        enter = -1
        scanned = 0
        while scanned < A:
            lim = min(block, A - scanned)
            for _ in range(lim):
                a = nxt
                nxt += 1
                if nxt == A:
                    nxt = 0
                if where[a] >= 0:
                    continue
                u, v, c = _arc(a, S, T, C, M)
                rc = c + pot[u] - pot[v]
                if rc < best:
                    best = rc
                    enter = a
            scanned += lim
            if enter >= 0:
                break
        if enter < 0:
            break
        first, second, _ = _arc(enter, S, T, C, M)
        # join node
        x, y = first, second
        while x != y:
            if depth[x] >= depth[y]:
                x = parent[x]
            else:
                y = parent[y]
        join = x
        delta = np.inf
        out = -1
        x = first
        while x != join:
            if up[x]:
                d = flow[pred[x]]
                if d < delta:
                    delta = d
                    out = x
            x = parent[x]
        x = second
        while x != join:
            if not up[x]:
                d = flow[pred[x]]
                if d <= delta:
                    delta = d
                    out = x
            x = parent[x]
        flow[enter] += delta
        x = first
        while x != join:
            if up[x]:
                flow[pred[x]] -= delta
            else:
                flow[pred[x]] += delta
            x = parent[x]
        x = second
        while x != join:
            if up[x]:
                flow[pred[x]] += delta
            else:
                flow[pred[x]] -= delta
            x = parent[x]
        leave = pred[out]
        flow[leave] = 0.0
        k = where[leave]
        where[leave] = -1
        barc[k] = enter
        where[enter] = k
        _rebuild(barc, S, T, C, M, parent, pred, up, depth, pot)
        pivots += 1
    F = flow[:ST].reshape(S, T).copy()
    cost = 0.0
    for s in range(S):
        for t in range(T):
            if F[s, t] > 0.0:
                cost += F[s, t] * C[s, t]
    return F, cost, pivots
