"""Exact diagram metrics: bottleneck, OT_p and total persistence.

Ground metric is l-infinity on R^2, and the distance of u = (u1, u2) to the
diagonal is its persistence pers(u) = (u2 - u1) / 2.  Note the factor 1/2,
which many software packages omit.
"""
from dataclasses import dataclass, field
from itertools import permutations

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching


@dataclass
class PartialMatching:
    pairs: list = field(default_factory=list)
    to_diagonal_a: list = field(default_factory=list)
    to_diagonal_b: list = field(default_factory=list)
    cost: float = 0.0


@dataclass
class MetricResult:
    value: float
    matching: PartialMatching
    p: float

    def to_dict(self):
        m = self.matching
        return {"p": "inf" if np.isinf(self.p) else self.p, "value": self.value,
                "matching": [[int(i), int(j)] for i, j in m.pairs]
                + [[int(i), None] for i in m.to_diagonal_a] + [[None, int(j)] for j in m.to_diagonal_b]}


def finite_points(dgm):
    """(N, 2) array of a diagram; essential or infinite points raise ValueError."""
    ess = getattr(dgm, "essential", None)
    if ess is not None and len(ess):
        raise ValueError("diagram has essential classes; pass PersistenceDiagram(d.degree, d.points) to strip them")
    pts = getattr(dgm, "points", dgm)
    pts = np.asarray(pts, dtype=float).reshape(-1, 2)
    if not np.all(np.isfinite(pts)):
        raise ValueError("infinite coordinates in metric input")
    return pts


def pers(pts):
    pts = np.asarray(pts, dtype=float).reshape(-1, 2)
    return 0.5 * (pts[:, 1] - pts[:, 0])


def linf(a, b):
    """Pairwise l-infinity distances (|a|, |b|)."""
    if len(a) == 0 or len(b) == 0:
        return np.zeros((len(a), len(b)))
    return np.max(np.abs(a[:, None, :] - b[None, :, :]), axis=2)


def matching_cost(a, b, matching, p):
    """Cost of a partial matching, (sum c^p)^(1/p) or max c for p = inf."""
    a, b = finite_points(a), finite_points(b)
    costs = [float(np.max(np.abs(a[i] - b[j]))) for i, j in matching.pairs]
    costs += [float(pers(a[i:i + 1])[0]) for i in matching.to_diagonal_a]
    costs += [float(pers(b[j:j + 1])[0]) for j in matching.to_diagonal_b]
    if not costs:
        return 0.0
    c = np.array(costs)
    if np.isinf(p):
        return float(c.max())
    return float(np.sum(c ** p) ** (1.0 / p))


def _feasible(C, pa, pb, t):
    """Perfect matching of the augmented bipartite graph using edges of cost <= t."""
    na, nb = len(pa), len(pb)
    N = na + nb
    rows, cols = [], []
    ii, jj = np.nonzero(C <= t)
    rows.append(ii)
    cols.append(jj)
    ia = np.nonzero(pa <= t)[0]
    rows.append(ia)
    cols.append(nb + ia)
    jb = np.nonzero(pb <= t)[0]
    rows.append(na + jb)
    cols.append(jb)
    # diagonal copies match each other for free
    dr, dc = np.meshgrid(na + np.arange(nb), nb + np.arange(na), indexing="ij")
    rows.append(dr.ravel())
    cols.append(dc.ravel())
    r = np.concatenate(rows)
    c = np.concatenate(cols)
    G = csr_matrix((np.ones(len(r), dtype=np.int8), (r, c)), shape=(N, N))
    match = maximum_bipartite_matching(G, perm_type="column")
    return bool(np.all(match >= 0)), match


def _assemble(match, na, nb):
    m = PartialMatching()
    for i in range(na):
        j = int(match[i])
        if j < nb:
            m.pairs.append((i, j))
        else:
            m.to_diagonal_a.append(i)
    for k in range(nb):
        j = int(match[na + k])
        if j < nb:
            m.to_diagonal_b.append(j)
    m.to_diagonal_b.sort()
    return m


def _symmetric(fn):
    """Evaluate on a canonical argument order so d(a, b) == d(b, a) bit for bit."""
    def wrapped(a, b, *args, **kw):
        A, B = finite_points(a), finite_points(b)
        if (len(A), A.tobytes()) <= (len(B), B.tobytes()):
            return fn(A, B, *args, **kw)
        r = fn(B, A, *args, **kw)
        m = r.matching
        r.matching = PartialMatching(sorted((j, i) for i, j in m.pairs), m.to_diagonal_b, m.to_diagonal_a, m.cost)
        return r
    wrapped.__name__, wrapped.__doc__ = fn.__name__, fn.__doc__
    return wrapped


@_symmetric
def bottleneck(a, b):
    """Bottleneck distance OT_inf between two finite diagrams.

    Binary search over the sorted candidate costs (pairwise l-inf distances and
    diagonal distances) with a Hopcroft-Karp feasibility test at each step.

    Returns
    -------
    MetricResult
    """
    A, B = finite_points(a), finite_points(b)
    na, nb = len(A), len(B)
    if na + nb == 0:
        return MetricResult(0.0, PartialMatching(), np.inf)
    C = linf(A, B)
    pa, pb = pers(A), pers(B)
    cand = np.unique(np.concatenate([[0.0], C.ravel(), pa, pb]))
    lo, hi = 0, len(cand) - 1
    ok, best = _feasible(C, pa, pb, cand[hi])
    while lo < hi:
        mid = (lo + hi) // 2
        ok, match = _feasible(C, pa, pb, cand[mid])
        if ok:
            hi, best = mid, match
        else:
            lo = mid + 1
    if hi != len(cand) - 1 or best is None:
        best = _feasible(C, pa, pb, cand[hi])[1]
    m = _assemble(best, na, nb)
    m.cost = matching_cost(A, B, m, np.inf)
    return MetricResult(m.cost, m, np.inf)


def _prematched(C, pa, pb, p):
    """Points that some optimal OT_p matching sends to the diagonal.

    u can be sent to the diagonal whenever |u - v|^p >= pers(u)^p + pers(v)^p
    for every opposing v: swapping a pair (u, v) for two diagonal moves never
    increases the cost.
    """
    if C.size == 0:
        return np.ones(len(pa), bool), np.ones(len(pb), bool)
    gain = C ** p >= pa[:, None] ** p + pb[None, :] ** p
    return np.all(gain, axis=1), np.all(gain, axis=0)


@_symmetric
def wasserstein(a, b, p=2.0, prune=True):
    """OT_p distance between two finite diagrams (1 <= p < inf).

    Balanced assignment of size |a| + |b|: each point may match an opposing
    point or its own diagonal copy; diagonal copies match each other at no
    cost.  Points that provably go to the diagonal are removed first.

    Returns
    -------
    MetricResult
    """
    if not p >= 1:
        raise ValueError("p must be >= 1")
    if np.isinf(p):
        return bottleneck(a, b)
    A, B = finite_points(a), finite_points(b)
    na, nb = len(A), len(B)
    pa, pb = pers(A), pers(B)
    C = linf(A, B)
    if prune:
        da, db = _prematched(C, pa, pb, p)
    else:
        da, db = np.zeros(na, bool), np.zeros(nb, bool)
    ka, kb = np.nonzero(~da)[0], np.nonzero(~db)[0]
    m = PartialMatching(to_diagonal_a=list(np.nonzero(da)[0]), to_diagonal_b=list(np.nonzero(db)[0]))
    if len(ka) + len(kb):
        Cp = C[np.ix_(ka, kb)] ** p
        qa, qb = pa[ka] ** p, pb[kb] ** p
        big = 1.0 + 2.0 * (qa.sum() + qb.sum())
        N = len(ka) + len(kb)
        M = np.zeros((N, N))
        M[:len(ka), :len(kb)] = Cp
        M[:len(ka), len(kb):] = big
        M[:len(ka), len(kb):][np.arange(len(ka)), np.arange(len(ka))] = qa
        M[len(ka):, :len(kb)] = big
        M[len(ka):, :len(kb)][np.arange(len(kb)), np.arange(len(kb))] = qb
        rows, cols = linear_sum_assignment(M)
        for r, c in zip(rows, cols):
            if r < len(ka) and c < len(kb):
                m.pairs.append((int(ka[r]), int(kb[c])))
            elif r < len(ka):
                m.to_diagonal_a.append(int(ka[r]))
            elif c < len(kb):
                m.to_diagonal_b.append(int(kb[c]))
    m.to_diagonal_a = sorted(int(i) for i in m.to_diagonal_a)
    m.to_diagonal_b = sorted(int(j) for j in m.to_diagonal_b)
    m.pairs.sort()
    m.cost = matching_cost(A, B, m, p)
    return MetricResult(m.cost, m, float(p))


def distance(a, b, p):
    """OT_p for p in [1, inf]."""
    return bottleneck(a, b) if np.isinf(p) else wasserstein(a, b, p)


def total_persistence(a, alpha):
    """Pers_alpha(a) = sum over finite points of pers(u)^alpha."""
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    pts = getattr(a, "points", a)
    pts = np.asarray(pts, dtype=float).reshape(-1, 2)
    if len(pts) == 0:
        return 0.0
    return float(np.sum(np.sort(pers(pts)) ** alpha))


def exhaustive_distance(a, b, p):
    """OT_p by enumerating every partial matching (tiny diagrams only)."""
    A, B = finite_points(a), finite_points(b)
    na, nb = len(A), len(B)
    pa, pb = pers(A), pers(B)
    C = linf(A, B)
    best = np.inf
    # assign each point of a either an index of b or the diagonal (None)
    slots = list(range(nb)) + [None] * na
    seen = set()
    for perm in permutations(slots, na):
        if perm in seen:
            continue
        seen.add(perm)
        costs = []
        used = set()
        for i, j in enumerate(perm):
            if j is None:
                costs.append(pa[i])
            else:
                costs.append(C[i, j])
                used.add(j)
        costs += [pb[j] for j in range(nb) if j not in used]
        if not costs:
            val = 0.0
        elif np.isinf(p):
            val = max(costs)
        else:
            val = sum(c ** p for c in costs) ** (1.0 / p)
        best = min(best, val)
    return float(best) if np.isfinite(best) else 0.0
