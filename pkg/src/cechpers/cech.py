"""Exact Čech filtrations with minimal-enclosing-ball radii."""
from dataclasses import dataclass
from math import comb

import numpy as np
from scipy.spatial import cKDTree
import scipy.sparse as sp

from . import _kernels as K

#: default cap on the projected number of materialized simplices
DEFAULT_BUDGET = 50_000_000


class SimplexBudgetError(RuntimeError):
    """Raised when a construction would exceed the simplex budget."""

    def __init__(self, count, budget, what="projected simplex count"):
        self.count = int(count)
        self.budget = int(budget)
        super().__init__(f"{what} {self.count} exceeds budget {self.budget}")


@dataclass(frozen=True)
class Ball:
    center: np.ndarray
    radius: float


@dataclass(frozen=True)
class Simplex:
    vertices: tuple
    value: float

    @property
    def dim(self):
        return len(self.vertices) - 1


def _ball_from(support):
    """Circumscribed ball of an affinely independent support set."""
    S = np.asarray(support, dtype=float)
    if len(S) == 1:
        return S[0].copy(), 0.0
    A = S[1:] - S[0]
    G = A @ A.T
    try:
        lam = np.linalg.solve(G, 0.5 * np.diag(G))
    except np.linalg.LinAlgError:
        lam = np.linalg.lstsq(G, 0.5 * np.diag(G), rcond=None)[0]
    c = S[0] + lam @ A
    return c, float(np.max(np.linalg.norm(S - c, axis=1)))


def _inside(p, c, r, tol):
    return np.linalg.norm(p - c) <= r + tol


def min_enclosing_ball(points, tol=1e-12):
    """Smallest ball containing a small point set (Welzl with move-to-front).

    Parameters
    ----------
    points : array_like, shape (k, d)
        At most a handful of points; duplicates and degenerate layouts are fine.
    tol : float
        Slack used in the in-ball tests.

    Returns
    -------
    Ball
    """
    X = np.atleast_2d(np.asarray(points, dtype=float))
    # canonical order keeps the result independent of vertex labels
    X = X[np.lexsort(X.T[::-1])] if X.size else X
    P = [np.asarray(p) for p in X]
    if len(P) == 0:
        raise ValueError("need at least one point")
    scale = max(1.0, max(float(np.abs(p).max()) for p in P))
    eps = tol * scale

    L = list(P)
    d = P[0].shape[0]

    def mtf(end, support):
        # smallest ball of L[:end] with `support` on its boundary
        if support:
            c, r = _ball_from(support)
        else:
            c, r = None, -1.0
        if len(support) == d + 1:
            return c, r
        for i in range(end):
            p = L[i]
            if r < 0 or not _inside(p, c, r, eps):
                c, r = mtf(i, support + [p])
                L.insert(0, L.pop(i))
        return c, r

    c, r = mtf(len(L), [])
    return Ball(np.asarray(c), float(r))


def _as_points(cloud):
    P = getattr(cloud, "points", cloud)
    return np.ascontiguousarray(np.asarray(P, dtype=float))


def critical_value_bound(cloud, max_grid=2_000_000):
    """Upper bound on every critical value of the distance function d_A.

    Critical points of d_A lie in the convex hull of A and d_A is
    1-Lipschitz, so the maximum of d_A over grid points near the hull plus
    half a grid-cell diagonal bounds every critical value.  Above the bound
    the offsets, hence the Čech complexes, no longer change homotopy type.
    """
    from scipy.spatial import ConvexHull, QhullError
    P = _as_points(cloud)
    n, d = P.shape
    if n == 1:
        return 0.0
    lo, hi = P.min(axis=0), P.max(axis=0)
    ext = np.maximum(hi - lo, 1e-12)
    h = float(np.prod(ext) / max_grid) ** (1.0 / d)
    h = min(h, float(ext.max()) / 8)
    slack = 0.5 * h * np.sqrt(d)
    axes = [np.arange(lo[j] - h, hi[j] + 2 * h, h) for j in range(d)]
    Z = np.stack(np.meshgrid(*axes, indexing="ij"), -1).reshape(-1, d)
    dist = cKDTree(P).query(Z)[0]
    try:
        eq = ConvexHull(P).equations
    except (QhullError, ValueError):
        return float(dist.max()) + slack  # flat or tiny input: the bounding box contains the hull
    # scan grid points by decreasing distance; the first one near the hull gives the maximum
    order = np.argsort(-dist)
    for a in range(0, len(order), 8192):
        idx = order[a:a + 8192]
        inside = np.nonzero(np.all(Z[idx] @ eq[:, :-1].T + eq[:, -1] <= slack, axis=1))[0]
        if len(inside):
            return float(dist[idx[inside[0]]]) + slack
    return slack


def full_radius_cap(cloud, max_grid=2_000_000):
    """Radius cap beyond which the Čech filtration is homologically constant.

    The smaller of the critical-value bound and the centroid enclosing
    radius (the full simplex is present from the enclosing radius on).
    """
    P = _as_points(cloud)
    enclosing = float(np.max(np.linalg.norm(P - P.mean(axis=0), axis=1)))
    return min(enclosing, critical_value_bound(P, max_grid)) + 1e-6


def projected_counts(degrees, max_dim):
    """Upper bounds on the clique counts per dimension of a proximity graph."""
    degrees = np.asarray(degrees, dtype=np.int64)
    out = [len(degrees)]
    for k in range(1, max_dim + 1):
        out.append(int(sum(comb(int(d), k) for d in degrees) // (k + 1)))
    return out


def proximity_graph(P, radius_cap):
    """Čech edges (value <= cap) as a sorted pair list and a symmetric CSR graph."""
    n = len(P)
    tree = cKDTree(P)
    pairs = tree.query_pairs(2.0 * radius_cap * (1 + 1e-9), output_type="ndarray").astype(np.int64)
    if len(pairs) == 0:
        pairs = np.zeros((0, 2), np.int64)
    pairs = np.sort(pairs, axis=1)
    keep, vals = K.edge_list(P, pairs, float(radius_cap))
    E = pairs[keep]
    ev = vals[keep]
    order = np.lexsort((E[:, 1], E[:, 0]))
    E, ev = E[order], ev[order]
    A = sp.coo_matrix((np.ones(2 * len(E)), (np.r_[E[:, 0], E[:, 1]], np.r_[E[:, 1], E[:, 0]])), shape=(n, n)).tocsr()
    A.sort_indices()
    return E, ev, A.indptr.astype(np.int64), A.indices.astype(np.int64)


def _check_codes(n, max_dim):
    if n > 1 and (max_dim + 1) * np.log2(max(n, 2)) >= 62:
        raise ValueError(f"n={n} too large for simplex codes at max_dim={max_dim}")


def _codes(V, n):
    # positional base-n code; increasing in lexicographic vertex order
    codes = np.zeros(len(V), np.int64)
    for t in range(V.shape[1]):
        codes = codes * n + V[:, t]
    return codes


class Filtration:
    """Simplices sorted by (value, dimension, lexicographic vertices).

    Simplices are held per dimension as lexicographically sorted vertex arrays
    (`verts[k]`, shape (m_k, k+1)) with values `vals[k]`; `dims`, `rows` and
    `values` list the simplices in filtration order.
    """

    def __init__(self, verts, vals, radius_cap, n_points=None):
        self.verts = [np.asarray(v, dtype=np.int64) for v in verts]
        self.vals = [np.asarray(v, dtype=float) for v in vals]
        self.max_dim = len(self.verts) - 1
        self.radius_cap = float(radius_cap)
        self.n_points = len(self.verts[0]) if n_points is None else n_points
        self.codes = [_codes(V, self.n_points) for V in self.verts]
        dims = np.concatenate([np.full(len(v), k) for k, v in enumerate(self.vals)])
        rows = np.concatenate([np.arange(len(v)) for v in self.vals])
        allv = np.concatenate(self.vals)
        allc = np.concatenate(self.codes)
        perm = np.lexsort((allc, dims, allv))
        self.dims = dims[perm]
        self.rows = rows[perm]
        self.values = allv[perm]
        # filtration position of every simplex, per dimension
        self.position = [np.empty(len(v), np.int64) for v in self.vals]
        for k in range(self.max_dim + 1):
            sel = self.dims == k
            self.position[k][self.rows[sel]] = np.nonzero(sel)[0]

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        for k, r, v in zip(self.dims, self.rows, self.values):
            yield Simplex(tuple(int(x) for x in self.verts[k][r]), float(v))

    @property
    def simplices(self):
        return list(self)

    def counts(self):
        return [len(v) for v in self.vals]

    def index_of(self, vertices):
        """Row of a simplex in its dimension, or -1."""
        v = np.sort(np.asarray(vertices, dtype=np.int64))
        k = len(v) - 1
        if k > self.max_dim:
            return -1
        c = K.encode(v, self.n_points)
        pos = np.searchsorted(self.codes[k], c)
        if pos < len(self.codes[k]) and self.codes[k][pos] == c:
            return int(pos)
        return -1

    def boundary(self):
        """Boundary matrix (CSC, sorted rows) indexed by filtration position."""
        N = len(self)
        col_parts, row_parts = [], []
        for k in range(1, self.max_dim + 1):
            V = self.verts[k]
            if len(V) == 0:
                continue
            for drop in range(k + 1):
                codes = _codes(np.delete(V, drop, axis=1), self.n_points)
                pos = np.searchsorted(self.codes[k - 1], codes)
                row_parts.append(self.position[k - 1][pos])
                col_parts.append(self.position[k])
        if not row_parts:
            return sp.csc_matrix((N, N), dtype=np.int8)
        rows = np.concatenate(row_parts)
        cols = np.concatenate(col_parts)
        M = sp.csc_matrix((np.ones(len(rows), np.int8), (rows, cols)), shape=(N, N))
        M.sort_indices()
        return M

    def to_csv(self, path):
        with open(path, "w") as fh:
            for k, r, v in zip(self.dims, self.rows, self.values):
                fh.write(f"{k},{float(v)!r},{':'.join(str(int(x)) for x in self.verts[k][r])}\n")

    @classmethod
    def from_csv(cls, path, radius_cap=None):
        per = {}
        with open(path) as fh:
            for line in fh:
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                k, v, vs = line.split(",")
                per.setdefault(int(k), []).append((tuple(int(x) for x in vs.split(":")), float(v)))
        top = max(per)
        verts, vals = [], []
        for k in range(top + 1):
            items = sorted(per.get(k, []))
            verts.append(np.array([s for s, _ in items], dtype=np.int64).reshape(-1, k + 1))
            vals.append(np.array([v for _, v in items]))
        cap = radius_cap if radius_cap is not None else max(float(np.max(v)) if len(v) else 0.0 for v in vals)
        return cls(verts, vals, cap)


def _canonical(P):
    """Points in lexicographic coordinate order and the original label of each row.

    Kernels evaluate simplices with vertices in ascending index order, so this
    makes every value independent of how the input is labelled.
    """
    label = np.lexsort(P.T[::-1]).astype(np.int64) if len(P) else np.zeros(0, np.int64)
    return np.ascontiguousarray(P[label]), label


def build_filtration(cloud, max_dim, radius_cap, budget=DEFAULT_BUDGET):
    """Čech filtration of a point cloud up to a dimension and radius cap.

    Parameters
    ----------
    cloud : PointCloud or array_like, shape (n, d)
    max_dim : int
        Highest simplex dimension (degree-i diagrams need max_dim = i + 1).
    radius_cap : float
        Largest filtration value kept.
    budget : int
        Bound on the projected simplex count; exceeding it raises
        :class:`SimplexBudgetError`.

    Returns
    -------
    Filtration
    """
    if max_dim < 0:
        raise ValueError("max_dim must be >= 0")
    if not radius_cap > 0:
        raise ValueError("radius_cap must be positive")
    P, label = _canonical(_as_points(cloud))
    n = len(P)
    _check_codes(n, max_dim)
    verts = [np.arange(n, dtype=np.int64)[:, None]]
    vals = [np.zeros(n)]
    if max_dim >= 1:
        E, ev, indptr, indices = proximity_graph(P, radius_cap)
        proj = sum(projected_counts(np.diff(indptr), max_dim))
        if budget is not None and proj > budget:
            raise SimplexBudgetError(proj, budget)
        verts.append(E)
        vals.append(ev)
        for k in range(2, max_dim + 1):
            S = verts[-1]
            V, vv = K.expand(P, indptr, indices, S, vals[-1], _codes(S, n), float(radius_cap), n)
            verts.append(V.reshape(-1, k + 1))
            vals.append(vv)
    for k in range(len(verts)):
        V = np.sort(label[verts[k]], axis=1)
        o = np.lexsort(V.T[::-1])
        verts[k], vals[k] = V[o], vals[k][o]
    return Filtration(verts, vals, radius_cap, n_points=n)


def brute_force_filtration(cloud, max_dim, radius_cap):
    """All vertex subsets with Welzl radius <= cap (tests and small inputs only)."""
    from itertools import combinations

    P = _as_points(cloud)
    n = len(P)
    out = {}
    for k in range(max_dim + 1):
        for sub in combinations(range(n), k + 1):
            r = min_enclosing_ball(P[list(sub)]).radius
            if r <= radius_cap:
                out[sub] = r
    return out
