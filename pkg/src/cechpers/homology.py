"""Persistence diagrams of Čech filtrations over GF(2)."""
import warnings

import numpy as np

from . import _kernels as K
from .cech import (DEFAULT_BUDGET, _canonical, SimplexBudgetError, Filtration, _as_points, _codes,
                   _check_codes, build_filtration, projected_counts, proximity_graph)

#: default cap on projected simplices touched by the implicit engine
DEFAULT_IMPLICIT_BUDGET = 5_000_000_000


class PersistenceDiagram:
    """Finite (birth, death) pairs of one degree plus essential births.

    Parameters
    ----------
    degree : int
    points : array_like, shape (N, 2)
        Finite pairs with birth < death.
    essential : array_like
        Births of classes still alive at the radius cap.
    """

    def __init__(self, degree, points=(), essential=()):
        self.degree = int(degree)
        pts = np.asarray(points, dtype=float).reshape(-1, 2)
        if len(pts):
            pts = pts[np.lexsort((pts[:, 1], pts[:, 0]))]
        self.points = pts
        self.essential = np.sort(np.asarray(essential, dtype=float).ravel())

    def __len__(self):
        return len(self.points)

    def __repr__(self):
        return f"PersistenceDiagram(degree={self.degree}, finite={len(self)}, essential={len(self.essential)})"

    def __eq__(self, other):
        return (isinstance(other, PersistenceDiagram) and self.degree == other.degree
                and np.array_equal(self.points, other.points)
                and np.array_equal(self.essential, other.essential))

    @property
    def births(self):
        return self.points[:, 0]

    @property
    def deaths(self):
        return self.points[:, 1]

    def persistence(self):
        """Half-lifetimes (death - birth) / 2."""
        return 0.5 * (self.points[:, 1] - self.points[:, 0])

    def select(self, mask):
        return PersistenceDiagram(self.degree, self.points[np.asarray(mask, bool)], ())

    def alive_at(self, t):
        """Number of classes alive at radius t (finite and essential)."""
        p = self.points
        return int(np.sum((p[:, 0] <= t) & (t < p[:, 1])) + np.sum(self.essential <= t))


def _from_pairs(max_degree, dims, births, deaths, ess_dims, ess_births):
    out = []
    for i in range(max_degree + 1):
        sel = (dims == i) & (births < deaths)
        out.append(PersistenceDiagram(i, np.c_[births[sel], deaths[sel]], ess_births[ess_dims == i]))
    return out


def compute_diagrams(filt: Filtration, method="twist"):
    """Persistence diagrams of degrees 0 .. max_dim-1.

    Parameters
    ----------
    filt : Filtration
    method : {"twist", "dual"}
        Homology reduction with clearing, or the equivalent cohomology
        reduction (identical pairs, usually far fewer column operations).

    Returns
    -------
    list of PersistenceDiagram
    """
    top = filt.max_dim
    if top < 1:
        return []
    N = len(filt)
    dims = filt.dims
    vals = filt.values
    B = filt.boundary()
    if method == "twist":
        lows, cols = K.reduce_twist(B.indptr.astype(np.int64), B.indices.astype(np.int64),
                                    dims.astype(np.int64), top)
        paired = np.zeros(N, bool)
        paired[lows] = True
        paired[cols] = True
        ess = np.nonzero(~paired & (dims < top))[0]
        pd, pb, pdd = dims[lows], vals[lows], vals[cols]
    elif method == "dual":
        C = B.T.tocsc()
        C.sort_indices()
        cols, pivs, ess = K.reduce_dual(C.indptr.astype(np.int64), C.indices.astype(np.int64),
                                        dims.astype(np.int64), top)
        pd, pb, pdd = dims[cols], vals[cols], vals[pivs]
    else:
        raise ValueError(f"unknown method {method!r}")
    return _from_pairs(top - 1, pd, pb, pdd, dims[ess], vals[ess])


#: bound on live entries of one working column in the implicit engine
DEFAULT_HEAP_BUDGET = 30_000_000


def _implicit(P, max_degree, radius_cap, budget, heap_budget=DEFAULT_HEAP_BUDGET):
    P = _canonical(P)[0]
    n = len(P)
    if max_degree > 2:
        raise ValueError("the implicit engine supports degrees up to 2")
    _check_codes(n, max_degree + 1)
    E, ev, indptr, indices = proximity_graph(P, radius_cap)
    proj = projected_counts(np.diff(indptr), max_degree + 1)
    if budget is not None and sum(proj) > budget:
        raise SimplexBudgetError(sum(proj), budget)
    if max_degree >= 2 and sum(proj[:3]) > DEFAULT_BUDGET * 4:
        # triangles are materialized for the degree-2 stage
        raise SimplexBudgetError(sum(proj[:3]), DEFAULT_BUDGET * 4)
    codes = _codes(E, n)
    order = np.lexsort((codes, ev))
    E, ev, codes = E[order], ev[order], codes[order]
    neg = K.union_find_h0(n, E, np.arange(len(E)))
    dgms = [PersistenceDiagram(0, np.c_[np.zeros(int(neg.sum())), ev[neg]][ev[neg] > 0],
                               np.zeros(n - int(neg.sum())))]
    del E
    Sc, Sv, skip = codes, ev, neg
    cap = float(radius_cap)
    for k in range(1, max_degree + 1):
        want = k < max_degree
        b, d, ess, piv, status = K.cohomology_stage(P, indptr, indices, Sc, k + 1, Sv, skip, cap, n,
                                                    want, int(heap_budget))
        if status:
            raise SimplexBudgetError(status, heap_budget, "working cochain size")
        dgms.append(PersistenceDiagram(k, np.c_[b, d], ess))
        if want:
            del Sc, Sv, skip
            tc, tv = K.triangles(P, indptr, indices, cap)
            o = np.lexsort((tc, tv))
            tc = tc[o]
            tv = tv[o]
            del o
            piv.sort()
            pos = np.minimum(np.searchsorted(piv, tc), max(len(piv) - 1, 0))
            skip = (piv[pos] == tc) if len(piv) else np.zeros(len(tc), bool)
            del pos
            Sc, Sv = tc, tv
    return dgms


def cech_diagrams(cloud, max_degree, radius_cap, method="implicit", budget=None):
    """Čech persistence diagrams of degrees 0 .. max_degree of a point cloud.

    Parameters
    ----------
    cloud : PointCloud or array_like, shape (n, d)
    max_degree : int
    radius_cap : float
        Classes alive at the cap are reported as essential.
    method : {"implicit", "twist", "dual"}
        "implicit" runs a cohomology reduction that enumerates cofacets on the
        fly from the proximity graph and never stores the top dimension;
        "twist"/"dual" build the explicit filtration first.
    budget : int, optional
        Projected simplex budget (defaults depend on the method).
    """
    P = _as_points(cloud)
    if method == "implicit":
        return _implicit(P, max_degree, radius_cap, DEFAULT_IMPLICIT_BUDGET if budget is None else budget)
    filt = build_filtration(P, max_degree + 1, radius_cap, budget=DEFAULT_BUDGET if budget is None else budget)
    return compute_diagrams(filt, method=method)


def _gf2_rank(columns):
    basis = {}
    for v in columns:
        while v:
            h = v.bit_length() - 1
            if h in basis:
                v ^= basis[h]
            else:
                basis[h] = v
                break
    return len(basis)


def _boundary_rank(filt, k, t):
    """Rank over GF(2) of the boundary map on k-simplices with value <= t."""
    if k < 1 or k > filt.max_dim:
        return 0
    rows = {}
    for r in np.nonzero(filt.vals[k - 1] <= t)[0]:
        rows[tuple(filt.verts[k - 1][r])] = len(rows)
    cols = []
    for r in np.nonzero(filt.vals[k] <= t)[0]:
        s = tuple(int(x) for x in filt.verts[k][r])
        v = 0
        for drop in range(k + 1):
            v |= 1 << rows[s[:drop] + s[drop + 1:]]
        cols.append(v)
    return _gf2_rank(cols)


def betti_at(filt: Filtration, t, i):
    """Rank of degree-i homology of the subcomplex with values <= t (GF(2))."""
    if i > filt.max_dim - 1 or i < 0:
        warnings.warn(f"degree {i} is not resolved by a filtration of max_dim {filt.max_dim}; returning 0")
        return 0
    n_i = int(np.sum(filt.vals[i] <= t))
    return n_i - _boundary_rank(filt, i, t) - _boundary_rank(filt, i + 1, t)


def write_diagrams(dgms, path):
    with open(path, "w") as fh:
        fh.write("degree,birth,death\n")
        for d in dgms:
            for b, e in d.points:
                fh.write(f"{d.degree},{float(b)!r},{float(e)!r}\n")
            for b in d.essential:
                fh.write(f"{d.degree},{float(b)!r},inf\n")


def read_diagrams(path):
    per = {}
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#") or line.startswith("degree"):
                continue
            k, b, e = line.split(",")
            fin, ess = per.setdefault(int(k), ([], []))
            e = float(e)
            if np.isinf(e):
                ess.append(float(b))
            else:
                fin.append((float(b), e))
    top = max(per) if per else -1
    return [PersistenceDiagram(k, *per.get(k, ([], []))) for k in range(top + 1)]
