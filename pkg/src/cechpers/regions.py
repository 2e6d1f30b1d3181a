"""Three-region decomposition of sample diagrams, reference diagrams and the distance-gap check."""
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment, minimize, minimize_scalar
from numba import njit
from scipy.spatial import cKDTree

from .homology import PersistenceDiagram
from .manifold import _embed_deformed, _same_manifold
from .metrics import bottleneck, linf, pers


@dataclass
class RegionDecomposition:
    """Partition of the finite points of a diagram by the stability regions.

    Region 1: both coordinates <= eps + eps^2/tau.  Region 2: birth <= eps and
    death >= tau - eps^2/tau.  Region 3: both coordinates >= tau - eps^2/tau.
    Everything else is a violation.
    """
    region1: PersistenceDiagram
    region2: PersistenceDiagram
    region3: PersistenceDiagram
    violations: PersistenceDiagram
    labels: np.ndarray
    source: PersistenceDiagram
    eps: float
    tau: float
    R: float
    C: float
    applicable: bool
    thresholds: dict = field(default_factory=dict)

    def counts(self):
        return {"1": len(self.region1), "2": len(self.region2), "3": len(self.region3),
                "violation": len(self.violations)}

    def to_csv(self, path):
        with open(path, "w") as fh:
            fh.write(f"# eps={self.eps!r} tau={self.tau!r} R={self.R!r} applicable={self.applicable}\n")
            fh.write("birth,death,region\n")
            for (b, d), lab in zip(self.source.points, self.labels):
                fh.write(f"{float(b)!r},{float(d)!r},{lab}\n")


def region_constant(tau, R):
    """C = (2 / tau) (1 + R / tau)."""
    return 2.0 / tau * (1.0 + R / tau)


def classify(dgm, eps, tau, R):
    """Split the finite points of `dgm` into Regions 1, 2, 3 and violations.

    Parameters
    ----------
    dgm : PersistenceDiagram
    eps : float
        Upper bound on the Hausdorff distance (pass eps_hat plus mesh bias).
    tau, R : float
        Reach and enclosing radius.

    Notes
    -----
    The decomposition is only guaranteed when eps < tau / 4; otherwise it is
    still computed and ``applicable`` is False.
    """
    pts = dgm.points
    t1 = eps + eps * eps / tau
    t3 = tau - eps * eps / tau
    applicable = bool(eps < tau / 4)
    if not applicable:
        warnings.warn(f"eps = {eps:.4g} >= tau/4 = {tau / 4:.4g}: region theorem not applicable")
    b, d = pts[:, 0], pts[:, 1]
    r1 = (b <= t1) & (d <= t1)
    r2 = ~r1 & (b <= eps) & (d >= t3)
    r3 = ~r1 & ~r2 & (b >= t3) & (d >= t3)
    bad = ~(r1 | r2 | r3)
    labels = np.where(r1, "1", np.where(r2, "2", np.where(r3, "3", "violation")))
    k = dgm.degree
    return RegionDecomposition(PersistenceDiagram(k, pts[r1]), PersistenceDiagram(k, pts[r2]),
                               PersistenceDiagram(k, pts[r3]), PersistenceDiagram(k, pts[bad]),
                               labels, PersistenceDiagram(k, pts), float(eps), float(tau), float(R),
                               region_constant(tau, R), applicable,
                               {"region1_max": t1, "region2_birth_max": eps, "upper_min": t3})


def essential_labels(dgm, eps, tau):
    """Region labels of classes still alive at a cap of at least tau - eps^2/tau.

    Such a class has death above the cap, so its region is decided by its
    birth: <= eps is Region 2, in (eps, eps + eps^2/tau] a violation, inside
    the forbidden band a band hit ("band"), otherwise Region 3.
    """
    b = np.asarray(dgm.essential, dtype=float)
    t1, t3 = eps + eps * eps / tau, tau - eps * eps / tau
    return np.where(b <= eps, "2", np.where(b <= t1, "violation", np.where(b < t3, "band", "3")))


def forbidden_band_hits(dgm, eps, tau):
    """Coordinates (finite and essential births) strictly inside (eps + eps^2/tau, tau - eps^2/tau)."""
    lo, hi = eps + eps * eps / tau, tau - eps * eps / tau
    vals = np.concatenate([dgm.points.ravel(), dgm.essential])
    return vals[(vals > lo) & (vals < hi)]


def _restricted_matching(A, B, limit):
    """Min-sum partial matching among those with every edge cost <= limit."""
    na, nb = len(A), len(B)
    C = linf(A, B)
    pa, pb = pers(A), pers(B)
    big = 1.0 + 2.0 * (C.sum() + pa.sum() + pb.sum()) + 1e6
    N = na + nb
    M = np.full((N, N), big)
    M[:na, :nb] = np.where(C <= limit, C, big)
    M[:na, nb:][np.arange(na), np.arange(na)] = np.where(pa <= limit, pa, big)
    M[na:, :nb][np.arange(nb), np.arange(nb)] = np.where(pb <= limit, pb, big)
    M[na:, nb:] = 0.0
    rows, cols = linear_sum_assignment(M)
    match = np.full(na, -1)
    for r, c in zip(rows, cols):
        if r < na and c < nb:
            match[r] = c
    return match


def region_match_errors(decomp, reference, eps_ref=0.0):
    """Compare a decomposition with a reference diagram of the manifold.

    Among bottleneck-optimal matchings the one of least total cost is used.

    Parameters
    ----------
    decomp : RegionDecomposition
    reference : PersistenceDiagram
        Finite diagram of the manifold (or a certified surrogate).
    eps_ref : float
        Tolerance on reference births of Region-2 partners.

    Returns
    -------
    dict
        bottleneck, region2_count, region2_death_error (max |u2 - v2|),
        region3_error (max l-inf displacement), flagged (Region-2 points
        matched to the diagonal or to a point born after eps_ref) and the
        matching as (source index, reference index or -1) pairs.
    """
    A = decomp.source.points
    B = reference.points
    n2 = len(decomp.region2)
    if len(B) == 0 and n2:
        raise ValueError("reference diagram is empty while Region 2 is not; reference too coarse")
    bn = bottleneck(A, B).value
    match = _restricted_matching(A, B, bn * (1 + 1e-12) + 1e-15)
    lab = decomp.labels
    e2, e3, flagged = 0.0, 0.0, []
    for k in np.nonzero(lab == "2")[0]:
        j = match[k]
        if j < 0 or B[j, 0] > eps_ref:
            flagged.append(int(k))
        e2 = max(e2, abs(A[k, 1] - B[j, 1]) if j >= 0 else float(pers(A[k:k + 1])[0]))
    for k in np.nonzero(lab == "3")[0]:
        j = match[k]
        e3 = max(e3, float(np.max(np.abs(A[k] - B[j]))) if j >= 0 else float(pers(A[k:k + 1])[0]))
    return {"bottleneck": float(bn), "region2_count": int(n2), "region2_death_error": float(e2),
            "region3_error": float(e3), "flagged": flagged,
            "matching": [(int(k), int(j)) for k, j in enumerate(match)]}


# ---------------------------------------------------------------------------
# reference diagrams of manifolds


@dataclass
class ReferenceDiagram:
    diagram: PersistenceDiagram
    birth_bias: float
    death_bias: float
    method: str


def circle_reference(r=1.0):
    """dgm_1 of a round circle: one class born at 0 and filled at the radius."""
    return ReferenceDiagram(PersistenceDiagram(1, [[0.0, float(r)]]), 0.0, 0.0, "analytic")


class _CurveDistance:
    """Exact distance to a closed planar parametrized curve (dense table + local refinement)."""

    def __init__(self, spec, diffeo=(), samples=200_000):
        low, high = spec.domain()
        self.spec, self.diffeo = spec, tuple(diffeo)
        self.lo, self.hi = float(low[0]), float(high[0])
        self.t = np.linspace(self.lo, self.hi, samples, endpoint=False)
        self.dt = (self.hi - self.lo) / samples
        self.Y = _embed_deformed(spec, self.t[:, None], self.diffeo)
        self.tree = cKDTree(self.Y)

    def gamma(self, t):
        return _embed_deformed(self.spec, np.atleast_1d(t)[:, None], self.diffeo)

    def coarse(self, Z, spacing=None):
        """Table distance; with `spacing`, a thinned table whose chord length is about `spacing`."""
        if spacing is None:
            return self.tree.query(np.atleast_2d(Z))[0]
        chord = float(np.max(np.linalg.norm(np.diff(self.Y, axis=0), axis=1)))
        step = max(1, int(spacing / chord))
        return cKDTree(self.Y[::step]).query(np.atleast_2d(Z))[0]

    def __call__(self, z):
        z = np.asarray(z, dtype=float)
        # the few nearest table points bracket every local minimizer of |gamma(t) - z|
        _, idx = self.tree.query(z, k=4)
        best = np.inf
        for k in np.atleast_1d(idx):
            t0 = self.t[k]
            res = minimize_scalar(lambda t: float(np.sum((self.gamma(t)[0] - z) ** 2)),
                                  bounds=(t0 - 1.5 * self.dt, t0 + 1.5 * self.dt), method="bounded",
                                  options={"xatol": 1e-13})
            best = min(best, res.fun)
        return float(np.sqrt(best))


@njit(cache=True)
def _superlevel_pairs(F, order, nx, ny):
    """(death, peak) of superlevel-set components on an 8-connected pixel grid."""
    parent = np.full(nx * ny, -1)
    peak = np.zeros(nx * ny)
    out = []
    for a in order:
        parent[a] = a
        peak[a] = F[a]
        i, j = divmod(a, ny)
        for di in (-1, 0, 1):
            for dj in (-1, 0, 1):
                if (di != 0 or dj != 0) and 0 <= i + di < nx and 0 <= j + dj < ny:
                    b = (i + di) * ny + j + dj
                    if parent[b] < 0:
                        continue
                    ra = a
                    while parent[ra] != ra:
                        parent[ra] = parent[parent[ra]]
                        ra = parent[ra]
                    rb = b
                    while parent[rb] != rb:
                        parent[rb] = parent[parent[rb]]
                        rb = parent[rb]
                    if ra == rb:
                        continue
                    # the component with the lower peak dies at F[a]
                    if peak[ra] < peak[rb]:
                        young, old = ra, rb
                    else:
                        young, old = rb, ra
                    out.append((F[a], peak[young]))
                    parent[young] = old
    return out


def planar_curve_reference(spec, diffeo=(), pixel=0.004, margin=0.1):
    """dgm_1 of a closed planar curve through Alexander duality.

    The rank of H_1 of the t-offset equals the number of bounded components
    of {d_M > t}.  Superlevel-set H_0 persistence of d_M on a pixel grid
    (border pixels glued to the unbounded component) therefore returns
    dgm_1(M) as pairs (saddle value, local maximum).  Maxima are refined by
    local optimization of the exact distance; saddles keep pixel accuracy.
    """
    dist = _CurveDistance(spec, diffeo)
    lo = dist.Y.min(axis=0) - margin
    hi = dist.Y.max(axis=0) + margin
    nx, ny = (np.ceil((hi - lo) / pixel).astype(int) + 1)
    xs = lo[0] + pixel * np.arange(nx)
    ys = lo[1] + pixel * np.arange(ny)
    Z = np.stack(np.meshgrid(xs, ys, indexing="ij"), -1).reshape(-1, 2)
    # a table finer than a quarter pixel keeps the grid values within pixel accuracy
    f = dist.coarse(Z, spacing=pixel / 4).reshape(nx, ny)
    f[0, :] = f[-1, :] = f[:, 0] = f[:, -1] = np.inf
    order = np.argsort(-f.ravel(), kind="stable")
    pairs = _superlevel_pairs(f.ravel(), order, nx, ny)
    # drop pixel noise, then refine each maximum by local optimization of the exact distance
    refined = []
    for s, v in pairs:
        if not np.isfinite(v) or v - s <= 2 * pixel:
            continue
        cand = np.argwhere(f == v)[0]
        z0 = np.array([xs[cand[0]], ys[cand[1]]])
        res = minimize(lambda z: -dist(z), z0, method="Nelder-Mead",
                       options={"xatol": 1e-10, "fatol": 1e-13, "maxiter": 4000})
        birth = 0.0 if s <= 2 * pixel else float(s)
        refined.append((birth, float(max(-res.fun, v))))
    dg = PersistenceDiagram(1, refined)
    return ReferenceDiagram(dg, float(pixel * np.sqrt(2)), 1e-7, "planar duality")


# ---------------------------------------------------------------------------
# quadratic gap between d_M and d_A


def exact_distance(spec, Z):
    """Distance to an undeformed circle or torus, or None for other manifolds."""
    Z = np.atleast_2d(Z)
    if spec.kind == "circle":
        return np.abs(np.linalg.norm(Z, axis=1) - spec.p["r"])
    if spec.kind == "torus":
        rho = np.hypot(Z[:, 0], Z[:, 1])
        return np.abs(np.hypot(rho - spec.p["R"], Z[:, 2]) - spec.p["r"])
    return None


def gap_bound(eps, dM, tau):
    """eps^2 / (2 d) (1 + d / tau)."""
    return eps * eps / (2 * dM) * (1 + dM / tau)


def distance_gap_check(cloud, ref, probes=1000, seed=0, tau=None, R=None):
    """Max over probes z of |d_M(z) - d_A(z)| - bound(z), with d_M(z) in [tau/4, R].

    eps is taken as eps_hat + mesh, an upper bound for the true Hausdorff
    distance.  When d_M is only known through the reference grid, the mesh is
    added to the gap tolerance and the bound is evaluated at d_ref - mesh.

    Returns
    -------
    dict with max_violation, eps, margin and the number of probes.
    """
    if not _same_manifold(cloud, ref):
        raise ValueError("cloud and reference grid describe different manifolds")
    spec = ref.spec
    tau = spec.reach if tau is None else tau
    R = spec.enclosing_radius if R is None else R
    rng = np.random.default_rng(seed)
    ref_tree = cKDTree(ref.points)
    A_tree = cKDTree(cloud.points)
    eps = float(np.max(A_tree.query(ref.points)[0])) + ref.mesh
    exact = not ref.diffeo and exact_distance(spec, ref.points[:1]) is not None
    margin = 0.0 if exact else ref.mesh
    got = []
    while sum(len(g) for g in got) < probes:
        k = 4 * probes
        base = ref.points[rng.integers(0, len(ref.points), size=k)]
        dirs = rng.normal(size=base.shape)
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        Z = base + dirs * rng.uniform(tau / 4, R, size=(k, 1))
        dM = exact_distance(spec, Z) if exact else ref_tree.query(Z)[0]
        keep = (dM >= tau / 4 + margin) & (dM <= R)
        got.append(np.c_[Z[keep], dM[keep]])
    Zd = np.vstack(got)[:probes]
    Z, dM = Zd[:, :-1], Zd[:, -1]
    dA = A_tree.query(Z)[0]
    viol = np.abs(dM - dA) - margin - gap_bound(eps, dM - margin, tau)
    return {"max_violation": float(viol.max()), "eps": eps, "margin": margin, "probes": int(len(Z))}
