"""Persistence measures, grid discretization and exact OT with the diagonal landfill."""
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtr

from . import _flow
from .homology import cech_diagrams
from .manifold import hausdorff_to_manifold, reference_grid, sample_iid, unit_cube
from . import svg


class PersistenceMeasure:
    """Weighted atoms on the half-plane u1 < u2."""

    def __init__(self, locations=(), masses=()):
        loc = np.asarray(locations, dtype=float).reshape(-1, 2)
        w = np.asarray(masses, dtype=float).ravel()
        if len(loc) != len(w):
            raise ValueError("locations and masses must align")
        if np.any(w < 0) or not np.all(np.isfinite(w)):
            raise ValueError("masses must be finite and nonnegative")
        if np.any(loc[:, 0] >= loc[:, 1]):
            raise ValueError("atoms must lie strictly above the diagonal")
        self.locations = loc
        self.masses = w

    def __len__(self):
        return len(self.masses)

    def total_mass(self):
        return float(np.sum(self.masses))

    def persistence(self):
        return 0.5 * (self.locations[:, 1] - self.locations[:, 0])

    def total_persistence(self, alpha):
        """Pers_alpha = sum of mass * pers^alpha, summed in sorted order."""
        if len(self) == 0:
            return 0.0
        terms = self.masses * self.persistence() ** alpha
        return float(np.sum(np.sort(terms)))


class GridMeasure:
    """Cell masses on [0, u_max]^2; cell (i, j) covers births in bin i and deaths in bin j.

    Cells strictly below the diagonal (j < i) carry no mass.  ``dropped``
    records mass that fell outside the window when the grid was built.
    """

    def __init__(self, u_max, G, masses=None, dropped=0.0):
        if G < 1 or not u_max > 0:
            raise ValueError("need G >= 1 and u_max > 0")
        self.u_max = float(u_max)
        self.G = int(G)
        M = np.zeros((self.G, self.G)) if masses is None else np.array(masses, dtype=float)
        if M.shape != (self.G, self.G):
            raise ValueError("mass array has the wrong shape")
        if not np.all(np.isfinite(M)) or np.any(M < 0):
            raise ValueError("masses must be finite and nonnegative")
        if np.any(M[np.tril_indices(self.G, -1)] != 0):
            raise ValueError("cells below the diagonal must be empty")
        self.masses = M
        self.dropped = float(dropped)

    @property
    def h(self):
        return self.u_max / self.G

    def same_grid(self, other):
        return self.G == other.G and abs(self.u_max - other.u_max) <= 1e-12 * self.u_max

    def centers(self, idx=None):
        """Cell centers (births, deaths) of the given (rows, cols) or of all nonzero cells."""
        i, j = self.nonzero() if idx is None else idx
        return np.c_[(np.asarray(i) + 0.5) * self.h, (np.asarray(j) + 0.5) * self.h]

    def nonzero(self):
        return np.nonzero(self.masses > 0)

    def total_mass(self):
        return float(self.masses.sum())

    def diagonal_cost(self, p):
        """Per-cell cost ((u2 - u1)/2)^p of sending a cell center to the diagonal."""
        k = np.arange(self.G)
        d = 0.5 * (k[None, :] - k[:, None]) * self.h
        return np.maximum(d, 0.0) ** p

    def total_persistence(self, alpha):
        return float(np.sum(self.masses * self.diagonal_cost(alpha)))

    def to_csv(self, path):
        with open(path, "w") as fh:
            fh.write(f"# u_max={self.u_max!r} G={self.G}\nrow,col,mass\n")
            for i, j in zip(*self.nonzero()):
                fh.write(f"{i},{j},{float(self.masses[i, j])!r}\n")

    @classmethod
    def from_csv(cls, path):
        with open(path) as fh:
            head = fh.readline()[1:].split()
        meta = dict(t.split("=") for t in head)
        g = cls(float(meta["u_max"]), int(meta["G"]))
        rows = np.loadtxt(path, delimiter=",", comments="#", skiprows=2, ndmin=2)
        for i, j, w in rows:
            g.masses[int(i), int(j)] += w
        return g

    def to_svg(self, path, title):
        svg.heatmap(self.masses, path, title, self.u_max)


def _bin(locations, masses, u_max, G):
    """Grid of masses at points with u1 <= u2; points outside the window are dropped."""
    g = GridMeasure(u_max, G)
    if len(masses) == 0:
        return g
    idx = np.floor(locations / g.h).astype(np.int64)
    idx[(locations == u_max)] = G - 1
    inside = np.all((idx >= 0) & (idx < G), axis=1)
    np.add.at(g.masses, (idx[inside, 0], idx[inside, 1]), masses[inside])
    g.dropped = float(masses[~inside].sum())
    return g


def to_grid(measure, u_max, G):
    """Bin a PersistenceMeasure into a GridMeasure; atoms outside the window are dropped."""
    return _bin(measure.locations, measure.masses, u_max, G)


def rescale_region1(dgm, n, m):
    """mu_{n,i}: atoms at n^(1/m) u with mass 1/n for each (Region-1) diagram point."""
    pts = np.asarray(getattr(dgm, "points", dgm), dtype=float).reshape(-1, 2)
    return PersistenceMeasure(pts * float(n) ** (1.0 / m), np.full(len(pts), 1.0 / n))


@dataclass
class LimitMeasureModel:
    """Grid estimate of the cube limit measure of degree i in dimension m."""
    base: GridMeasure
    reps: int
    seed: int
    m: int
    i: int
    n: int = 0
    note: str = ""
    caps: list = field(default_factory=list)


def _cube_mesh(m):
    # keep the reference grid around 10^5 points
    return max(0.005 * np.sqrt(m), np.sqrt(m) / (1e5 ** (1.0 / m) - 1))


def cube_diagram(n, m, i, seed, budget=None):
    """Degree-i diagram of n uniform points on [0,1]^m, with the cap it used.

    The cube is convex, so every diagram point has both coordinates at most
    the Hausdorff distance eps; the cap eps_hat + mesh + 1e-6 is therefore
    exact, and it is doubled if any class of positive degree survives it.
    """
    spec = unit_cube(m)
    cloud = sample_iid(spec, n, seed=seed)
    ref = reference_grid(spec, mesh=_cube_mesh(m))
    cap = hausdorff_to_manifold(cloud, ref) + ref.mesh + 1e-6
    for _ in range(4):
        dg = cech_diagrams(cloud, i, cap, budget=budget)
        if len(dg[0].essential) == 1 and all(len(d.essential) == 0 for d in dg[1:]):
            return dg[i], cap
        cap *= 2
    raise RuntimeError("classes of positive degree survive every cap tried")


def estimate_mu_infinity(m, i, n=10_000, reps=10, seed=0, G=100, u_max=None, budget=None):
    """Average grid-binned rescaled degree-i diagram of uniform points on the unit cube.

    Parameters
    ----------
    m, i : int
        Intrinsic dimension and homological degree.
    n : int
        Points per replication (at least 1000).
    reps : int
    seed : int
        Replication r uses seed + r.
    G : int
    u_max : float, optional
        Window; defaults to 3 times the 99.9th percentile of rescaled deaths.

    Returns
    -------
    LimitMeasureModel
    """
    if i >= m:
        return LimitMeasureModel(GridMeasure(1.0 if u_max is None else u_max, G), reps, seed, m, i, n,
                                 "zero measure: degree i >= m")
    if n < 1000:
        raise ValueError("n must be at least 1000")
    measures, caps = [], []
    for r in range(reps):
        dg, cap = cube_diagram(n, m, i, seed + r, budget)
        measures.append(rescale_region1(dg, n, m))
        caps.append(cap)
    if u_max is None:
        deaths = np.concatenate([mu.locations[:, 1] for mu in measures])
        u_max = 3.0 * float(np.quantile(deaths, 0.999)) if len(deaths) else 1.0
    base = GridMeasure(u_max, G)
    for mu in measures:
        g = to_grid(mu, u_max, G)
        base.masses += g.masses / reps
        base.dropped += g.dropped / reps
    return LimitMeasureModel(base, reps, seed, m, i, n, "", caps)


def change_of_variable(model, weights, fvals, u_max=None, G=None, chunk=256):
    """Density-mixed limit mu_{f,i} on a grid.

    Each base cell (center u, mass w) sends mass w * weight_x * f(x) to
    f(x)^(-1/m) u for every density sample x, where weight_x are volume
    weights (Monte Carlo Vol(M)/N or quadrature).  The output mass is the
    base mass times sum_x weight_x f(x), i.e. about the base mass when f is
    a probability density.

    Parameters
    ----------
    model : LimitMeasureModel
    weights, fvals : array_like
    u_max : float, optional
        Output window; defaults to the base window times max f^(-1/m).
    G : int, optional
        Output resolution; defaults to the base resolution.
    """
    w = np.asarray(weights, dtype=float).ravel()
    f = np.asarray(fvals, dtype=float).ravel()
    if len(w) != len(f):
        raise ValueError("weights and density values must align")
    if np.any(f <= 0):
        raise ValueError("density values must be positive")
    base = model.base
    m = model.m
    scale = f ** (-1.0 / m)
    if u_max is None:
        u_max = base.u_max * float(scale.max()) if len(f) else base.u_max
    out = GridMeasure(u_max, base.G if G is None else G)
    cells = base.nonzero()
    if len(cells[0]) == 0 or len(f) == 0:
        return out
    U = base.centers(cells)
    mass = base.masses[cells]
    dropped = 0.0
    for s in range(0, len(f), chunk):
        sc = scale[s:s + chunk]
        wx = w[s:s + chunk] * f[s:s + chunk]
        loc = (sc[:, None, None] * U[None, :, :]).reshape(-1, 2)
        mw = (wx[:, None] * mass[None, :]).ravel()
        # diagonal cells have centers on the diagonal, so bin directly
        g = _bin(loc, mw, out.u_max, out.G)
        out.masses += g.masses
        dropped += g.dropped
    out.dropped = dropped
    return out


def landfill_norm(nu, p):
    """OT_p(0, nu) from the exact landfill formula (sum of mass * diagonal cost)^(1/p)."""
    return float(np.sum(nu.masses * nu.diagonal_cost(p)) ** (1.0 / p))


def grid_ot(nu1, nu2, p=2.0, return_plan=False):
    """Exact OT_p between grid measures with one diagonal landfill per side.

    Supplies are the cells of nu1 plus a landfill holding the mass of nu2;
    demands are the cells of nu2 plus a landfill absorbing the mass of nu1.
    Cell-cell costs are l-inf distances between centers to the p, cell-landfill
    costs the diagonal distance of the center to the p, and landfill-landfill
    transport is free.  Solved by the network simplex in :mod:`_flow`.
    """
    if not p >= 1:
        raise ValueError("p must be >= 1")
    if not nu1.same_grid(nu2):
        raise ValueError("grid measures differ in window or resolution")
    c1, c2 = nu1.nonzero(), nu2.nonzero()
    a, b = nu1.masses[c1], nu2.masses[c2]
    X, Y = nu1.centers(c1), nu2.centers(c2)
    m1, m2 = float(a.sum()), float(b.sum())
    supply = np.r_[a, [m2]] if m2 > 0 else a
    demand = np.r_[b, [m1]] if m1 > 0 else b
    if len(supply) == 0 or len(demand) == 0:
        return (0.0, None) if return_plan else 0.0
    C = np.zeros((len(supply), len(demand)))
    if len(a) and len(b):
        C[:len(a), :len(b)] = np.max(np.abs(X[:, None, :] - Y[None, :, :]), axis=2) ** p
    if m1 > 0:
        C[:len(a), -1] = (0.5 * (X[:, 1] - X[:, 0])) ** p
    if m2 > 0:
        C[-1, :len(b)] = (0.5 * (Y[:, 1] - Y[:, 0])) ** p
    # balance against roundoff in the two totals
    demand = demand * (supply.sum() / demand.sum())
    F, cost, _ = _flow.transport(supply, demand, C)
    val = float(max(cost, 0.0) ** (1.0 / p))
    return (val, F) if return_plan else val


def kde_heatmap(measure, bandwidth, resolution=100, u_max=None):
    """Gaussian smoothing of atoms onto a grid (cell-integrated, figures only).

    Mass outside the window or below the diagonal is truncated.
    """
    if not bandwidth > 0:
        raise ValueError("bandwidth must be positive")
    if isinstance(measure, GridMeasure):
        cells = measure.nonzero()
        loc, w = measure.centers(cells), measure.masses[cells]
        if u_max is None:
            u_max = measure.u_max
    else:
        loc, w = measure.locations, measure.masses
    if u_max is None:
        u_max = float(loc.max()) + 5 * bandwidth if len(loc) else 1.0
    g = GridMeasure(u_max, resolution)
    if len(w) == 0:
        return g
    edges = np.linspace(0.0, u_max, resolution + 1)
    Bx = np.diff(ndtr((edges[None, :] - loc[:, :1]) / bandwidth), axis=1)
    By = np.diff(ndtr((edges[None, :] - loc[:, 1:]) / bandwidth), axis=1)
    M = (Bx * w[:, None]).T @ By
    M[np.tril_indices(resolution, -1)] = 0.0
    g.masses = np.maximum(M, 0.0)
    if g.total_mass() > w.sum() * (1 + 1e-9):
        warnings.warn("kde mass exceeds atom mass")
    return g
