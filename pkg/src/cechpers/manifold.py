"""Parametric submanifolds, samplers, bump diffeomorphisms and geometric estimates."""
import json
import warnings
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
from scipy.spatial import cKDTree

KINDS = ("circle", "torus", "unit_cube", "product", "pathological_curve")
FD_STEP = 1e-5
# max over s >= 0 of s * exp(-s^2 / 2): slope bound of one Gaussian bump per unit a/w
BUMP_SLOPE = float(np.exp(-0.5))


@dataclass(frozen=True)
class ManifoldSpec:
    """Parametric submanifold of R^d.

    Use the factory functions :func:`circle`, :func:`torus`, :func:`unit_cube`,
    :func:`product` and :func:`pathological_curve`.
    """
    kind: str
    ambient_dim: int
    intrinsic_dim: int
    reach: float
    enclosing_radius: float
    params: tuple = ()
    factors: tuple = ()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown manifold kind {self.kind!r}")
        if not 1 <= self.intrinsic_dim <= self.ambient_dim:
            raise ValueError("need 1 <= intrinsic_dim <= ambient_dim")

    @property
    def p(self):
        return dict(self.params)

    # -- parametrization -------------------------------------------------
    def domain(self):
        """Parameter box as (low, high) arrays of length m."""
        k = self.kind
        if k == "circle":
            return np.zeros(1), np.array([2 * np.pi])
        if k == "torus":
            return np.zeros(2), np.full(2, 2 * np.pi)
        if k == "unit_cube":
            return np.zeros(self.intrinsic_dim), np.ones(self.intrinsic_dim)
        if k == "pathological_curve":
            return np.zeros(1), np.array([2.0])
        lo, hi = zip(*(f.domain() for f in self.factors))
        return np.concatenate(lo), np.concatenate(hi)

    def embed(self, u):
        """Map parameters (N, m) to points (N, d)."""
        u = np.atleast_2d(np.asarray(u, dtype=float))
        k = self.kind
        if k == "circle":
            r = self.p["r"]
            return np.c_[r * np.cos(u[:, 0]), r * np.sin(u[:, 0])]
        if k == "torus":
            R, r = self.p["R"], self.p["r"]
            th, ph = u[:, 0], u[:, 1]
            rho = R + r * np.cos(th)
            return np.c_[rho * np.cos(ph), rho * np.sin(ph), r * np.sin(th)]
        if k == "unit_cube":
            return u.copy()
        if k == "pathological_curve":
            t = u[:, 0]
            upper = t < 1.0
            x = np.where(upper, -2.0 + 4.0 * t, -2.0 + 4.0 * (t - 1.0))
            y = _patho_f(x)
            return np.c_[x, np.where(upper, y, -y)]
        out, j = [], 0
        for f in self.factors:
            out.append(f.embed(u[:, j:j + f.intrinsic_dim]))
            j += f.intrinsic_dim
        return np.hstack(out)

    def volume(self):
        k = self.kind
        if k == "circle":
            return 2 * np.pi * self.p["r"]
        if k == "torus":
            return 4 * np.pi ** 2 * self.p["R"] * self.p["r"]
        if k == "unit_cube":
            return 1.0
        if k == "pathological_curve":
            return 2.0 * _patho_arclength()[1][-1]
        return float(np.prod([f.volume() for f in self.factors]))

    # -- serialization ---------------------------------------------------
    def to_dict(self):
        d = {"kind": self.kind, "ambient_dim": self.ambient_dim, "intrinsic_dim": self.intrinsic_dim,
             "reach": self.reach, "enclosing_radius": self.enclosing_radius, "params": dict(self.params)}
        if self.factors:
            d["factors"] = [f.to_dict() for f in self.factors]
        return d

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, d):
        kind = d["kind"]
        p = d.get("params", {})
        if kind == "circle":
            return circle(**p)
        if kind == "torus":
            return torus(**p)
        if kind == "unit_cube":
            return unit_cube(**p) if p else unit_cube(d["intrinsic_dim"])
        if kind == "pathological_curve":
            return pathological_curve()
        if kind == "product":
            return product(*[cls.from_dict(f) for f in d["factors"]])
        raise ValueError(f"unknown manifold kind {kind!r}")

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


def circle(r=1.0):
    if not r > 0:
        raise ValueError("radius must be positive")
    return ManifoldSpec("circle", 2, 1, float(r), float(r), (("r", float(r)),))


def torus(R=2.0, r=1.0):
    if not R > r > 0:
        raise ValueError("torus requires R_major > r_minor > 0")
    return ManifoldSpec("torus", 3, 2, float(min(r, R - r)), float(R + r), (("R", float(R)), ("r", float(r))))


def unit_cube(m=2):
    m = int(m)
    return ManifoldSpec("unit_cube", m, m, float("inf"), float(np.sqrt(m) / 2), (("m", m),))


def product(*specs):
    if not specs:
        raise ValueError("product needs at least one factor")
    return ManifoldSpec("product", sum(s.ambient_dim for s in specs), sum(s.intrinsic_dim for s in specs),
                        float(min(s.reach for s in specs)),
                        float(np.sqrt(sum(s.enclosing_radius ** 2 for s in specs))), (), tuple(specs))


def pathological_curve():
    """Union of the graphs of +-(1 + x^4 sin(1/x)^2) over [-2, 2].

    Parameter t in [0, 2): t < 1 runs along the upper graph, t >= 1 along the
    lower one.  The reach is not known in closed form (set to nan).
    """
    top = float(_patho_f(np.array([2.0]))[0])
    return ManifoldSpec("pathological_curve", 2, 1, float("nan"), float(np.hypot(2.0, top)))


def _patho_f(x):
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        s = np.where(x == 0, 0.0, np.sin(1.0 / np.where(x == 0, 1.0, x)))
    return 1.0 + x ** 4 * s ** 2


def _patho_df(x):
    x = np.asarray(x, dtype=float)
    safe = np.where(x == 0, 1.0, x)
    s, c = np.sin(1.0 / safe), np.cos(1.0 / safe)
    return np.where(x == 0, 0.0, 4 * x ** 3 * s ** 2 - 2 * x ** 2 * s * c)


_PATHO_TABLE = {}


def _patho_arclength(num=400_001):
    """Cumulative arc length of one branch on a uniform x grid."""
    if num not in _PATHO_TABLE:
        x = np.linspace(-2.0, 2.0, num)
        speed = np.sqrt(1.0 + _patho_df(x) ** 2)
        s = np.concatenate([[0.0], np.cumsum(0.5 * (speed[1:] + speed[:-1]) * np.diff(x))])
        _PATHO_TABLE[num] = (x, s)
    return _PATHO_TABLE[num]


# ---------------------------------------------------------------------------
# diffeomorphisms


@dataclass(frozen=True)
class DiffeoField:
    """Sum of Gaussian bumps, x -> x + sum_k a_k u_k exp(-|x - c_k|^2 / (2 w_k^2)).

    The bound sum_k a_k / w_k <= 0.5 keeps the displacement's Lipschitz
    constant below 0.5 * exp(-1/2) < 1, so the map is a diffeomorphism.
    """
    centers: np.ndarray
    directions: np.ndarray
    amplitudes: np.ndarray
    bandwidths: np.ndarray
    seed: Optional[int] = None

    def __post_init__(self):
        a = np.asarray(self.amplitudes, dtype=float)
        w = np.asarray(self.bandwidths, dtype=float)
        if np.any(w <= 0) or np.any(a < 0):
            raise ValueError("bandwidths must be positive and amplitudes nonnegative")
        if len(a) and np.sum(a / w) > 0.5 + 1e-12:
            raise ValueError(f"gradient bound violated: sum a/w = {np.sum(a / w):.6g} > 0.5")
        u = np.asarray(self.directions, dtype=float)
        if len(u) and not np.allclose(np.linalg.norm(u, axis=1), 1.0):
            raise ValueError("directions must be unit vectors")

    @property
    def bump_count(self):
        return len(self.amplitudes)

    @property
    def lipschitz(self):
        """Upper bound on the Lipschitz constant of the displacement."""
        if self.bump_count == 0:
            return 0.0
        return BUMP_SLOPE * float(np.sum(self.amplitudes / self.bandwidths))

    def displacement(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        out = np.zeros_like(X)
        for c, u, a, w in zip(self.centers, self.directions, self.amplitudes, self.bandwidths):
            g = np.exp(-np.sum((X - c) ** 2, axis=1) / (2 * w * w))
            out += a * g[:, None] * u
        return out

    def __call__(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        return X + self.displacement(X)

    def to_dict(self):
        return {"centers": np.asarray(self.centers).tolist(), "directions": np.asarray(self.directions).tolist(),
                "amplitudes": np.asarray(self.amplitudes).tolist(),
                "bandwidths": np.asarray(self.bandwidths).tolist(), "seed": self.seed}

    @classmethod
    def from_dict(cls, d):
        return cls(np.asarray(d["centers"], float).reshape(len(d["amplitudes"]), -1),
                   np.asarray(d["directions"], float).reshape(len(d["amplitudes"]), -1),
                   np.asarray(d["amplitudes"], float), np.asarray(d["bandwidths"], float), d.get("seed"))


def identity_field(d):
    return DiffeoField(np.zeros((0, d)), np.zeros((0, d)), np.zeros(0), np.zeros(0))


def random_diffeo(spec: ManifoldSpec, bumps=8, seed=0, strength=0.5, bandwidth=None):
    """Random bump field with centers near the manifold.

    Parameters
    ----------
    spec : ManifoldSpec
    bumps : int
    seed : int
    strength : float
        Value of sum a_k / w_k, at most 0.5.
    bandwidth : (float, float), optional
        Range of bump bandwidths; defaults to (0.5, 1.5) times the reach
        (or the enclosing radius when the reach is infinite).
    """
    rng = np.random.default_rng(seed)
    d = spec.ambient_dim
    scale = spec.reach if np.isfinite(spec.reach) else spec.enclosing_radius
    lo, hi = bandwidth if bandwidth is not None else (0.5 * scale, 1.5 * scale)
    low, high = spec.domain()
    centers = spec.embed(rng.uniform(low, high, size=(bumps, len(low))))
    centers = centers + rng.normal(scale=0.25 * scale, size=centers.shape)
    dirs = rng.normal(size=(bumps, d))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    w = rng.uniform(lo, hi, size=bumps)
    share = rng.dirichlet(np.ones(bumps))
    a = min(strength, 0.5) * share * w
    return DiffeoField(centers, dirs, a, w, seed)


# ---------------------------------------------------------------------------
# point clouds


@dataclass(frozen=True)
class PointCloud:
    """Finite sample of a manifold.

    Attributes
    ----------
    points : ndarray (n, d)
    density : ndarray (n,) or None
        Density of the sampling law w.r.t. the volume measure, at each point.
    seed : int or None
    spec : ManifoldSpec or None
    params : ndarray (n, m) or None
        Parameter coordinates, kept for Jacobian estimates.
    diffeo : tuple of DiffeoField
        Fields applied so far, in order.
    """
    points: np.ndarray
    density: Optional[np.ndarray] = None
    seed: Optional[int] = None
    spec: Optional[ManifoldSpec] = None
    params: Optional[np.ndarray] = None
    diffeo: tuple = field(default=())

    def __post_init__(self):
        if self.density is not None:
            dens = np.asarray(self.density)
            if len(dens) != len(self.points):
                raise ValueError("density must align with points")
            if np.any(dens <= 0):
                raise ValueError("density values must be positive")

    def __len__(self):
        return len(self.points)

    def subset(self, idx):
        idx = np.asarray(idx)
        return replace(self, points=self.points[idx],
                       density=None if self.density is None else self.density[idx],
                       params=None if self.params is None else self.params[idx])

    def to_csv(self, path):
        kind = self.spec.kind if self.spec is not None else "unknown"
        m = self.spec.intrinsic_dim if self.spec is not None else ""
        with open(path, "w") as fh:
            fh.write(f"# manifold={kind} m={m} seed={self.seed}\n")
            for i, x in enumerate(self.points):
                row = [repr(float(v)) for v in x]
                if self.density is not None:
                    row.append(repr(float(self.density[i])))
                fh.write(",".join(row) + "\n")


def read_cloud_csv(path, has_density=None):
    """Read a point-cloud CSV; a trailing density column is detected from `has_density`."""
    seed = None
    with open(path) as fh:
        first = fh.readline()
    if first.startswith("#"):
        for tok in first[1:].split():
            if tok.startswith("seed=") and tok[5:] not in ("", "None"):
                seed = int(tok[5:])
    A = np.loadtxt(path, delimiter=",", comments="#", ndmin=2)
    if has_density:
        return PointCloud(A[:, :-1].copy(), A[:, -1].copy(), seed)
    return PointCloud(A, None, seed)


@dataclass(frozen=True)
class ReferenceGrid:
    """Deterministic dense discretization of a manifold with mesh bound h."""
    points: np.ndarray
    mesh: float
    spec: ManifoldSpec
    params: np.ndarray
    diffeo: tuple = field(default=())

    def __len__(self):
        return len(self.points)


def _param_density(spec, u):
    """Density w.r.t. volume of the law with uniform parameters."""
    low, high = spec.domain()
    box = float(np.prod(high - low))
    return 1.0 / (box * volume_element(spec, u))


def volume_element(spec, u, diffeo=()):
    """sqrt(det(J^T J)) of the (possibly deformed) parametrization, by central differences."""
    u = np.atleast_2d(np.asarray(u, dtype=float))
    if spec.kind == "torus" and not diffeo:
        return spec.p["r"] * (spec.p["R"] + spec.p["r"] * np.cos(u[:, 0]))
    if spec.kind == "circle" and not diffeo:
        return np.full(len(u), spec.p["r"])
    if spec.kind == "unit_cube" and not diffeo:
        return np.ones(len(u))
    J = _jacobian(spec, u, diffeo)
    G = np.einsum("nik,nil->nkl", J, J)
    return np.sqrt(np.abs(np.linalg.det(G)))


def _embed_deformed(spec, u, diffeo):
    X = spec.embed(u)
    for f in diffeo:
        X = f(X)
    return X


def _jacobian(spec, u, diffeo=(), h=FD_STEP):
    m = spec.intrinsic_dim
    cols = []
    for j in range(m):
        e = np.zeros(m)
        e[j] = h
        cols.append((_embed_deformed(spec, u + e, diffeo) - _embed_deformed(spec, u - e, diffeo)) / (2 * h))
    return np.stack(cols, axis=2)


def _sample_params(spec, n, law, rng):
    """Parameters of n draws and the law's density at them."""
    k = spec.kind
    low, high = spec.domain()
    if k == "product":
        us, dens = [], np.ones(n)
        for f in spec.factors:
            u, d = _sample_params(f, n, law, rng)
            us.append(u)
            dens *= d
        return np.hstack(us), dens
    if law == "uniform_parameter":
        u = rng.uniform(low, high, size=(n, len(low)))
        return u, _param_density(spec, u)
    if law != "uniform_volume":
        raise ValueError(f"unknown law {law!r}")
    if k == "torus":
        R, r = spec.p["R"], spec.p["r"]
        th = np.empty(0)
        while len(th) < n:
            cand = rng.uniform(0, 2 * np.pi, size=2 * (n - len(th)) + 16)
            acc = rng.uniform(size=len(cand)) * (R + r) <= R + r * np.cos(cand)
            th = np.concatenate([th, cand[acc]])
        u = np.c_[th[:n], rng.uniform(0, 2 * np.pi, size=n)]
        return u, np.full(n, 1.0 / spec.volume())
    if k == "pathological_curve":
        warnings.warn("pathological_curve: uniform_volume realized by a tabulated arc-length inverse CDF")
        x, s = _patho_arclength()
        branch = rng.integers(0, 2, size=n)
        xs = np.interp(rng.uniform(0, s[-1], size=n), s, x)
        u = ((xs + 2.0) / 4.0 + branch)[:, None]
        return u, np.full(n, 1.0 / spec.volume())
    u = rng.uniform(low, high, size=(n, len(low)))
    return u, np.full(n, 1.0 / spec.volume())


def sample_iid(spec: ManifoldSpec, n, law="uniform_volume", seed=0):
    """n i.i.d. points on a manifold with the sampling density attached.

    Parameters
    ----------
    spec : ManifoldSpec
    n : int
    law : {"uniform_volume", "uniform_parameter"}
        Uniform w.r.t. the volume measure, or uniform parameters (angles for
        the torus).  On the pathological curve the volume law is realized
        through a tabulated arc-length inverse CDF.
    seed : int

    Returns
    -------
    PointCloud
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    u, dens = _sample_params(spec, int(n), law, rng)
    return PointCloud(spec.embed(u), dens, seed, spec, u, ())


def apply_diffeo(fld: DiffeoField, obj):
    """Push a point cloud or reference grid through a bump field.

    Densities are divided by the volume-element ratio of the deformed and
    original parametrizations (central differences, step 1e-5), i.e. the
    pushforward of the sampling law.
    """
    if fld.bump_count == 0:
        return replace(obj, diffeo=obj.diffeo + (fld,))
    new_pts = fld(obj.points)
    if isinstance(obj, ReferenceGrid):
        return replace(obj, points=new_pts, mesh=obj.mesh * (1 + fld.lipschitz), diffeo=obj.diffeo + (fld,))
    dens = obj.density
    if dens is not None:
        if obj.params is None or obj.spec is None:
            raise ValueError("density transform needs parameters and a spec")
        before = volume_element(obj.spec, obj.params, obj.diffeo)
        after = volume_element(obj.spec, obj.params, obj.diffeo + (fld,))
        dens = dens * before / after
    return replace(obj, points=new_pts, density=dens, diffeo=obj.diffeo + (fld,))


def deformed_volume(spec, diffeo=(), resolution=400):
    """Volume of the deformed manifold by midpoint quadrature on the parameters.

    resolution is the number of nodes per axis for m <= 2 and the total node count above.
    """
    if not diffeo:
        return spec.volume()
    low, high = spec.domain()
    m = len(low)
    k = max(8, int(round(resolution ** (1.0 / m) if m > 2 else resolution)))
    axes = [low[j] + (np.arange(k) + 0.5) * (high[j] - low[j]) / k for j in range(m)]
    U = np.stack(np.meshgrid(*axes, indexing="ij"), -1).reshape(-1, m)
    cell = float(np.prod((high - low) / k))
    return float(np.sum(volume_element(spec, U, diffeo)) * cell)


def reference_grid(spec: ManifoldSpec, mesh=None, diffeo=()):
    """Parameter-stepping grid whose points are within `mesh` of every manifold point."""
    if mesh is None:
        tau = spec.reach if np.isfinite(spec.reach) else spec.enclosing_radius
        mesh = min(0.01, tau / 100)
    U = _grid_params(spec, mesh)
    g = ReferenceGrid(spec.embed(U), float(mesh), spec, U, ())
    for f in diffeo:
        g = apply_diffeo(f, g)
    return g


def _grid_params(spec, h):
    """Parameter grid with geodesic cell diameter at most h."""
    k = spec.kind
    if k == "circle":
        N = int(np.ceil(2 * np.pi * spec.p["r"] / h))
        return (np.arange(N) * 2 * np.pi / N)[:, None]
    if k == "torus":
        R, r = spec.p["R"], spec.p["r"]
        s = h / np.sqrt(2)
        nt = int(np.ceil(2 * np.pi * r / s))
        nphi = int(np.ceil(2 * np.pi * (R + r) / s))
        th, ph = np.meshgrid(np.arange(nt) * 2 * np.pi / nt, np.arange(nphi) * 2 * np.pi / nphi, indexing="ij")
        return np.c_[th.ravel(), ph.ravel()]
    if k == "unit_cube":
        m = spec.intrinsic_dim
        N = int(np.ceil(np.sqrt(m) / h)) + 1
        ax = np.linspace(0, 1, N)
        return np.stack(np.meshgrid(*([ax] * m), indexing="ij"), -1).reshape(-1, m)
    if k == "pathological_curve":
        x = np.linspace(-2, 2, 20001)
        vmax = float(np.max(np.sqrt(1 + _patho_df(x) ** 2))) * 1.05
        N = int(np.ceil(4 * vmax / h)) + 1
        t = np.linspace(0, 1, N)
        t[-1] = 1 - 1e-12
        return np.r_[t, t + 1.0][:, None]
    m = len(spec.factors)
    grids = [_grid_params(f, h / np.sqrt(m)) for f in spec.factors]
    idx = np.stack(np.meshgrid(*[np.arange(len(g)) for g in grids], indexing="ij"), -1).reshape(-1, m)
    return np.hstack([g[idx[:, j]] for j, g in enumerate(grids)])


def farthest_point_subsample(cloud: PointCloud, stop_radius):
    """Greedy farthest-point subset that is stop_radius-sparse and stop_radius-covering."""
    P = np.asarray(cloud.points, dtype=float)
    if len(P) == 0:
        raise ValueError("empty cloud")
    chosen = [0]
    dist = np.linalg.norm(P - P[0], axis=1)
    while True:
        j = int(np.argmax(dist))
        if dist[j] < stop_radius:
            break
        chosen.append(j)
        np.minimum(dist, np.linalg.norm(P - P[j], axis=1), out=dist)
    if isinstance(cloud, PointCloud):
        return cloud.subset(np.array(chosen))
    return PointCloud(P[chosen])


def _same_manifold(cloud, ref):
    if cloud.spec is None:
        return True
    if cloud.spec != ref.spec or len(cloud.diffeo) != len(ref.diffeo):
        return False
    return all(a is b or a.to_dict() == b.to_dict() for a, b in zip(cloud.diffeo, ref.diffeo))


def hausdorff_to_manifold(cloud, ref: ReferenceGrid):
    """max over the grid of the distance to the cloud.

    The result underestimates the true Hausdorff distance by at most
    ``ref.mesh``.
    """
    if isinstance(cloud, PointCloud) and not _same_manifold(cloud, ref):
        raise ValueError("cloud and reference grid describe different manifolds")
    P = getattr(cloud, "points", cloud)
    d, _ = cKDTree(P).query(ref.points)
    return float(np.max(d))


@dataclass(frozen=True)
class ReachEstimate:
    value: float
    analytic: bool
    confident: bool


def federer_reach(X, T, block=512):
    """min over pairs of |y - x|^2 / (2 dist(y, x + T_x)) for points X with tangent bases T (n, d, m)."""
    X = np.asarray(X, dtype=float)
    best = np.inf
    for s in range(0, len(X), block):
        x = X[s:s + block]
        Q = T[s:s + block]
        diff = X[None, :, :] - x[:, None, :]
        proj = np.einsum("bnd,bdm->bnm", diff, Q)
        normal2 = np.sum(diff ** 2, axis=2) - np.sum(proj ** 2, axis=2)
        d2 = np.sum(diff ** 2, axis=2)
        ok = normal2 > 1e-14 * np.maximum(d2, 1e-300)
        if np.any(ok):
            best = min(best, float(np.min(d2[ok] / (2 * np.sqrt(normal2[ok])))))
    return best


def estimate_reach(spec: ManifoldSpec, diffeo=None, samples=3000, full=False):
    """Reach of a (possibly deformed) manifold.

    Analytic for undeformed circles, tori, cubes and products; otherwise the
    minimum of |y - x|^2 / (2 dist(y, T_x M)) over pairs of a parameter grid.
    Returns a float, or a :class:`ReachEstimate` when ``full`` is true.
    """
    fields = () if diffeo is None else (tuple(diffeo) if isinstance(diffeo, (list, tuple)) else (diffeo,))
    fields = tuple(f for f in fields if f.bump_count)
    if not fields and spec.kind != "pathological_curve":
        est = ReachEstimate(float(spec.reach), True, True)
        return est if full else est.value
    low, high = spec.domain()
    m = len(low)
    k = max(8, int(round(samples ** (1.0 / m))))
    if spec.kind == "pathological_curve":
        U = np.r_[np.linspace(0, 1, samples // 2, endpoint=False), 1 + np.linspace(0, 1, samples // 2, endpoint=False)][:, None]
    else:
        axes = [low[j] + (np.arange(k) + 0.5) * (high[j] - low[j]) / k for j in range(m)]
        U = np.stack(np.meshgrid(*axes, indexing="ij"), -1).reshape(-1, m)
    X = _embed_deformed(spec, U, fields)
    J = _jacobian(spec, U, fields)
    T = np.linalg.qr(J)[0]
    value = federer_reach(X, T)
    confident = spec.kind != "pathological_curve"
    if not confident:
        warnings.warn("reach of the pathological curve is a low-confidence numerical estimate")
    est = ReachEstimate(value, False, confident)
    return est if full else est.value


def tangent_bases(cloud_or_grid):
    """Orthonormal tangent bases (n, d, m) at the points of a sampled object."""
    J = _jacobian(cloud_or_grid.spec, cloud_or_grid.params, cloud_or_grid.diffeo)
    return np.linalg.qr(J)[0]
