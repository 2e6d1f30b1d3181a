"""Linear feature maps on diagrams: persistence images and Phi_alpha."""
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import ndtr

from .metrics import finite_points
from . import svg


@dataclass(frozen=True)
class FeatureConfig:
    """Persistence-image parameters in (birth, pers) coordinates.

    bandwidth defaults to one cell (the larger of the two cell sides).
    """
    G: int = 50
    birth_range: tuple = (0.0, 1.0)
    pers_range: tuple = (0.0, 1.0)
    bandwidth: Optional[float] = None
    weight: str = "power"
    p: float = 1.0

    def __post_init__(self):
        if self.G < 1:
            raise ValueError("G must be >= 1")
        if self.bandwidth is not None and not self.bandwidth > 0:
            raise ValueError("bandwidth must be positive")
        if self.p < 0:
            raise ValueError("weight exponent must be >= 0")
        if self.weight not in ("power", "arctan_power"):
            raise ValueError(f"unknown weight {self.weight!r}")

    @property
    def sigma(self):
        if self.bandwidth is not None:
            return float(self.bandwidth)
        return max(np.diff(self.birth_range)[0], np.diff(self.pers_range)[0]) / self.G

    def weights(self, pers):
        w = np.asarray(pers, dtype=float) ** self.p
        return np.arctan(w) if self.weight == "arctan_power" else w


def window_for(dgms, G=50, pad=1.05, **kw):
    """Config whose window covers every finite point of the given diagrams."""
    pts = np.vstack([finite_points(d) for d in dgms] + [np.zeros((0, 2))])
    bmax = float(pts[:, 0].max()) if len(pts) else 1.0
    pmax = float((0.5 * (pts[:, 1] - pts[:, 0])).max()) if len(pts) else 1.0
    return FeatureConfig(G, (0.0, pad * bmax if bmax > 0 else 1.0), (0.0, pad * pmax), **kw)


def _chart(pts):
    """(birth, pers) coordinates in a canonical (sorted) order."""
    bp = np.c_[pts[:, 0], 0.5 * (pts[:, 1] - pts[:, 0])]
    return bp[np.lexsort((bp[:, 1], bp[:, 0]))]


def _cell_masses(x, lo, hi, G, sigma):
    """Gaussian mass of each 1D cell, shape (len(x), G)."""
    edges = np.linspace(lo, hi, G + 1)
    return np.diff(ndtr((edges[None, :] - np.asarray(x)[:, None]) / sigma), axis=1)


def grid_bumps(cfg):
    """phi(u) = the cell-integrated Gaussian bump of u on the image grid, shape (N, G*G)."""
    def phi(pts):
        bp = np.c_[pts[:, 0], 0.5 * (pts[:, 1] - pts[:, 0])]
        Bx = _cell_masses(bp[:, 0], *cfg.birth_range, cfg.G, cfg.sigma)
        By = _cell_masses(bp[:, 1], *cfg.pers_range, cfg.G, cfg.sigma)
        return (Bx[:, :, None] * By[:, None, :]).reshape(len(bp), -1)
    return phi


def persistence_image(dgm, cfg: FeatureConfig):
    """Weighted sum of cell-integrated Gaussian bumps, flattened to length G*G.

    Entry (a, b) of the reshaped G x G image is the mass over birth bin a and
    persistence bin b.  Images are raw sums, so they are additive over points.
    """
    pts = finite_points(dgm)
    if len(pts) == 0:
        return np.zeros(cfg.G * cfg.G)
    bp = _chart(pts)
    w = cfg.weights(bp[:, 1])
    Bx = _cell_masses(bp[:, 0], *cfg.birth_range, cfg.G, cfg.sigma)
    By = _cell_masses(bp[:, 1], *cfg.pers_range, cfg.G, cfg.sigma)
    return ((Bx * w[:, None]).T @ By).ravel()


def linear_feature_map(dgm, alpha, phi):
    """Phi_alpha(a) = sum over u of pers(u)^alpha phi(u).

    Parameters
    ----------
    dgm : PersistenceDiagram or array_like
    alpha : float
        At least 1.
    phi : callable
        Maps an (N, 2) array of (birth, death) points to an (N, k) array; must be bounded.
    """
    if alpha < 1:
        raise ValueError("alpha must be >= 1")
    pts = finite_points(dgm)
    if len(pts) == 0:
        k = np.asarray(phi(np.array([[0.0, 1.0]]))).shape[1]
        return np.zeros(k)
    pts = pts[np.lexsort((pts[:, 1], pts[:, 0]))]
    vals = np.asarray(phi(pts), dtype=float)
    w = (0.5 * (pts[:, 1] - pts[:, 0])) ** alpha
    return np.einsum("n,nk->k", w, vals)


def image_to_csv(img, cfg, path):
    M = np.asarray(img).reshape(cfg.G, cfg.G)
    with open(path, "w") as fh:
        fh.write(f"# G={cfg.G} birth_range={list(cfg.birth_range)} pers_range={list(cfg.pers_range)} "
                 f"bandwidth={cfg.sigma!r} weight={cfg.weight} p={cfg.p!r}\n")
        for row in M.T[::-1]:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")


def image_to_svg(img, cfg, path, title):
    M = np.asarray(img).reshape(cfg.G, cfg.G)
    svg.heatmap(M, path, title, cfg.birth_range[1], xlabel="birth", ylabel="pers (axis scaled to birth range)")
