import numpy as np
import pytest
from scipy.optimize import linprog

from cechpers.homology import PersistenceDiagram
from cechpers.measures import (GridMeasure, LimitMeasureModel, PersistenceMeasure, change_of_variable,
                               estimate_mu_infinity, grid_ot, kde_heatmap, landfill_norm, rescale_region1, to_grid)
from cechpers.metrics import total_persistence
from conftest import random_diagram


def _random_grid(rng, G=8, u_max=2.0, cells=6):
    g = GridMeasure(u_max, G)
    for _ in range(int(rng.integers(1, cells + 1))):
        i = int(rng.integers(0, G))
        g.masses[i, int(rng.integers(i, G))] += rng.uniform(0.05, 1.0)
    return g


def _lp_oracle(n1, n2, p):
    """Dense LP over (cells + landfill) x (cells + landfill) with the same costs."""
    c1, c2 = n1.nonzero(), n2.nonzero()
    a, b = n1.masses[c1], n2.masses[c2]
    X, Y = n1.centers(c1), n2.centers(c2)
    S, T = len(a) + 1, len(b) + 1
    C = np.zeros((S, T))
    C[:-1, :-1] = np.max(np.abs(X[:, None] - Y[None]), axis=2) ** p
    C[:-1, -1] = ((X[:, 1] - X[:, 0]) / 2) ** p
    C[-1, :-1] = ((Y[:, 1] - Y[:, 0]) / 2) ** p
    sup, dem = np.r_[a, b.sum()], np.r_[b, a.sum()]
    A = [np.kron(np.eye(S)[s], np.ones(T)) for s in range(S)] + [np.kron(np.ones(S), np.eye(T)[t]) for t in range(T - 1)]
    res = linprog(C.ravel(), A_eq=np.array(A), b_eq=np.r_[sup, dem[:-1]], bounds=(0, None), method="highs")
    return res.fun ** (1 / p)


def test_rescale_examples():
    assert len(rescale_region1(PersistenceDiagram(1), 10, 2)) == 0
    mu = rescale_region1(PersistenceDiagram(1, [[0.1, 0.2]]), 4, 2)
    np.testing.assert_allclose(mu.locations, [[0.2, 0.4]])
    np.testing.assert_allclose(mu.masses, [0.25])


def test_rescale_total_mass(rng):
    d = random_diagram(rng, 17)
    assert rescale_region1(d, 100, 2).total_mass() == pytest.approx(17 / 100)


@pytest.mark.parametrize("alpha,m", [(0.5, 1), (1, 2), (2, 2), (3, 2), (2.5, 3)])
def test_rescaling_identity(rng, alpha, m):
    d = random_diagram(rng, 40)
    n = 1234
    lhs = rescale_region1(d, n, m).total_persistence(alpha)
    rhs = n ** (alpha / m - 1) * total_persistence(d, alpha)
    assert lhs == pytest.approx(rhs, rel=1e-12)


def test_grid_measure_rejects_subdiagonal():
    M = np.zeros((3, 3))
    M[2, 0] = 1
    with pytest.raises(ValueError):
        GridMeasure(1.0, 3, M)


def test_to_grid_binning():
    g = to_grid(PersistenceMeasure([[0.05, 0.15], [0.5, 2.0]], [1.0, 2.0]), 1.0, 10)
    assert g.masses[0, 1] == 1.0 and g.total_mass() == 1.0 and g.dropped == 2.0


def test_grid_ot_identity_and_landfill():
    rng = np.random.default_rng(0)
    g = _random_grid(rng)
    assert grid_ot(g, g, 2) == pytest.approx(0, abs=1e-12)
    one = GridMeasure(4.0, 2)
    one.masses[0, 1] = 1.0
    assert grid_ot(one, GridMeasure(4.0, 2), 1) == pytest.approx(1.0)


def test_grid_ot_mismatch():
    with pytest.raises(ValueError):
        grid_ot(GridMeasure(1.0, 4), GridMeasure(1.0, 5), 2)


@pytest.mark.parametrize("p", [1, 2, 3])
def test_grid_ot_matches_lp(p):
    rng = np.random.default_rng(p)
    for _ in range(40):
        n1, n2 = _random_grid(rng), _random_grid(rng)
        assert grid_ot(n1, n2, p) == pytest.approx(_lp_oracle(n1, n2, p), abs=1e-7)


def test_grid_ot_to_zero_formula():
    rng = np.random.default_rng(3)
    for p in (1, 2):
        g = _random_grid(rng, G=12)
        val = grid_ot(g, GridMeasure(g.u_max, g.G), p)
        assert val ** p == pytest.approx(np.sum(g.masses * g.diagonal_cost(p)), rel=1e-12)
        assert landfill_norm(g, p) == pytest.approx(val, rel=1e-12)


def test_grid_ot_metric_properties():
    rng = np.random.default_rng(4)
    for _ in range(20):
        a, b, c = (_random_grid(rng) for _ in range(3))
        assert grid_ot(a, b, 2) == pytest.approx(grid_ot(b, a, 2), abs=1e-7)
        assert grid_ot(a, c, 2) <= grid_ot(a, b, 2) + grid_ot(b, c, 2) + 1e-7


def test_kde_examples():
    assert kde_heatmap(PersistenceMeasure(), 0.1, 20, 1.0).total_mass() == 0
    k = kde_heatmap(PersistenceMeasure([[0.305, 0.705]], [1.0]), 1e-4, 100, 1.0)
    assert k.masses[29:32, 69:72].sum() >= 0.99
    k = kde_heatmap(PersistenceMeasure([[0.3, 0.7], [0.2, 0.5]], [1.0, 0.5]), 0.02, 100, 1.0)
    assert k.total_mass() <= 1.5 and k.total_mass() == pytest.approx(1.5, abs=1e-6)


def test_grid_csv_roundtrip(tmp_path):
    g = _random_grid(np.random.default_rng(2))
    g.to_csv(tmp_path / "g.csv")
    h = GridMeasure.from_csv(tmp_path / "g.csv")
    assert h.u_max == g.u_max and np.array_equal(h.masses, g.masses)


def _model(masses, u_max=2.0, m=2):
    return LimitMeasureModel(GridMeasure(u_max, masses.shape[0], masses), 1, 0, m, 1)


def test_change_of_variable_identity():
    M = np.zeros((10, 10))
    M[1, 3], M[2, 7] = 0.5, 0.25
    out = change_of_variable(_model(M), np.full(50, 1 / 50), np.ones(50))
    np.testing.assert_allclose(out.masses, M, atol=1e-15)


def test_change_of_variable_constant_density():
    # f = 1/V dilates by V^(1/m) and keeps the base mass
    M = np.zeros((40, 40))
    M[2, 5] = 1.0
    V, m = 4.0, 2
    w = np.full(10, V / 10)
    out = change_of_variable(_model(M, 2.0, m), w, np.full(10, 1 / V), u_max=4.0, G=40)
    assert out.total_mass() == pytest.approx(1.0)
    loc = out.centers()[np.argmax(out.masses[out.nonzero()])]
    want = np.array([2.5, 5.5]) * 0.05 * V ** (1 / m)
    assert np.max(np.abs(loc - want)) <= out.h


def test_change_of_variable_piecewise_mixture():
    M = np.zeros((20, 20))
    M[1, 4] = 1.0
    f = np.array([0.5, 0.5, 2.0])
    w = np.array([0.5, 0.5, 0.25])
    out = change_of_variable(_model(M, 1.0, 1), w, f, u_max=4.0, G=80)
    base = np.array([1.5, 4.5]) * 0.05
    for fx, mass in ((0.5, 0.5), (2.0, 0.5)):
        loc = base * fx ** -1.0
        idx = tuple(np.floor(loc / out.h).astype(int))
        assert out.masses[idx] == pytest.approx(mass)


def test_change_of_variable_diagonal_cell():
    M = np.zeros((10, 10))
    M[3, 3] = 1.0
    out = change_of_variable(_model(M, 1.0, 2), [1.0], [1.0])
    assert out.masses[3, 3] == pytest.approx(1.0)


def test_change_of_variable_rejects_nonpositive():
    with pytest.raises(ValueError):
        change_of_variable(_model(np.eye(4)), [1.0], [0.0])


def test_mu_infinity_zero_for_high_degree():
    mod = estimate_mu_infinity(2, 2)
    assert mod.base.total_mass() == 0 and "zero" in mod.note


def test_mu_infinity_degree_zero_support():
    mod = estimate_mu_infinity(1, 0, n=1000, reps=2, seed=0, G=40)
    assert mod.base.total_mass() > 0
    assert mod.base.total_mass() == pytest.approx(mod.base.masses[0].sum())


def test_mu_infinity_needs_enough_points():
    with pytest.raises(ValueError):
        estimate_mu_infinity(2, 1, n=100)


def test_mu_infinity_seed_consistency():
    a = estimate_mu_infinity(2, 1, n=10_000, reps=5, seed=0, G=30, u_max=3.0)
    b = estimate_mu_infinity(2, 1, n=10_000, reps=5, seed=100, G=30, u_max=3.0)
    assert np.abs(a.base.masses - b.base.masses).sum() < 0.1 * a.base.total_mass()
