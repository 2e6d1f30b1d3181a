from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cechpers.cech import (Filtration, SimplexBudgetError, brute_force_filtration, build_filtration,
                           min_enclosing_ball)


def _circumball_oracle(P):
    """Smallest ball over all circumballs of subsets of size <= 3 that contain every point (2D)."""
    best = np.inf
    for k in (1, 2, 3):
        for sub in combinations(range(len(P)), k):
            S = P[list(sub)]
            if k == 1:
                c = S[0]
            elif k == 2:
                c = S.mean(axis=0)
            else:
                a, b, cc = S
                d = 2 * (a[0] * (b[1] - cc[1]) + b[0] * (cc[1] - a[1]) + cc[0] * (a[1] - b[1]))
                if abs(d) < 1e-12:
                    continue
                ux = (a @ a * (b[1] - cc[1]) + b @ b * (cc[1] - a[1]) + cc @ cc * (a[1] - b[1])) / d
                uy = (a @ a * (cc[0] - b[0]) + b @ b * (a[0] - cc[0]) + cc @ cc * (b[0] - a[0])) / d
                c = np.array([ux, uy])
            r = np.max(np.linalg.norm(P - c, axis=1))
            if np.all(np.linalg.norm(P - c, axis=1) <= r + 1e-12):
                best = min(best, r)
    return best


def test_meb_single_point():
    b = min_enclosing_ball(np.array([[1.0, 2.0]]))
    assert b.radius == 0 and np.array_equal(b.center, [1.0, 2.0])


def test_meb_two_points():
    b = min_enclosing_ball(np.array([[0.0, 0.0], [2.0, 0.0]]))
    assert b.radius == pytest.approx(1.0, abs=1e-15)
    np.testing.assert_allclose(b.center, [1.0, 0.0])


def test_meb_equilateral():
    P = np.array([[0, 0], [1, 0], [0.5, np.sqrt(3) / 2]])
    assert min_enclosing_ball(P).radius == pytest.approx(1 / np.sqrt(3), abs=1e-12)


def test_meb_obtuse():
    b = min_enclosing_ball(np.array([[0.0, 0.0], [4.0, 0.0], [1.0, 1.0]]))
    assert b.radius == pytest.approx(2.0, abs=1e-12)
    np.testing.assert_allclose(b.center, [2.0, 0.0], atol=1e-12)


def test_meb_duplicates():
    b = min_enclosing_ball(np.array([[1.0, 1.0, 1.0]] * 4))
    assert b.radius == pytest.approx(0.0, abs=1e-12)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.tuples(st.floats(-10, 10), st.floats(-10, 10)), min_size=1, max_size=3))
def test_meb_matches_circumball_oracle(pts):
    P = np.array(pts, dtype=float)
    b = min_enclosing_ball(P)
    assert np.all(np.linalg.norm(P - b.center, axis=1) <= b.radius + 1e-9)
    assert b.radius == pytest.approx(_circumball_oracle(P), rel=1e-9, abs=1e-9)


def test_two_point_filtration():
    f = build_filtration(np.array([[0.0, 0.0], [1.0, 0.0]]), 1, 1.0)
    assert [(s.dim, s.value) for s in f] == [(0, 0.0), (0, 0.0), (1, 0.5)]


def test_equilateral_filtration():
    P = np.array([[0, 0], [1, 0], [0.5, np.sqrt(3) / 2]])
    f = build_filtration(P, 2, 1.0)
    assert f.counts() == [3, 3, 1]
    np.testing.assert_allclose(f.vals[1], 0.5)
    assert f.vals[2][0] == pytest.approx(1 / np.sqrt(3), abs=1e-12)


@pytest.mark.parametrize("seed", range(12))
def test_matches_brute_force(seed):
    rng = np.random.default_rng(seed)
    d = 2 + seed % 2
    P = rng.random((int(rng.integers(3, 11)), d))
    cap = float(rng.uniform(0.2, 0.8))
    f = build_filtration(P, 3, cap)
    got = {s.vertices: s.value for s in f}
    want = brute_force_filtration(P, 3, cap)
    assert set(got) == set(want)
    for k, v in want.items():
        assert got[k] == pytest.approx(v, abs=1e-12)


def _facet_check(f):
    for k in range(1, f.max_dim + 1):
        for row, s in enumerate(f.verts[k]):
            for drop in range(k + 1):
                r = f.index_of(np.delete(s, drop))
                assert r >= 0
                assert f.vals[k - 1][r] <= f.vals[k][row]
                assert f.position[k - 1][r] < f.position[k][row]


@pytest.mark.parametrize("seed", range(5))
def test_monotone_and_facets_earlier(seed):
    P = np.random.default_rng(seed).random((12, 3))
    f = build_filtration(P, 3, 0.6)
    _facet_check(f)
    order = list(zip(f.values, f.dims))
    assert order == sorted(order)


def test_cap_soundness():
    P = np.random.default_rng(4).random((15, 2))
    small = {s.vertices: s.value for s in build_filtration(P, 2, 0.2)}
    big = {s.vertices: s.value for s in build_filtration(P, 2, 0.4)}
    assert set(small) <= set(big)
    assert all(big[k] == v for k, v in small.items())


def test_permutation_invariance():
    rng = np.random.default_rng(2)
    P = rng.random((14, 2))
    perm = rng.permutation(14)
    a = build_filtration(P, 2, 0.5)
    b = build_filtration(P[perm], 2, 0.5)
    assert sorted(zip(a.dims, a.values)) == sorted(zip(b.dims, b.values))


def test_subset_radius_bound():
    P = np.random.default_rng(8).random((10, 3))
    f = build_filtration(P, 3, 1.0)
    for s in f:
        for k in range(1, len(s.vertices)):
            for sub in combinations(s.vertices, k):
                assert min_enclosing_ball(P[list(sub)]).radius <= s.value + 1e-12


def test_budget_error_reports_count():
    P = np.random.default_rng(0).random((60, 2))
    with pytest.raises(SimplexBudgetError) as err:
        build_filtration(P, 3, 1.0, budget=1000)
    assert err.value.count > 1000


def test_filtration_csv_roundtrip(tmp_path):
    P = np.random.default_rng(1).random((9, 2))
    f = build_filtration(P, 2, 0.5)
    f.to_csv(tmp_path / "f.csv")
    g = Filtration.from_csv(tmp_path / "f.csv", 0.5)
    assert [(s.vertices, s.value) for s in f] == [(s.vertices, s.value) for s in g]


@pytest.mark.parametrize("d,seed", [(2, 0), (2, 1), (3, 2), (3, 3)])
def test_certified_cap_gives_full_diagrams(d, seed):
    from cechpers.cech import full_radius_cap
    from cechpers.homology import cech_diagrams
    P = np.random.default_rng(seed).normal(size=(60, d))
    cap = full_radius_cap(P)
    assert cap < 10
    a, b = cech_diagrams(P, 2 if d == 3 else 1, cap), cech_diagrams(P, 2 if d == 3 else 1, 10.0)
    for x, y in zip(a, b):
        assert x == y


def test_critical_value_bound_circle():
    from cechpers.cech import critical_value_bound
    t = np.linspace(0, 2 * np.pi, 64, endpoint=False)
    P = np.c_[np.cos(t), np.sin(t)]
    # the center is a critical point of value 1; the bound exceeds it by at most the grid slack
    assert 1.0 <= critical_value_bound(P) <= 1.01
