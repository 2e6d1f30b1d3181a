import numpy as np
import pytest

from cechpers.cech import build_filtration
from cechpers.homology import (PersistenceDiagram, betti_at, cech_diagrams, compute_diagrams, read_diagrams,
                               write_diagrams)


def test_two_points():
    d = cech_diagrams(np.array([[0.0, 0.0], [1.0, 0.0]]), 0, 1.0)[0]
    np.testing.assert_array_equal(d.points, [[0.0, 0.5]])
    np.testing.assert_array_equal(d.essential, [0.0])


def test_equilateral_triangle():
    P = np.array([[0, 0], [1, 0], [0.5, np.sqrt(3) / 2]])
    for method in ("implicit", "twist", "dual"):
        d = cech_diagrams(P, 1, 1.0, method=method)[1]
        assert len(d) == 1 and len(d.essential) == 0
        assert d.points[0, 0] == pytest.approx(0.5)
        assert d.points[0, 1] == pytest.approx(1 / np.sqrt(3), abs=1e-12)


@pytest.mark.parametrize("seed", range(20))
def test_engines_agree_and_match_ranks(seed):
    rng = np.random.default_rng(seed)
    P = rng.random((int(rng.integers(3, 9)), 2 + seed % 2))
    f = build_filtration(P, 3, 2.0)
    a = compute_diagrams(f, "twist")
    b = compute_diagrams(f, "dual")
    c = cech_diagrams(P, 2, 2.0)
    for i in range(3):
        assert a[i] == b[i] == c[i]
    for t in rng.uniform(0, 0.8, size=5):
        for i in range(3):
            assert a[i].alive_at(t) == betti_at(f, t, i)


def test_betti_all_components():
    P = np.random.default_rng(0).random((7, 2))
    f = build_filtration(P, 1, 1.0)
    assert betti_at(f, 0.0, 0) == 7


def test_betti_above_cap_warns():
    f = build_filtration(np.random.default_rng(0).random((5, 2)), 1, 1.0)
    with pytest.warns(UserWarning):
        assert betti_at(f, 0.5, 3) == 0


def test_circle_betti_one():
    th = np.random.default_rng(0).uniform(0, 2 * np.pi, 500)
    P = np.c_[np.cos(th), np.sin(th)]
    gap = np.max(np.diff(np.sort(np.r_[th, th.min() + 2 * np.pi])))
    t = np.sin(gap / 2) * 1.001
    f = build_filtration(P, 2, t)
    assert betti_at(f, t, 1) == 1
    d = cech_diagrams(P, 1, t)[1]
    assert d.alive_at(t) == 1


def test_deterministic_and_permutation_invariant():
    rng = np.random.default_rng(5)
    P = rng.random((40, 2))
    a = cech_diagrams(P, 1, 0.3)
    assert all(x == y for x, y in zip(a, cech_diagrams(P, 1, 0.3)))
    b = cech_diagrams(P[rng.permutation(40)], 1, 0.3)
    for x, y in zip(a, b):
        np.testing.assert_allclose(x.points, y.points, atol=1e-15)
        np.testing.assert_array_equal(x.essential, y.essential)


def test_no_death_beyond_cap():
    P = np.random.default_rng(6).random((60, 3))
    for d in cech_diagrams(P, 2, 0.15):
        assert np.all(d.points[:, 1] <= 0.15)


def test_zero_persistence_dropped():
    P = np.random.default_rng(7).random((30, 2))
    for d in cech_diagrams(P, 1, 1.0):
        assert np.all(d.points[:, 0] < d.points[:, 1])


def test_csv_roundtrip(tmp_path):
    dg = cech_diagrams(np.random.default_rng(1).random((20, 2)), 1, 0.2)
    write_diagrams(dg, tmp_path / "d.csv")
    back = read_diagrams(tmp_path / "d.csv")
    assert all(x == y for x, y in zip(dg, back))


def test_diagram_sorting():
    d = PersistenceDiagram(1, [[0.3, 0.5], [0.1, 0.9]], [0.2])
    np.testing.assert_array_equal(d.points, [[0.1, 0.9], [0.3, 0.5]])
    assert d.alive_at(0.35) == 3
