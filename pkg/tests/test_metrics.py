import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cechpers.homology import PersistenceDiagram, cech_diagrams
from cechpers.manifold import sample_iid, torus, circle
from cechpers.metrics import (bottleneck, distance, exhaustive_distance, matching_cost, total_persistence,
                              wasserstein, _prematched, linf, pers)
from conftest import random_diagram

INF = np.inf


def test_identical_diagrams():
    a = np.array([[0.0, 1.0], [0.2, 0.7]])
    r = bottleneck(a, a)
    assert r.value == 0 and sorted(r.matching.pairs) == [(0, 0), (1, 1)]
    assert wasserstein(a, a, 2).value == 0


@pytest.mark.parametrize("p", [1, 2, 3, INF])
def test_single_point_to_empty(p):
    assert distance([[0.0, 2.0]], np.zeros((0, 2)), p).value == pytest.approx(1.0)


def test_bottleneck_direct_match():
    assert bottleneck([[0.0, 2.0]], [[0.5, 2.5]]).value == pytest.approx(0.5)


def test_wasserstein_two_point_example():
    assert wasserstein([[0.0, 2.0]], [[0.0, 1.0]], 2).value == pytest.approx(1.0)


def test_rejects_small_p_and_essential():
    with pytest.raises(ValueError):
        wasserstein([[0, 1]], [[0, 1]], 0.5)
    with pytest.raises(ValueError):
        bottleneck(PersistenceDiagram(0, [[0, 1]], [0.0]), [[0, 1]])
    with pytest.raises(ValueError):
        bottleneck([[0, np.inf]], [[0, 1]])


@pytest.mark.parametrize("p", [1, 2, 3, INF])
def test_exhaustive_oracle(rng, p):
    for _ in range(50):
        a = random_diagram(rng, int(rng.integers(0, 5)))
        b = random_diagram(rng, int(rng.integers(0, 5)))
        r = distance(a, b, p)
        assert r.value == pytest.approx(exhaustive_distance(a, b, p), abs=1e-9)
        assert matching_cost(a, b, r.matching, p) == pytest.approx(r.value, abs=1e-9)


def test_matching_is_partition(rng):
    a, b = random_diagram(rng, 6), random_diagram(rng, 4)
    for p in (1, 2, INF):
        m = distance(a, b, p).matching
        assert sorted([i for i, _ in m.pairs] + m.to_diagonal_a) == list(range(6))
        assert sorted([j for _, j in m.pairs] + m.to_diagonal_b) == list(range(4))


def test_pruning_does_not_change_value(rng):
    for _ in range(100):
        a, b = random_diagram(rng, 8), random_diagram(rng, 7)
        for p in (1, 2, 3):
            assert wasserstein(a, b, p).value == pytest.approx(wasserstein(a, b, p, prune=False).value, abs=1e-12)


def test_naive_pruning_rule_is_unsound():
    # a point nearer to the diagonal than to every opposing point may still be matched
    a, b = np.array([[0.0, 2.0]]), np.array([[1.1, 3.1]])
    C = linf(a, b)
    assert pers(a)[0] < C.min()
    assert wasserstein(a, b, 1).value == pytest.approx(1.1)
    assert wasserstein(a, b, 1).matching.pairs == [(0, 0)]
    assert not _prematched(C, pers(a), pers(b), 1)[0][0]


def test_symmetry(rng):
    for _ in range(30):
        a, b = random_diagram(rng, 5), random_diagram(rng, 6)
        for p in (1, 2, INF):
            assert distance(a, b, p).value == distance(b, a, p).value


@pytest.mark.parametrize("p", [1, 2, INF])
def test_triangle_inequality(rng, p):
    for _ in range(30):
        a, b, c = (random_diagram(rng, int(rng.integers(0, 7))) for _ in range(3))
        assert distance(a, c, p).value <= distance(a, b, p).value + distance(b, c, p).value + 1e-9


def test_distance_to_empty_is_total_persistence(rng):
    for _ in range(20):
        a = random_diagram(rng, 6)
        for p in (1, 2, 3):
            assert wasserstein(a, np.zeros((0, 2)), p).value ** p == pytest.approx(total_persistence(a, p), rel=1e-12)


def test_monotone_in_p(rng):
    # the empirically valid direction: OT_p decreases as p grows
    for _ in range(100):
        a, b = random_diagram(rng, int(rng.integers(1, 5))), random_diagram(rng, int(rng.integers(0, 5)))
        vals = [exhaustive_distance(a, b, p) for p in (1, 1.5, 2, 4, INF)]
        assert all(x >= y - 1e-12 for x, y in zip(vals, vals[1:]))
        vals = [distance(a, b, p).value for p in (1, 1.5, 2, 4, INF)]
        assert all(x >= y - 1e-9 for x, y in zip(vals, vals[1:]))


def test_total_persistence_examples():
    assert total_persistence(np.zeros((0, 2)), 1) == 0
    assert total_persistence([[0, 2], [1, 2]], 2) == pytest.approx(1.25)
    assert total_persistence([[0, 2]], 1) == 1 == wasserstein([[0, 2]], np.zeros((0, 2)), 1).value


def test_bottleneck_stability_nested(rng):
    from scipy.spatial import cKDTree
    for spec in (circle(1), torus(2, 1)):
        A = sample_iid(spec, 60, seed=3).points
        sub = rng.choice(60, 35, replace=False)
        B = A[sub]
        dH = cKDTree(B).query(A)[0].max()
        da, db = cech_diagrams(A, 1, 2 * spec.enclosing_radius), cech_diagrams(B, 1, 2 * spec.enclosing_radius)
        for i in (0, 1):
            assert bottleneck(da[i].points, db[i].points).value <= dH + 1e-9


def test_total_persistence_bound(rng):
    for _ in range(30):
        a, b = random_diagram(rng, 6), random_diagram(rng, 6)
        eps = bottleneck(a, b).value
        for alpha, p in ((1, 2), (1, 3), (2, 3), (2, 2)):
            M = max(total_persistence(a, alpha), total_persistence(b, alpha))
            assert wasserstein(a, b, p).value ** p <= 2 * M * eps ** (p - alpha) * (1 + 1e-9)


def test_total_persistence_bound_needs_factor_two():
    # k tiny points against k other tiny points: OT_p^p = 2 M eps^(p - alpha)
    k, d = 5, 0.01
    a = np.c_[np.arange(k) * 1.0, np.arange(k) * 1.0 + 2 * d]
    b = a + 0.5
    eps = bottleneck(a, b).value
    M = total_persistence(a, 1)
    assert eps == pytest.approx(d)
    assert wasserstein(a, b, 2).value ** 2 == pytest.approx(2 * M * eps)


def test_result_json_shape():
    d = distance([[0, 2]], [[0.5, 2.5], [0, 0.1]], INF).to_dict()
    assert d["p"] == "inf" and d["value"] == pytest.approx(0.5)
    assert sorted(map(tuple, d["matching"]), key=str) == sorted([(0, 0), (None, 1)], key=str)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.floats(0, 5), st.floats(0.01, 5)), max_size=6),
       st.lists(st.tuples(st.floats(0, 5), st.floats(0.01, 5)), max_size=6))
def test_bottleneck_le_wasserstein(xa, xb):
    a = np.array([[u, u + v] for u, v in xa]).reshape(-1, 2)
    b = np.array([[u, u + v] for u, v in xb]).reshape(-1, 2)
    w = bottleneck(a, b).value
    for p in (1, 2):
        assert w <= wasserstein(a, b, p).value + 1e-9
