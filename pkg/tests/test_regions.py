import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cechpers.homology import PersistenceDiagram, cech_diagrams
from cechpers.manifold import circle, hausdorff_to_manifold, reference_grid, sample_iid, torus
from cechpers.regions import (circle_reference, classify, distance_gap_check, exact_distance, forbidden_band_hits,
                              gap_bound, planar_curve_reference, region_constant, region_match_errors)


def test_classify_examples():
    dg = PersistenceDiagram(1, [[0.05, 0.08], [0.05, 0.995], [0.995, 1.2], [0.05, 0.5]])
    dec = classify(dg, 0.1, 1.0, 2.0)
    assert dec.counts() == {"1": 1, "2": 1, "3": 1, "violation": 1}
    assert dec.region2.points.tolist() == [[0.05, 0.995]]
    assert dec.violations.points.tolist() == [[0.05, 0.5]]
    assert dec.thresholds["region1_max"] == pytest.approx(0.11)
    assert dec.thresholds["upper_min"] == pytest.approx(0.99)
    assert dec.C == pytest.approx(6.0) and dec.applicable


def test_classify_not_applicable_warns():
    with pytest.warns(UserWarning):
        dec = classify(PersistenceDiagram(1, [[0.0, 1.0]]), 0.3, 1.0, 2.0)
    assert not dec.applicable


def test_region_constant():
    assert region_constant(0.5, 3.0) == pytest.approx(4 * 7)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(st.floats(0, 2), st.floats(0, 2)), max_size=30), st.floats(0.001, 0.24))
def test_partition(pts, eps):
    pts = np.array([(min(a, b), max(a, b)) for a, b in pts]).reshape(-1, 2)
    dec = classify(PersistenceDiagram(1, pts), eps, 1.0, 2.0)
    assert sum(dec.counts().values()) == len(pts)
    assert sorted(map(tuple, np.vstack([dec.region1.points, dec.region2.points, dec.region3.points,
                                        dec.violations.points]))) == sorted(map(tuple, dec.source.points))


def test_forbidden_band():
    dg = PersistenceDiagram(1, [[0.05, 0.5]], [0.7])
    assert sorted(forbidden_band_hits(dg, 0.1, 1.0)) == [0.5, 0.7]


def test_self_reference_zero_errors():
    dg = PersistenceDiagram(1, [[0.01, 0.02], [0.05, 0.995], [0.995, 1.2]])
    st_ = region_match_errors(classify(dg, 0.1, 1.0, 2.0), dg, eps_ref=0.1)
    assert st_["bottleneck"] == 0 and st_["region2_death_error"] == 0 and st_["region3_error"] == 0
    assert st_["region2_count"] == 1 and st_["flagged"] == []


def test_empty_reference_rejected():
    dec = classify(PersistenceDiagram(1, [[0.0, 0.995]]), 0.1, 1.0, 2.0)
    with pytest.raises(ValueError):
        region_match_errors(dec, PersistenceDiagram(1))


def test_circle_region2_single_point():
    spec = circle(1.0)
    cloud = sample_iid(spec, 200, seed=0)
    eps = hausdorff_to_manifold(cloud, reference_grid(spec)) + reference_grid(spec).mesh
    dg = cech_diagrams(cloud, 1, 1.05)[1]
    dec = classify(PersistenceDiagram(1, dg.points), eps, 1.0, 1.0)
    assert dec.counts()["2"] == 1 and dec.counts()["violation"] == 0
    st_ = region_match_errors(dec, circle_reference().diagram)
    assert st_["flagged"] == [] and st_["region2_death_error"] <= dec.C * eps ** 2


def test_planar_reference_round_circle():
    ref = planar_curve_reference(circle(1.0))
    assert len(ref.diagram) == 1
    b, d = ref.diagram.points[0]
    assert b <= ref.birth_bias and d == pytest.approx(1.0, abs=1e-6)


def test_gap_bound_formula():
    assert gap_bound(0.1, 0.5, 1.0) == pytest.approx(0.01 / 1.0 * 1.5)


def test_exact_distance():
    assert exact_distance(circle(1.0), [[0.0, 0.0]])[0] == 1.0
    assert exact_distance(torus(2.0, 1.0), [[2.0, 0.0, 0.0]])[0] == 1.0


def test_gap_zero_at_center():
    cloud = sample_iid(circle(1.0), 7, seed=1)
    d_A = np.min(np.linalg.norm(cloud.points, axis=1))
    assert abs(exact_distance(circle(1.0), [[0.0, 0.0]])[0] - d_A) < 1e-15


def test_gap_check_self_and_circle():
    spec = circle(1.0)
    ref = reference_grid(spec)
    from cechpers.manifold import PointCloud
    self_cloud = PointCloud(ref.points, None, 0, spec)
    assert distance_gap_check(self_cloud, ref, probes=300)["max_violation"] <= 0
    out = distance_gap_check(sample_iid(spec, 200, seed=0), ref, probes=1000)
    assert out["probes"] == 1000 and out["max_violation"] <= out["margin"]


def test_gap_check_rejects_mismatch():
    with pytest.raises(ValueError):
        distance_gap_check(sample_iid(circle(1.0), 10, seed=0), reference_grid(circle(2.0)))


def test_essential_labels():
    from cechpers.regions import essential_labels
    dg = PersistenceDiagram(1, [], [0.05, 0.105, 0.5, 0.995])
    assert essential_labels(dg, 0.1, 1.0).tolist() == ["2", "violation", "band", "3"]
