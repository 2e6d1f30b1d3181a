import numpy as np
import pytest

from cechpers.features import FeatureConfig, grid_bumps, linear_feature_map, persistence_image, window_for
from cechpers.homology import PersistenceDiagram
from cechpers.metrics import wasserstein
from conftest import random_diagram

CFG = FeatureConfig(G=20, birth_range=(0.0, 1.0), pers_range=(0.0, 1.0), p=2.0)


def test_empty():
    assert not persistence_image(np.zeros((0, 2)), CFG).any()
    assert not linear_feature_map(np.zeros((0, 2)), 2, grid_bumps(CFG)).any()


def test_tiny_bandwidth_concentrates():
    cfg = FeatureConfig(G=20, p=1.0, bandwidth=1e-6)
    img = persistence_image([[0.33, 0.75]], cfg).reshape(20, 20)
    assert img[6, 4] == pytest.approx(0.21, rel=1e-9)
    assert img.sum() == pytest.approx(0.21)


def test_additive(rng):
    a, b = random_diagram(rng, 10, 0, 0.5), random_diagram(rng, 7, 0, 0.5)
    np.testing.assert_allclose(persistence_image(np.vstack([a, b]), CFG),
                               persistence_image(a, CFG) + persistence_image(b, CFG), rtol=1e-13, atol=1e-15)


def test_permutation_invariant_bitwise(rng):
    a = random_diagram(rng, 30, 0, 0.5)
    assert np.array_equal(persistence_image(a, CFG), persistence_image(a[rng.permutation(30)], CFG))


def test_single_point_feature_map():
    phi = lambda u: np.c_[u[:, 0], np.ones(len(u))]
    np.testing.assert_allclose(linear_feature_map([[0.2, 0.6]], 3, phi), [0.2 ** 3 * 0.2, 0.2 ** 3])


def test_image_equals_feature_map(rng):
    a = random_diagram(rng, 25, 0, 0.5)
    for p in (1.0, 2.0, 3.5):
        cfg = FeatureConfig(G=16, birth_range=(0, 1), pers_range=(0, 1), p=p)
        np.testing.assert_allclose(persistence_image(a, cfg), linear_feature_map(a, p, grid_bumps(cfg)),
                                   rtol=1e-9, atol=1e-12)


def test_arctan_weight():
    cfg = FeatureConfig(G=4, weight="arctan_power", p=2.0, bandwidth=1e-6)
    assert persistence_image([[0.1, 0.5]], cfg).sum() == pytest.approx(np.arctan(0.04))


def test_config_validation():
    with pytest.raises(ValueError):
        FeatureConfig(G=0)
    with pytest.raises(ValueError):
        FeatureConfig(bandwidth=-1.0)
    with pytest.raises(ValueError):
        FeatureConfig(weight="log")


def test_continuity_ratio_bounded(rng):
    ratios = []
    for _ in range(50):
        a = random_diagram(rng, 12, 0, 0.5)
        b = a + rng.normal(scale=0.01, size=a.shape)
        b[:, 1] = np.maximum(b[:, 1], b[:, 0] + 1e-3)
        b = b[rng.random(12) < 0.8]
        cfg = FeatureConfig(G=20, birth_range=(0, 1.2), pers_range=(0, 1.2), p=2.0)
        num = np.linalg.norm(persistence_image(a, cfg) - persistence_image(b, cfg), 1)
        ratios.append(num / wasserstein(a, b, 2).value)
    assert max(ratios) < 50


def test_window_covers_points(rng):
    a = random_diagram(rng, 10, 0, 3)
    cfg = window_for([a], G=10, p=1.0)
    img = persistence_image(a, FeatureConfig(10, cfg.birth_range, cfg.pers_range, 1e-9, "power", 1.0))
    assert img.sum() == pytest.approx(np.sum(0.5 * (a[:, 1] - a[:, 0])))
