import json

import numpy as np
import pytest

from cechpers.cli import ExperimentConfig, main
from cechpers.homology import read_diagrams


def _run(*args):
    assert main([str(a) for a in args]) == 0


@pytest.fixture
def pipeline(tmp_path):
    _run("sample", "--manifold", "circle", "--n", 200, "--seed", 3, "--out", tmp_path)
    _run("diagram", tmp_path / "cloud.csv", "--cap", 1.1, "--out", tmp_path)
    return tmp_path


def test_sample_deterministic(tmp_path):
    for name in ("a.csv", "b.csv"):
        _run("sample", "--manifold", "torus", "--params", '{"R": 2, "r": 1}', "--n", 50, "--seed", 1,
             "--bumps", 4, "--out", tmp_path, "--name", name)
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_diagram_and_queries(pipeline, capsys):
    dgms = read_diagrams(pipeline / "diagram.csv")
    assert len(dgms[1].essential) == 0 and len(dgms[0].essential) == 1
    capsys.readouterr()
    _run("pers", pipeline / "diagram.csv", "--alpha", 1)
    assert json.loads(capsys.readouterr().out)["value"] > 0.3
    _run("distance", pipeline / "diagram.csv", pipeline / "diagram.csv", "--p", "inf")
    assert json.loads(capsys.readouterr().out)["value"] == 0
    _run("regions", pipeline / "diagram.csv", "--eps", 0.1, "--tau", 1, "--R", 1, "--out", pipeline)
    assert json.loads(capsys.readouterr().out)["counts"]["2"] == 1
    assert (pipeline / "regions.csv").read_text().splitlines()[1] == "birth,death,region"
    _run("image", pipeline / "diagram.csv", "--p", 3, "--G", 10, "--out", pipeline)
    assert (pipeline / "image.svg").exists()


def test_filtration_subcommand(pipeline):
    _run("filtration", pipeline / "cloud.csv", "--cap", 0.2, "--max-dim", 2, "--out", pipeline)
    assert (pipeline / "filtration.csv").stat().st_size > 0


def test_budget_fails_loudly(pipeline, capsys):
    assert main(["diagram", str(pipeline / "cloud.csv"), "--cap", "1.1", "--budget-simplices", "100",
                 "--out", str(pipeline), "--name", "x.csv"]) == 2
    assert "exceeds budget" in capsys.readouterr().err
    assert not (pipeline / "x.csv").exists()


def test_measure_subcommand(tmp_path):
    _run("measure", "--m", 2, "--i", 1, "--n", 1000, "--reps", 1, "--G", 20, "--out", tmp_path)
    assert json.loads((tmp_path / "mu_infinity.json").read_text())["mass"] > 0


def test_config_validation():
    with pytest.raises(ValueError):
        ExperimentConfig("fig9")
    with pytest.raises(ValueError):
        ExperimentConfig("fig3_slopes", n_list=[200, 100])
    with pytest.raises(ValueError):
        ExperimentConfig("fig3_slopes", reps=0)


def _experiment(tmp_path, name, cfg):
    path = tmp_path / f"{name}.json"
    path.write_text(json.dumps({"experiment": name, **cfg}))
    outs = []
    for k in range(2):
        out = tmp_path / "run"
        _run("experiment", name, "--config", path, "--out", out)
        outs.append({p.name: p.read_bytes() for p in sorted(out.glob("*.csv"))})
    return outs


@pytest.mark.parametrize("name,cfg", [
    ("stability_suite", {"reps": 2}),
    ("pathological_demo", {"n_list": [50, 100], "reps": 1}),
    ("fig3_slopes", {"n_list": [100, 200], "reps": 2, "cells": [["circle", 0, 1.0]]}),
])
def test_experiments_byte_reproducible(tmp_path, name, cfg):
    a, b = _experiment(tmp_path, name, cfg)
    assert a and a == b
    first = next(iter(a.values())).decode().splitlines()[0]
    assert first.startswith("# config=") and '"seed": 0' in first


def test_regions_images_without_diffeo(tmp_path):
    cfg = ExperimentConfig("fig2_regions_images", manifold={"kind": "circle", "params": {"r": 1.0}},
                           n_list=[150], p_list=[1.0, 3.0])
    from cechpers.cli import run_regions_images
    res = run_regions_images(cfg, str(tmp_path))
    assert res["counts"]["2"] == 1 and res["fractions"][3.0] > 0.5
    assert (tmp_path / "fig2_regions.csv").exists()
