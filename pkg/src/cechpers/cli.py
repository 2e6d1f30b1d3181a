"""Command-line interface and experiment harness (``tda``)."""
import argparse
import json
import os
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from . import svg
from .cech import SimplexBudgetError, build_filtration, full_radius_cap
from .features import FeatureConfig, image_to_csv, image_to_svg, persistence_image, window_for
from .homology import PersistenceDiagram, cech_diagrams, read_diagrams, write_diagrams
from .manifold import (DiffeoField, ManifoldSpec, apply_diffeo, circle, estimate_reach, hausdorff_to_manifold,
                       pathological_curve, random_diffeo, read_cloud_csv, reference_grid, sample_iid, torus,
                       unit_cube)
from .measures import (GridMeasure, change_of_variable, estimate_mu_infinity, grid_ot, landfill_norm,
                       rescale_region1, to_grid)
from .metrics import distance, total_persistence
from .regions import classify

EXPERIMENTS = ("fig2_regions_images", "fig3_slopes", "fig4_measure_ot", "stability_suite", "pathological_demo")
DEFAULT_N_LIST = [int(round(x)) for x in np.logspace(2, 4, 7)]


@dataclass
class ExperimentConfig:
    """Experiment description; serialized as JSON.

    ``diffeo`` is either a full DiffeoField dictionary or a recipe
    ``{"bumps": K, "seed": s, "strength": a}``.  ``cells`` lists
    (manifold kind, degree, p) triples for fig3_slopes.
    """
    experiment: str
    manifold: dict = field(default_factory=lambda: {"kind": "torus", "params": {"R": 2.0, "r": 1.0}})
    diffeo: Optional[dict] = None
    n_list: list = field(default_factory=lambda: list(DEFAULT_N_LIST))
    reps: int = 10
    degrees: list = field(default_factory=lambda: [1])
    p_list: list = field(default_factory=lambda: [1.0, 3.0])
    alpha_list: list = field(default_factory=lambda: [0.2, 1.0])
    seed: int = 0
    output_dir: str = "out"
    law: str = "uniform_volume"
    cells: list = field(default_factory=list)
    grid: int = 100
    cube_n: int = 10_000
    cube_reps: int = 5
    density_samples: int = 2000
    radius_cap: Optional[float] = None
    budget_simplices: Optional[int] = None
    workers: int = 1

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ValueError(f"unknown experiment {self.experiment!r}")
        if not self.n_list or list(self.n_list) != sorted(self.n_list):
            raise ValueError("n_list must be nonempty and ascending")
        if self.reps < 1:
            raise ValueError("reps must be >= 1")

    def to_dict(self):
        return asdict(self)

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d):
        return cls(**d)

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def spec(self):
        return ManifoldSpec.from_dict(self.manifold)

    def field(self, spec):
        if not self.diffeo:
            return None
        if "centers" in self.diffeo:
            return DiffeoField.from_dict(self.diffeo)
        return random_diffeo(spec, bumps=self.diffeo.get("bumps", 8), seed=self.diffeo.get("seed", 0),
                             strength=self.diffeo.get("strength", 0.5))


# ---------------------------------------------------------------------------
# shared pieces


def _fmt(x):
    return repr(float(x))


def _write_csv(path, header, rows, cfg):
    with open(path, "w") as fh:
        fh.write(f"# config={cfg.to_json()}\n")
        fh.write(",".join(header) + "\n")
        for r in rows:
            fh.write(",".join(_fmt(v) if isinstance(v, (float, np.floating)) else str(v) for v in r) + "\n")


_REF_CACHE = {}


def reference_for(spec, fields=()):
    key = (spec, tuple(json.dumps(f.to_dict(), sort_keys=True) for f in fields))
    if key not in _REF_CACHE:
        _REF_CACHE.clear()
        _REF_CACHE[key] = reference_grid(spec, diffeo=fields)
    return _REF_CACHE[key]


def draw(spec, n, seed, law="uniform_volume", fields=()):
    cloud = sample_iid(spec, n, law=law, seed=seed)
    for f in fields:
        cloud = apply_diffeo(f, cloud)
    return cloud


def eps_hat(cloud, ref):
    """Hausdorff estimate plus the reference mesh (an upper bound for d_H)."""
    return hausdorff_to_manifold(cloud, ref) + ref.mesh


def region1_diagram(cloud, ref, i, tau, budget=None):
    """Degree-i Region-1 diagram computed with the cap eps + eps^2/tau + 1e-6."""
    e = eps_hat(cloud, ref)
    t1 = e + (e * e / tau if np.isfinite(tau) else 0.0)
    dg = cech_diagrams(cloud, i, t1 + 1e-6, budget=budget)[i]
    keep = np.all(dg.points <= t1, axis=1)
    return PersistenceDiagram(i, dg.points[keep]), e


def fit_slope(ns, values):
    """Least-squares slope of mean log value against log n."""
    return float(np.polyfit(np.log(ns), values, 1)[0])


def _pmap(fn, jobs, workers):
    if workers > 1:
        with ProcessPoolExecutor(workers) as ex:
            return list(ex.map(fn, jobs))
    return [fn(j) for j in jobs]


# ---------------------------------------------------------------------------
# Fig. 3: total-persistence slopes


def _spec_of(kind):
    return {"circle": circle(1.0), "torus": torus(2.0, 1.0)}[kind]


def _pers_job(job):
    kind, n, seed, degree, ps, budget = job
    spec = _spec_of(kind)
    cloud = draw(spec, n, seed)
    try:
        dg, e = region1_diagram(cloud, reference_for(spec), degree, spec.reach, budget)
    except SimplexBudgetError as err:
        return {"failed": str(err)}
    return {"pers": {p: total_persistence(dg, p) for p in ps}, "eps": e, "count": len(dg)}


def run_fig3(cfg: ExperimentConfig, out=None):
    """Slopes of log Pers_p(dgm_i^(1)) against log n, with the prediction 1 - p/m.

    Returns
    -------
    list of dict, one per (manifold, degree, p) cell.
    """
    cells = cfg.cells or [["circle", 0, 0.5], ["circle", 0, 1.0], ["torus", 0, 1.0], ["torus", 0, 3.0],
                          ["torus", 1, 2.0]]
    groups = {}
    for kind, i, p in cells:
        groups.setdefault((kind, int(i)), []).append(float(p))
    table, rows, series = [], [], []
    for (kind, i), ps in groups.items():
        m = _spec_of(kind).intrinsic_dim
        jobs = [(kind, n, cfg.seed + r, i, ps, cfg.budget_simplices) for n in cfg.n_list for r in range(cfg.reps)]
        res = _pmap(_pers_job, jobs, cfg.workers)
        for p in ps:
            ns, means, failed = [], [], 0
            for k, n in enumerate(cfg.n_list):
                chunk = res[k * cfg.reps:(k + 1) * cfg.reps]
                good = [c["pers"][p] for c in chunk if "pers" in c and c["pers"][p] > 0]
                failed += sum("failed" in c for c in chunk)
                if good:
                    ns.append(n)
                    means.append(float(np.mean(np.log(good))))
                    rows.append([kind, i, p, n, len(good), means[-1]])
            slope = fit_slope(ns, means) if len(ns) >= 2 else float("nan")
            pred = 1.0 - p / m
            table.append({"manifold": kind, "degree": i, "p": p, "slope": slope, "predicted": pred,
                          "residual": slope - pred, "failed": failed})
            series.append({"x": ns, "y": np.exp(means), "label": f"{kind} i={i} p={p:g} slope {slope:.3f}"})
            c = np.exp(means[-1]) / ns[-1] ** pred if ns else 1.0
            series.append({"x": ns, "y": c * np.asarray(ns, float) ** pred, "label": f"slope {pred:g}",
                           "dashed": True})
    if out:
        _write_csv(os.path.join(out, "fig3_points.csv"), ["manifold", "degree", "p", "n", "reps_ok", "mean_log_pers"],
                   rows, cfg)
        _write_csv(os.path.join(out, "fig3_slopes.csv"),
                   ["manifold", "degree", "p", "slope", "predicted", "residual", "failed"],
                   [[t[k] for k in ("manifold", "degree", "p", "slope", "predicted", "residual", "failed")]
                    for t in table], cfg)
        svg.line_plot(series, os.path.join(out, "fig3_slopes.svg"), "Pers_p of Region 1 vs n", "n", "Pers_p",
                      logx=True, logy=True)
    return table


# ---------------------------------------------------------------------------
# Fig. 4: OT_2 decay of mu_{n,1} towards mu_{f,1}


def torus_parameter_density(spec, X):
    """Density of the uniform-angle law on the torus w.r.t. area, at points X."""
    R, r = spec.p["R"], spec.p["r"]
    rho = np.hypot(X[:, 0], X[:, 1])
    return 1.0 / (4 * np.pi ** 2 * r * rho)


def mu_f_grid(spec, model, n_samples, seed, u_max=None, G=None):
    """change_of_variable with Monte Carlo volume samples of weight Vol(M)/N."""
    xs = sample_iid(spec, n_samples, law="uniform_volume", seed=seed)
    w = np.full(n_samples, spec.volume() / n_samples)
    return change_of_variable(model, w, torus_parameter_density(spec, xs.points), u_max=u_max, G=G)


def run_fig4(cfg: ExperimentConfig, out=None):
    """Normalized OT_2(mu_{n,1}, mu_{f,1}) / OT_2(0, mu_{f,1}) for each n (torus, angle law)."""
    spec = cfg.spec()
    if spec.kind != "torus":
        raise ValueError("fig4 runs on the torus")
    m, i = 2, 1
    model = estimate_mu_infinity(m, i, n=cfg.cube_n, reps=cfg.cube_reps, seed=cfg.seed + 10_000,
                                 G=cfg.grid, budget=cfg.budget_simplices)
    ref = reference_for(spec)
    measures = {}
    for n in cfg.n_list:
        measures[n] = []
        for r in range(cfg.reps):
            cloud = draw(spec, n, cfg.seed + r, law="uniform_parameter")
            dg, _ = region1_diagram(cloud, ref, i, spec.reach, cfg.budget_simplices)
            measures[n].append(rescale_region1(dg, n, m))
    f = torus_parameter_density(spec, sample_iid(spec, 4096, seed=cfg.seed + 20_000).points)
    u_max = model.base.u_max * float(np.min(f)) ** (-1.0 / m)
    top = max([float(mu.locations[:, 1].max()) for v in measures.values() for mu in v if len(mu)] + [0.0])
    u_max = max(u_max, top * 1.001)
    target = mu_f_grid(spec, model, cfg.density_samples, cfg.seed + 30_000, u_max=u_max, G=cfg.grid)
    norm = landfill_norm(target, 2)
    rows, curve = [], []
    for n in cfg.n_list:
        vals = [grid_ot(to_grid(mu, u_max, cfg.grid), target, 2) / norm for mu in measures[n]]
        curve.append(float(np.mean(vals)))
        rows.append([n, len(vals), curve[-1], float(np.std(vals))])
    if out:
        _write_csv(os.path.join(out, "fig4_decay.csv"), ["n", "reps", "normalized_ot2", "std"], rows, cfg)
        svg.line_plot([{"x": cfg.n_list, "y": curve, "label": "OT_2(mu_n, mu_f) / OT_2(0, mu_f)"}],
                      os.path.join(out, "fig4_decay.svg"), "Normalized OT_2 decay", "n", "normalized OT_2",
                      logx=True)
        target.to_csv(os.path.join(out, "fig4_mu_f.csv"))
        target.to_svg(os.path.join(out, "fig4_mu_f.svg"), "mu_f,1 (grid)")
        last = to_grid(measures[cfg.n_list[-1]][0], u_max, cfg.grid)
        last.to_csv(os.path.join(out, "fig4_mu_n.csv"))
        last.to_svg(os.path.join(out, "fig4_mu_n.svg"), f"mu_n,1 at n={cfg.n_list[-1]}")
    return {"n": list(cfg.n_list), "normalized": curve, "norm": norm, "u_max": u_max,
            "dropped": target.dropped}


# ---------------------------------------------------------------------------
# Fig. 2: region scatter and persistence images


def region2_image_fraction(dgm, decomp, cfg):
    """Share of persistence-image mass carried by Region-2 points."""
    total = persistence_image(dgm, cfg).sum()
    part = persistence_image(decomp.region2, cfg).sum()
    return float(part / total) if total > 0 else 0.0


def run_regions_images(cfg: ExperimentConfig, out=None):
    """Region-annotated degree-1 diagram of a (deformed) manifold sample and its persistence images."""
    spec = cfg.spec()
    fld = cfg.field(spec)
    fields = (fld,) if fld is not None else ()
    n = cfg.n_list[-1]
    cloud = draw(spec, n, cfg.seed, cfg.law, fields)
    ref = reference_for(spec, fields)
    e = eps_hat(cloud, ref)
    tau = estimate_reach(spec, fld) * (0.9 if fields else 1.0)
    cap = cfg.radius_cap or full_radius_cap(cloud)
    i = int(cfg.degrees[0])
    dg = cech_diagrams(cloud, i, cap, budget=cfg.budget_simplices)[i]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        dec = classify(dg, e, tau, spec.enclosing_radius)
    fin = PersistenceDiagram(i, dg.points)
    result = {"n": n, "eps": e, "tau": tau, "applicable": dec.applicable, "counts": dec.counts(),
              "essential": dg.essential.tolist(), "fractions": {}}
    for p in cfg.p_list:
        fc = window_for([fin], G=50, p=float(p))
        img = persistence_image(fin, fc)
        result["fractions"][float(p)] = region2_image_fraction(fin, dec, fc)
        if out:
            image_to_csv(img, fc, os.path.join(out, f"fig2_image_p{p:g}.csv"))
            image_to_svg(img, fc, os.path.join(out, f"fig2_image_p{p:g}.svg"), f"persistence image, weight pers^{p:g}")
    if out:
        dec.to_csv(os.path.join(out, "fig2_regions.csv"))
        svg.scatter(dg.points, [f"region {x}" for x in dec.labels], os.path.join(out, "fig2_regions.svg"),
                    f"dgm_{i}, n={n}, eps={e:.3g}, tau={tau:.3g}")
        with open(os.path.join(out, "fig2_summary.json"), "w") as fh:
            json.dump({"config": cfg.to_dict(), **result}, fh, indent=2, sort_keys=True)
    return result


# ---------------------------------------------------------------------------
# stability suite and pathological demo


def run_stability_suite(cfg: ExperimentConfig, out=None):
    """Nested-pair bottleneck stability and the Pers rescaling identity on small clouds."""
    from scipy.spatial import cKDTree
    rows = []
    rng = np.random.default_rng(cfg.seed)
    for t in range(cfg.reps):
        kind = "circle" if t % 2 == 0 else "torus"
        spec = _spec_of(kind)
        n = int(rng.integers(40, 90))
        cloud = draw(spec, n, cfg.seed + t)
        sub = np.sort(rng.choice(n, size=int(rng.integers(n // 2, n)), replace=False))
        A, B = cloud.points, cloud.points[sub]
        dH = float(np.max(cKDTree(B).query(A)[0]))
        da, db = cech_diagrams(A, 1, full_radius_cap(A)), cech_diagrams(B, 1, full_radius_cap(B))
        for i in (0, 1):
            ot = distance(da[i].points, db[i].points, np.inf).value
            rows.append([kind, t, i, n, len(sub), dH, ot, int(ot <= dH + 1e-9)])
    if out:
        _write_csv(os.path.join(out, "stability.csv"),
                   ["manifold", "trial", "degree", "n", "n_sub", "hausdorff", "bottleneck", "ok"], rows, cfg)
    return rows


def run_pathological_demo(cfg: ExperimentConfig, out=None):
    """Pers_alpha(dgm_1) of samples of the non-Morse curve against sample size (qualitative)."""
    spec = pathological_curve()
    cap = cfg.radius_cap or 0.1
    rows = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for n in cfg.n_list:
            for r in range(cfg.reps):
                cloud = sample_iid(spec, n, seed=cfg.seed + r)
                dg = cech_diagrams(cloud, 1, cap, budget=cfg.budget_simplices)[1]
                rows.append([n, r] + [total_persistence(dg, a) for a in cfg.alpha_list])
    if out:
        _write_csv(os.path.join(out, "pathological.csv"), ["n", "rep"] + [f"pers_{a:g}" for a in cfg.alpha_list],
                   rows, cfg)
        series = []
        for k, a in enumerate(cfg.alpha_list):
            means = [np.mean([r[2 + k] for r in rows if r[0] == n]) for n in cfg.n_list]
            series.append({"x": cfg.n_list, "y": means, "label": f"Pers_{a:g}(dgm_1)"})
        svg.line_plot(series, os.path.join(out, "pathological.svg"), "non-Morse curve", "n", "Pers_alpha",
                      logx=True, logy=True)
    return rows


RUNNERS = {"fig2_regions_images": run_regions_images, "fig3_slopes": run_fig3, "fig4_measure_ot": run_fig4,
           "stability_suite": run_stability_suite, "pathological_demo": run_pathological_demo}


# ---------------------------------------------------------------------------
# command line


def _spec_from_args(a):
    params = json.loads(a.params) if a.params else {}
    if a.manifold == "circle":
        return circle(**params)
    if a.manifold == "torus":
        return torus(**params)
    if a.manifold == "cube":
        return unit_cube(**params)
    return pathological_curve()


def _load_config(path):
    if not path:
        return {}
    with open(path) as fh:
        return json.load(fh)


def _dump(obj, out, name):
    text = json.dumps(obj, indent=2, sort_keys=True, default=float)
    if out:
        os.makedirs(out, exist_ok=True)
        with open(os.path.join(out, name), "w") as fh:
            fh.write(text + "\n")
    print(text)


def _diagram(path, degree):
    dgms = read_diagrams(path)
    d = dgms[degree] if degree < len(dgms) else PersistenceDiagram(degree)
    return PersistenceDiagram(degree, d.points)


def cmd_sample(a):
    spec = _spec_from_args(a)
    cloud = sample_iid(spec, a.n, law=a.law, seed=a.seed)
    if a.bumps:
        cloud = apply_diffeo(random_diffeo(spec, bumps=a.bumps, seed=a.seed, strength=a.strength), cloud)
    path = os.path.join(a.out or ".", a.name)
    os.makedirs(a.out or ".", exist_ok=True)
    cloud.to_csv(path)
    print(path)


def cmd_filtration(a):
    cloud = read_cloud_csv(a.cloud, a.density)
    filt = build_filtration(cloud, a.max_dim, a.cap, budget=a.budget_simplices or 50_000_000)
    os.makedirs(a.out or ".", exist_ok=True)
    path = os.path.join(a.out or ".", a.name)
    filt.to_csv(path)
    print(path)


def cmd_diagram(a):
    cloud = read_cloud_csv(a.cloud, a.density)
    cap = full_radius_cap(cloud) if a.cap is None else a.cap
    dgms = cech_diagrams(cloud, a.max_degree, cap, method=a.method, budget=a.budget_simplices)
    os.makedirs(a.out or ".", exist_ok=True)
    path = os.path.join(a.out or ".", a.name)
    write_diagrams(dgms, path)
    print(path)


def cmd_distance(a):
    res = distance(_diagram(a.a, a.degree), _diagram(a.b, a.degree), float(a.p))
    _dump(res.to_dict(), a.out, "distance.json")


def cmd_pers(a):
    d = _diagram(a.diagram, a.degree)
    _dump({"degree": a.degree, "alpha": a.alpha, "value": total_persistence(d, a.alpha)}, a.out, "pers.json")


def cmd_regions(a):
    d = _diagram(a.diagram, a.degree)
    dec = classify(d, a.eps, a.tau, a.R)
    if a.out:
        os.makedirs(a.out, exist_ok=True)
        dec.to_csv(os.path.join(a.out, "regions.csv"))
    _dump({"counts": dec.counts(), "applicable": dec.applicable, "C": dec.C, "thresholds": dec.thresholds},
          a.out, "regions.json")


def cmd_image(a):
    d = _diagram(a.diagram, a.degree)
    fc = window_for([d], G=a.G, p=a.p, weight=a.weight, bandwidth=a.bandwidth)
    img = persistence_image(d, fc)
    os.makedirs(a.out or ".", exist_ok=True)
    image_to_csv(img, fc, os.path.join(a.out or ".", "image.csv"))
    image_to_svg(img, fc, os.path.join(a.out or ".", "image.svg"), f"persistence image, pers^{a.p:g}")
    print(os.path.join(a.out or ".", "image.csv"))


def cmd_measure(a):
    model = estimate_mu_infinity(a.m, a.i, n=a.n, reps=a.reps, seed=a.seed, G=a.G, budget=a.budget_simplices)
    os.makedirs(a.out or ".", exist_ok=True)
    model.base.to_csv(os.path.join(a.out or ".", "mu_infinity.csv"))
    model.base.to_svg(os.path.join(a.out or ".", "mu_infinity.svg"), f"mu_inf, i={a.i}, m={a.m}")
    _dump({"m": a.m, "i": a.i, "n": a.n, "reps": a.reps, "seed": a.seed, "u_max": model.base.u_max,
           "mass": model.base.total_mass(), "note": model.note}, a.out, "mu_infinity.json")


def cmd_experiment(a):
    d = _load_config(a.config)
    d.setdefault("experiment", a.name)
    if d["experiment"] != a.name:
        raise SystemExit(f"config is for {d['experiment']!r}, not {a.name!r}")
    if a.seed is not None:
        d["seed"] = a.seed
    if a.out:
        d["output_dir"] = a.out
    if a.budget_simplices:
        d["budget_simplices"] = a.budget_simplices
    cfg = ExperimentConfig.from_dict(d)
    os.makedirs(cfg.output_dir, exist_ok=True)
    res = RUNNERS[a.name](cfg, cfg.output_dir)
    _dump({"config": cfg.to_dict(), "result": res}, cfg.output_dir, f"{a.name}.json")


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON configuration file")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--out", default=None, help="output directory")
    common.add_argument("--budget-simplices", type=int, default=None, dest="budget_simplices",
                        help="abort when the projected simplex count exceeds N")
    ap = argparse.ArgumentParser(prog="tda", description="Čech persistence, diagram metrics and experiments")
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("sample", parents=[common], help="sample a point cloud")
    s.add_argument("--manifold", choices=["circle", "torus", "cube", "pathological"], default="circle")
    s.add_argument("--params", help='JSON parameters, e.g. \'{"R": 2, "r": 1}\'')
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--law", choices=["uniform_volume", "uniform_parameter"], default="uniform_volume")
    s.add_argument("--bumps", type=int, default=0, help="apply a random bump diffeomorphism")
    s.add_argument("--strength", type=float, default=0.5)
    s.add_argument("--name", default="cloud.csv")
    s.set_defaults(func=cmd_sample)

    s = sub.add_parser("filtration", parents=[common], help="write the Čech filtration")
    s.add_argument("cloud")
    s.add_argument("--density", action="store_true", help="last CSV column is a density")
    s.add_argument("--max-dim", type=int, default=2, dest="max_dim")
    s.add_argument("--cap", type=float, required=True)
    s.add_argument("--name", default="filtration.csv")
    s.set_defaults(func=cmd_filtration)

    s = sub.add_parser("diagram", parents=[common], help="compute persistence diagrams")
    s.add_argument("cloud")
    s.add_argument("--density", action="store_true")
    s.add_argument("--max-degree", type=int, default=1, dest="max_degree")
    s.add_argument("--cap", type=float, default=None,
                   help="radius cap (default: a certified bound on all critical values, i.e. full diagrams)")
    s.add_argument("--method", choices=["implicit", "twist", "dual"], default="implicit")
    s.add_argument("--name", default="diagram.csv")
    s.set_defaults(func=cmd_diagram)

    s = sub.add_parser("distance", parents=[common], help="OT_p or bottleneck between diagrams")
    s.add_argument("a")
    s.add_argument("b")
    s.add_argument("--degree", type=int, default=1)
    s.add_argument("--p", default="2", help="exponent, or inf")
    s.set_defaults(func=cmd_distance)

    s = sub.add_parser("pers", parents=[common], help="alpha-total persistence")
    s.add_argument("diagram")
    s.add_argument("--degree", type=int, default=1)
    s.add_argument("--alpha", type=float, default=1.0)
    s.set_defaults(func=cmd_pers)

    s = sub.add_parser("regions", parents=[common], help="three-region classification")
    s.add_argument("diagram")
    s.add_argument("--degree", type=int, default=1)
    s.add_argument("--eps", type=float, required=True)
    s.add_argument("--tau", type=float, required=True)
    s.add_argument("--R", type=float, required=True)
    s.set_defaults(func=cmd_regions)

    s = sub.add_parser("image", parents=[common], help="persistence image")
    s.add_argument("diagram")
    s.add_argument("--degree", type=int, default=1)
    s.add_argument("--p", type=float, default=1.0)
    s.add_argument("--G", type=int, default=50)
    s.add_argument("--weight", choices=["power", "arctan_power"], default="power")
    s.add_argument("--bandwidth", type=float, default=None)
    s.set_defaults(func=cmd_image)

    s = sub.add_parser("measure", parents=[common], help="estimate the cube limit measure")
    s.add_argument("--m", type=int, default=2)
    s.add_argument("--i", type=int, default=1)
    s.add_argument("--n", type=int, default=10_000)
    s.add_argument("--reps", type=int, default=5)
    s.add_argument("--G", type=int, default=100)
    s.set_defaults(func=cmd_measure)

    s = sub.add_parser("experiment", parents=[common], help="run a named experiment")
    s.add_argument("name", choices=EXPERIMENTS)
    s.set_defaults(func=cmd_experiment)
    return ap


def main(argv=None):
    a = build_parser().parse_args(argv)
    if getattr(a, "seed", None) is None and a.command != "experiment":
        a.seed = 0
    try:
        a.func(a)
    except SimplexBudgetError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
