"""Experiment runner: risk curves, dimension and sample-size sweeps, CSV output.

Every CSV starts with ``# spec: {json}`` holding the full experiment
spec, so ``load_spec`` on an output file reproduces it byte for byte.
Repetition r draws its data from seed + r; the algorithm's own noise
comes from an independent stream keyed on (seed + r, eps index, kappa
index).
"""
from __future__ import annotations

import dataclasses
import enum
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np
import yaml

from . import privacy
from .aggregate import AggregateConfig, erm_solve, sample_aggregate_run
from .data import (
    LOGLOGISTIC_DEFAULT,
    LOGNORMAL_DEFAULT,
    Dataset,
    default_wstar,
    gen_linear,
    gen_logistic,
    load_adult,
)
from .distributions import NoiseKind, NoiseSpec
from .errors import ConfigError
from .losses import ConstraintSet, LossKind, LossModel, empirical_risk
from .optimizers import (
    OptimizerConfig,
    RunRecord,
    convex_iterations,
    dpgd_known_mean,
    dpgd_known_variance,
    dpgd_stochastic,
    rgd_baseline,
    strongly_convex_iterations,
)
from .robust_mean import BetaMode, CatoniConfig

DEFAULT_EPS = (0.1, 0.5, 1.0)
DEFAULT_KAPPAS = (0.5, 1.0, 2.0, 5.0)
DEFAULT_D_VALUES = (10, 20, 30, 40, 50)
DEFAULT_N_VALUES = (20_000, 40_000, 60_000, 80_000, 100_000)
ADULT_RADIUS = 10.0


class Task(str, enum.Enum):
    RIDGE_SYNTHETIC = "ridge-synthetic"
    LOGISTIC_SYNTHETIC = "logistic-synthetic"
    RIDGE_ADULT = "ridge-adult"
    LOGISTIC_ADULT = "logistic-adult"

    @property
    def synthetic(self) -> bool:
        return self in (Task.RIDGE_SYNTHETIC, Task.LOGISTIC_SYNTHETIC)

    @property
    def loss(self) -> LossKind:
        return LossKind.RIDGE if self in (Task.RIDGE_SYNTHETIC, Task.RIDGE_ADULT) else LossKind.LOGISTIC


class Algorithm(str, enum.Enum):
    ALG3 = "alg3"
    ALG4 = "alg4"
    ALG4_STOCHASTIC = "alg4-stochastic"
    RGD = "rgd"
    RGD_STOCHASTIC = "rgd-stochastic"
    SAMPLE_AGGREGATE = "sample-aggregate"

    @property
    def stochastic(self) -> bool:
        return self in (Algorithm.ALG4_STOCHASTIC, Algorithm.RGD_STOCHASTIC)


@dataclass
class ExperimentSpec:
    task: Task = Task.RIDGE_SYNTHETIC
    algorithm: Algorithm = Algorithm.ALG4
    eps: list = field(default_factory=lambda: list(DEFAULT_EPS))
    delta: Optional[float] = None  # None means 1/n
    n: int = 100_000
    d: int = 10
    kappa: list = field(default_factory=lambda: list(DEFAULT_KAPPAS))
    repetitions: int = 10
    seed: int = 0
    output_dir: str = "results"
    adult_path: Optional[str] = None
    adult_train: int = 28_000
    adult_total: int = 30_000
    minibatch: int = 1000
    step: Optional[float] = None
    T: Optional[int] = None
    v: float = 5.0
    delta_prime: float = 0.01
    beta_mode: str = BetaMode.ALG4.value
    lam: float = 1e-3
    trim_fraction: float = 0.05
    radius: Optional[float] = None
    aggregate_m: int = 25
    d_values: list = field(default_factory=lambda: list(DEFAULT_D_VALUES))
    n_values: list = field(default_factory=lambda: list(DEFAULT_N_VALUES))
    jobs: int = 1

    def __post_init__(self):
        try:
            self.task = Task(self.task)
            self.algorithm = Algorithm(self.algorithm)
            BetaMode(self.beta_mode)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        self.eps = [float(e) for e in _as_list(self.eps)]
        self.kappa = [float(k) for k in _as_list(self.kappa)]
        self.d_values = [int(x) for x in _as_list(self.d_values)]
        self.n_values = [int(x) for x in _as_list(self.n_values)]
        cap = math.inf if self.algorithm is Algorithm.SAMPLE_AGGREGATE else 1.0
        if not self.eps or any(not 0 < e <= cap for e in self.eps):
            raise ConfigError(f"eps values must lie in (0, {cap}], got {self.eps}")
        if not 0 < self.trim_fraction < 0.5:
            raise ConfigError(f"trim_fraction must lie in (0, 0.5), got {self.trim_fraction}")
        if self.repetitions < 1:
            raise ConfigError("repetitions must be >= 1")
        if self.n < 2 or self.d < 1:
            raise ConfigError(f"need n >= 2 and d >= 1, got n={self.n}, d={self.d}")
        if self.delta is not None and not 0 < self.delta < 1:
            raise ConfigError(f"delta must lie in (0, 1), got {self.delta}")
        if any(k <= 0 for k in self.kappa):
            raise ConfigError("kappa values must be positive")
        if self.jobs < 1:
            raise ConfigError("jobs must be >= 1")

    def to_json(self) -> str:
        raw = dataclasses.asdict(self)
        raw["task"] = self.task.value
        raw["algorithm"] = self.algorithm.value
        raw.pop("jobs")  # scheduling only; never changes results
        return json.dumps(raw, sort_keys=True, separators=(",", ":"))

    def delta_for(self, n: int) -> float:
        return 1.0 / n if self.delta is None else self.delta


def _as_list(x):
    return list(x) if isinstance(x, (list, tuple)) else [x]


def spec_fields() -> set[str]:
    return {f.name for f in dataclasses.fields(ExperimentSpec)}


def load_spec(path) -> dict:
    """Spec values from a YAML/JSON config, or from the header of an output CSV."""
    text = Path(path).read_text()
    first = text.splitlines()[0] if text else ""
    if first.startswith("# spec: "):
        raw = json.loads(first[len("# spec: ") :])
    else:
        try:
            raw = yaml.safe_load(text) or {}
        except yaml.YAMLError as exc:
            raise ConfigError(f"cannot parse config {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"config {path} must be a mapping")
    raw = {k.replace("-", "_"): v for k, v in raw.items()}
    unknown = set(raw) - spec_fields()
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    return raw


# ---------------------------------------------------------------- problem setup


@dataclass
class Problem:
    train: Dataset
    eval: Dataset
    model: LossModel
    constraint: ConstraintSet
    reference_risk: float
    reference_w: Optional[np.ndarray]


def _noise_for(task: Task) -> NoiseSpec:
    return LOGNORMAL_DEFAULT if task.loss is LossKind.RIDGE else LOGLOGISTIC_DEFAULT


def _base_model(spec: ExperimentSpec) -> LossModel:
    return LossModel.ridge(spec.lam) if spec.task.loss is LossKind.RIDGE else LossModel.logistic()


def build_problem(spec: ExperimentSpec, n: int, d: int, rep: int, with_reference: bool = True) -> Problem:
    if spec.task.synthetic:
        wstar = default_wstar(d)
        rng = np.random.default_rng([spec.seed + rep, 0])
        gen = gen_linear if spec.task.loss is LossKind.RIDGE else gen_logistic
        data = gen(n, d, wstar, _noise_for(spec.task), rng)
        # radius 3|w*| keeps the ball {w : |w - w*| <= 2|w0 - w*|} inside for w0 = 0
        radius = spec.radius if spec.radius is not None else 3.0 * float(np.linalg.norm(wstar))
        train = evaluation = data
    else:
        if not spec.adult_path:
            raise ConfigError("Adult tasks need --adult-path")
        train, evaluation = load_adult(spec.adult_path, spec.adult_train, spec.adult_total)
        radius = spec.radius if spec.radius is not None else ADULT_RADIUS
    model = _base_model(spec).with_curvature(train.features)
    cset = ConstraintSet.ball(train.d, radius)
    ref_risk, ref_w = 0.0, None
    if with_reference and spec.task.synthetic:
        sol = erm_solve(train.features, train.labels, model, cset, tol=1e-7, max_iter=5000)
        ref_w = sol.w
        ref_risk = empirical_risk(model, sol.w, train.features, train.labels)
    return Problem(train, evaluation, model, cset, ref_risk, ref_w)


def default_step(alg: Algorithm) -> float:
    if alg is Algorithm.ALG3:
        return 0.01
    if alg.stochastic:
        return 1.0
    return 0.1


def default_iterations(spec: ExperimentSpec, problem: Problem, eps: float) -> int:
    if spec.T is not None:
        return spec.T
    n, d = problem.train.n, problem.train.d
    if spec.algorithm.stochastic:
        return math.ceil(n / min(spec.minibatch, n))
    model = problem.model
    if model.strong_convexity_alpha > 0 and model.smoothness_beta / model.strong_convexity_alpha <= 100:
        return strongly_convex_iterations(model, n)
    eps_tilde = privacy.eps_tilde_alg4(eps, spec.delta_for(n))
    return convex_iterations(problem.constraint.radius, n, eps_tilde, d)


def run_algorithm(spec: ExperimentSpec, problem: Problem, eps: float, kappa: Optional[float], rng) -> RunRecord:
    data = problem.train
    n, d = data.n, data.d
    T = default_iterations(spec, problem, eps)
    step = spec.step if spec.step is not None else default_step(spec.algorithm)
    budget = privacy.PrivacyBudget(eps, spec.delta_for(n), d, T)
    catoni = CatoniConfig(spec.v, spec.delta_prime, n, BetaMode(spec.beta_mode))
    alg = spec.algorithm
    if alg is Algorithm.ALG3:
        cfg = OptimizerConfig(
            T,
            problem.constraint,
            step,
            budget=budget,
            trim_m=math.ceil(round(spec.trim_fraction * n, 9)),
            mean_range=(-kappa / 2.0, kappa / 2.0),
        )
        return dpgd_known_mean(data, problem.model, cfg, rng)
    if alg.stochastic:
        cfg = OptimizerConfig(T, problem.constraint, step, budget=budget, catoni=catoni, minibatch=min(spec.minibatch, n))
        sigma = 0.0 if alg is Algorithm.RGD_STOCHASTIC else None
        return dpgd_stochastic(data, problem.model, cfg, rng, noise_sigma=sigma)
    cfg = OptimizerConfig(T, problem.constraint, step, budget=budget, catoni=catoni)
    if alg is Algorithm.RGD:
        return rgd_baseline(data, problem.model, cfg)
    if alg is Algorithm.ALG4:
        return dpgd_known_variance(data, problem.model, cfg, rng)
    raise ConfigError(f"{alg.value} has no iterative trajectory; use aggregate-demo")


def _kappas(spec: ExperimentSpec):
    return spec.kappa if spec.algorithm is Algorithm.ALG3 else [None]


def _algo_rng(spec: ExperimentSpec, rep: int, i_eps: int, i_kappa: int) -> np.random.Generator:
    return np.random.default_rng([spec.seed + rep, 1, i_eps, i_kappa])


# ---------------------------------------------------------------- jobs


def _curve_job(args):
    spec, rep = args
    problem = build_problem(spec, spec.n, spec.d, rep)
    out = {}
    for i, eps in enumerate(spec.eps):
        for k, kappa in enumerate(_kappas(spec)):
            rec = run_algorithm(spec, problem, eps, kappa, _algo_rng(spec, rep, i, k))
            if spec.task.synthetic:
                rec.evaluate(problem.model, problem.train, problem.reference_risk)
            else:
                rec.evaluate(problem.model, problem.eval, 0.0)
            out[(i, k)] = (rec.excess_risk, _privacy_summary(rec))
    return out


def sweep_metric(task: Task) -> str:
    # logistic labels encode sign(-<w*, x>), so w* is not the estimand there
    return "distance_to_wstar" if task.loss is LossKind.RIDGE else "excess_risk"


def _final_error_job(args):
    spec, rep, n, d = args
    ridge = spec.task.loss is LossKind.RIDGE
    problem = build_problem(spec, n, d, rep, with_reference=not ridge)
    out = {}
    for i, eps in enumerate(spec.eps):
        for k, kappa in enumerate(_kappas(spec)):
            rec = run_algorithm(spec, problem, eps, kappa, _algo_rng(spec, rep, i, k))
            if ridge:
                err = float(np.linalg.norm(rec.final - problem.train.w_star))
            else:
                err = empirical_risk(problem.model, rec.final, problem.train.features, problem.train.labels)
                err -= problem.reference_risk
            out[(i, k)] = (err, _privacy_summary(rec))
    return out


def _privacy_summary(rec: RunRecord) -> dict:
    keep = {}
    for key in ("eps_tilde", "per_query_eps", "sigma", "sensitivity", "total_rho", "eps_spent", "privacy"):
        if key in rec.privacy:
            keep[key] = rec.privacy[key]
    keep["T"] = rec.config["T"]
    return keep


def _map(fn, jobs: list, workers: int):
    if workers <= 1 or len(jobs) <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, jobs))


# ---------------------------------------------------------------- output


def _fmt(x) -> str:
    if x is None or x == "":
        return ""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".12g")


def _write_csv(path: Path, spec: ExperimentSpec, verb: str, header: list, rows: list, privacy_lines: list, metric: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [f"# spec: {spec.to_json()}", f"# verb: {verb}", f"# metric: {metric}"]
    lines += [f"# privacy: {json.dumps(p, sort_keys=True)}" for p in privacy_lines]
    lines.append(",".join(header))
    lines += [",".join(_fmt(v) for v in row) for row in rows]
    path.write_text("\n".join(lines) + "\n")
    _write_manifest(path.with_suffix(".manifest"), spec, verb, path, len(rows), privacy_lines, metric)
    return path


def _write_manifest(path: Path, spec, verb: str, csv_path: Path, nrows: int, privacy_lines: list, metric: str):
    raw = json.loads(spec.to_json())
    lines = [f"verb = {verb}", f"metric = {metric}", f"output = {csv_path.name}", f"rows = {nrows}"]
    lines += [f"spec.{k} = {json.dumps(raw[k])}" for k in sorted(raw)]
    for p in privacy_lines:
        tag = ".".join(f"{k}={p[k]}" for k in ("eps", "kappa", "d", "n") if p.get(k) is not None)
        lines += [f"privacy[{tag}].{k} = {json.dumps(p[k])}" for k in sorted(p) if k not in ("eps", "kappa", "d", "n")]
    path.write_text("\n".join(lines) + "\n")


def _output_path(spec: ExperimentSpec, verb: str) -> Path:
    return Path(spec.output_dir) / f"{verb}_{spec.task.value}_{spec.algorithm.value}.csv"


def _band(values) -> tuple[float, float, float]:
    arr = np.asarray(values, dtype=float)
    return float(np.median(arr, axis=0)), float(arr.min(axis=0)), float(arr.max(axis=0))


# ---------------------------------------------------------------- public verbs


def run_curve(spec: ExperimentSpec) -> Path:
    """Per-iteration metric bands (median, min, max) over repetitions."""
    if spec.algorithm is Algorithm.SAMPLE_AGGREGATE:
        raise ConfigError("sample-aggregate has no iteration curve; use aggregate-demo")
    results = _map(_curve_job, [(spec, r) for r in range(spec.repetitions)], spec.jobs)
    rows, priv = [], []
    for i, eps in enumerate(spec.eps):
        for k, kappa in enumerate(_kappas(spec)):
            curves = np.array([res[(i, k)][0] for res in results])
            med = np.median(curves, axis=0)
            lo, hi = curves.min(axis=0), curves.max(axis=0)
            for t in range(curves.shape[1]):
                rows.append([eps, kappa, t, med[t], lo[t], hi[t]])
            priv.append({"eps": eps, "kappa": kappa, **results[0][(i, k)][1]})
    header = ["eps", "kappa", "iteration", "metric_median", "metric_min", "metric_max"]
    metric = "excess_empirical_risk" if spec.task.synthetic else "test_risk"
    return _write_csv(_output_path(spec, "curve"), spec, "curve", header, rows, priv, metric)


def _sweep(spec: ExperimentSpec, verb: str, axis: str, grid: list) -> Path:
    if not spec.task.synthetic:
        raise ConfigError(f"{verb} needs a synthetic task with a known w*")
    if spec.algorithm is Algorithm.SAMPLE_AGGREGATE:
        raise ConfigError(f"{verb} does not support sample-aggregate")
    jobs = []
    for value in grid:
        n, d = (spec.n, value) if axis == "d" else (value, spec.d)
        jobs += [(spec, r, n, d) for r in range(spec.repetitions)]
    results = _map(_final_error_job, jobs, spec.jobs)
    rows, priv = [], []
    for g, value in enumerate(grid):
        block = results[g * spec.repetitions : (g + 1) * spec.repetitions]
        for i, eps in enumerate(spec.eps):
            for k, kappa in enumerate(_kappas(spec)):
                med, lo, hi = _band([res[(i, k)][0] for res in block])
                rows.append([value, eps, kappa, med, lo, hi])
                priv.append({axis: value, "eps": eps, "kappa": kappa, **block[0][(i, k)][1]})
    header = [axis, "eps", "kappa", "error_median", "error_min", "error_max"]
    return _write_csv(_output_path(spec, verb), spec, verb, header, rows, priv, sweep_metric(spec.task))


def sweep_dimension(spec: ExperimentSpec, d_values=None) -> Path:
    return _sweep(spec, "sweep-dim", "d", list(d_values or spec.d_values))


def sweep_samplesize(spec: ExperimentSpec, n_values=None) -> Path:
    return _sweep(spec, "sweep-n", "n", list(n_values or spec.n_values))


# light-tailed noise for the sample-aggregate desk check
AGGREGATE_NOISE = NoiseSpec(NoiseKind.LOGNORMAL, mu=0.0, sigma=0.25)


def aggregate_trial(spec: ExperimentSpec, rep: int, eps: float):
    """One paired draw: (|released - w*|, |full ERM - w*|, noise scale, smooth sensitivity)."""
    wstar = default_wstar(spec.d)
    data = gen_linear(spec.n, spec.d, wstar, AGGREGATE_NOISE, np.random.default_rng([spec.seed + rep, 0]))
    model = LossModel.ridge(spec.lam).with_curvature(data.features)
    radius = spec.radius if spec.radius is not None else 3.0 * float(np.linalg.norm(wstar))
    cset = ConstraintSet.ball(spec.d, radius)
    cfg = AggregateConfig(spec.aggregate_m, eps, spec.delta_for(spec.n))
    res = sample_aggregate_run(data, model, cset, cfg, np.random.default_rng([spec.seed + rep, 2]))
    full = erm_solve(data.features, data.labels, model, cset, cfg.erm_tolerance)
    return (
        float(np.linalg.norm(res.w - wstar)),
        float(np.linalg.norm(full.w - wstar)),
        res.noise_scale,
        res.smooth_sensitivity,
    )


def aggregate_demo(spec: ExperimentSpec) -> Path:
    rows = []
    for eps in spec.eps:
        for r in range(spec.repetitions):
            rows.append([eps, r, *aggregate_trial(spec, r, eps)])
    header = ["eps", "repetition", "output_error", "erm_error", "noise_scale", "smooth_sensitivity"]
    spec_out = dataclasses.replace(spec, algorithm=Algorithm.SAMPLE_AGGREGATE)
    return _write_csv(_output_path(spec_out, "aggregate-demo"), spec_out, "aggregate-demo", header, rows, [], "distance_to_wstar")
