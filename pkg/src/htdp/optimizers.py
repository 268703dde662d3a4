"""Private projected gradient descent for heavy-tailed losses.

dpgd_known_mean
    per-coordinate trimmed mean released through the arsinh-normal
    mechanism, budget split evenly over d coordinates and T steps.
dpgd_known_variance
    per-coordinate smoothed Catoni mean plus Gaussian noise.
dpgd_stochastic
    the same on uniformly drawn minibatches with a 1/sqrt(t) step and
    iterate averaging. Its privacy is heuristic: the full-batch
    calibration is reused unchanged and no amplification is claimed.
rgd_baseline
    dpgd_known_variance with the noise removed.
"""
from __future__ import annotations

import dataclasses
import enum
import math
import time
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import privacy
from .data import Dataset
from .errors import ConfigError, DomainError
from .losses import ConstraintSet, LossModel, empirical_risk_path, grad_samples, project
from .robust_mean import CatoniConfig, catoni_mean, catoni_sensitivity
from .trimmed import TrimConfig, arsinh_mechanism, trim_clamp

_IDENTITY_TOL = 1e-10


class Schedule(str, enum.Enum):
    CONSTANT = "constant"
    INV_SQRT = "inv_sqrt"


@dataclass
class OptimizerConfig:
    T: int
    constraint: ConstraintSet
    step: float = 0.1
    schedule: Schedule = Schedule.CONSTANT
    w0: Optional[np.ndarray] = None
    budget: Optional[privacy.PrivacyBudget] = None
    # known-mean method: trim count and the assumed range of every gradient coordinate mean
    trim_m: Optional[int] = None
    mean_range: Optional[tuple[float, float]] = None
    # known-variance method
    catoni: Optional[CatoniConfig] = None
    minibatch: Optional[int] = None

    def __post_init__(self):
        self.schedule = Schedule(self.schedule)
        if self.T < 0:
            raise ConfigError(f"T must be >= 0, got {self.T}")
        if not self.step > 0:
            raise ConfigError(f"step must be positive, got {self.step}")
        d = self.constraint.center.shape[0]
        self.w0 = np.zeros(d) if self.w0 is None else np.asarray(self.w0, dtype=float)
        if self.w0.shape != (d,):
            raise ConfigError(f"w0 must have shape ({d},), got {self.w0.shape}")
        if self.minibatch is not None and self.minibatch < 1:
            raise ConfigError(f"minibatch must be positive, got {self.minibatch}")

    def step_at(self, t: int) -> float:
        """Step used to produce iterate t (t >= 1)."""
        if self.schedule is Schedule.INV_SQRT:
            return self.step / math.sqrt(t)
        return self.step

    def snapshot(self) -> dict:
        out = {
            "T": self.T,
            "step": self.step,
            "schedule": self.schedule.value,
            "radius": self.constraint.radius,
            "minibatch": self.minibatch,
        }
        if self.budget is not None:
            out.update(eps=self.budget.eps, delta=self.budget.delta)
        if self.trim_m is not None:
            out.update(trim_m=self.trim_m, mean_range=list(self.mean_range))
        if self.catoni is not None:
            out.update(
                v=self.catoni.v,
                delta_prime=self.catoni.delta_prime,
                beta_mode=self.catoni.beta_mode.value,
                catoni_n=self.catoni.n,
            )
        return out


@dataclass
class RunRecord:
    iterates: np.ndarray
    config: dict
    seed: Optional[int]
    wall_clock: np.ndarray
    privacy: dict = field(default_factory=dict)
    averaged: Optional[np.ndarray] = None
    excess_risk: Optional[np.ndarray] = None
    distance: Optional[np.ndarray] = None

    @property
    def path(self) -> np.ndarray:
        """Reported trajectory: running averages when averaging is on."""
        return self.iterates if self.averaged is None else self.averaged

    @property
    def final(self) -> np.ndarray:
        return self.path[-1]

    def __len__(self) -> int:
        return self.iterates.shape[0]

    def evaluate(self, model: LossModel, data: Dataset, reference_risk: float = 0.0, w_star=None):
        """Fill per-iteration excess risk on ``data`` and distance to ``w_star``."""
        risks = empirical_risk_path(model, self.path, data.features, data.labels)
        self.excess_risk = risks - reference_risk
        if w_star is not None:
            self.distance = np.linalg.norm(self.path - np.asarray(w_star), axis=1)
        return self


def _as_rng(rng):
    if isinstance(rng, np.random.Generator):
        return rng, None
    if rng is None or isinstance(rng, (int, np.integer)):
        return np.random.default_rng(rng), None if rng is None else int(rng)
    # anything exposing standard_normal etc. (test doubles)
    return rng, None


def _descend(
    data: Dataset,
    cfg: OptimizerConfig,
    estimate: Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray],
    rng,
    batch: Optional[int] = None,
):
    d = data.d
    if cfg.constraint.center.shape[0] != d:
        raise DomainError(f"constraint dimension {cfg.constraint.center.shape[0]} != data dimension {d}")
    X, y = data.features, data.labels
    w = project(cfg.w0, cfg.constraint)
    iterates = np.empty((cfg.T + 1, d))
    iterates[0] = w
    clock = np.empty(cfg.T)
    for t in range(1, cfg.T + 1):
        tic = time.perf_counter()
        if batch is None:
            g = estimate(w, X, y)
        else:
            idx = rng.choice(data.n, size=batch, replace=False)
            g = estimate(w, X[idx], y[idx])
        w = project(w - cfg.step_at(t) * g, cfg.constraint)
        iterates[t] = w
        clock[t - 1] = time.perf_counter() - tic
    return iterates, clock


def _check_budget(cfg: OptimizerConfig, d: int):
    if cfg.budget is None:
        raise ConfigError("a private optimizer needs a PrivacyBudget")
    if cfg.budget.d != d or cfg.budget.T != cfg.T:
        raise ConfigError(
            f"budget was set up for d={cfg.budget.d}, T={cfg.budget.T}; run has d={d}, T={cfg.T}"
        )


def dpgd_known_mean(data: Dataset, model: LossModel, cfg: OptimizerConfig, rng=None, add_noise: bool = True) -> RunRecord:
    """Projected GD whose gradient coordinates are trimmed means released by the arsinh-normal mechanism."""
    rng, seed = _as_rng(rng)
    d = data.d
    _check_budget(cfg, d)
    if cfg.trim_m is None or cfg.mean_range is None:
        raise ConfigError("known-mean method needs trim_m and mean_range")
    a, b = cfg.mean_range
    eps_t = privacy.eps_tilde_alg3(cfg.budget.eps, cfg.budget.delta)
    info = {"eps_tilde": eps_t}
    if cfg.T > 0:
        per_query = privacy.per_query_eps_alg3(eps_t, d, cfg.T)
        trim = TrimConfig(cfg.trim_m, a, b, per_query)
        total_rho = d * cfg.T * 0.5 * per_query**2
        spent = privacy.zcdp_to_dp(total_rho, cfg.budget.delta)
        if abs(spent - cfg.budget.eps) > _IDENTITY_TOL * max(1.0, cfg.budget.eps):
            raise ConfigError(f"budget split does not compose back to eps: {spent} != {cfg.budget.eps}")
        if data.n <= 2 * trim.m:
            raise DomainError(f"need n > 2m, got n={data.n}, m={trim.m}")
        info.update(per_query_eps=per_query, total_rho=total_rho, eps_spent=spent)
    else:
        trim = None

    def estimate(w, X, y):
        G = grad_samples(model, w, X, y)
        if add_noise:
            return arsinh_mechanism(G, trim, rng)
        return trim_clamp(G, trim)

    iterates, clock = _descend(data, cfg, estimate, rng)
    return RunRecord(iterates, cfg.snapshot() | {"algorithm": "alg3"}, seed, clock, info)


def _variance_calibration(cfg: OptimizerConfig, d: int) -> dict:
    catoni = cfg.catoni
    eps_t = privacy.eps_tilde_alg4(cfg.budget.eps, cfg.budget.delta)
    info = {"eps_tilde": eps_t, "catoni_scale": catoni.scale, "catoni_beta": catoni.beta}
    if cfg.T == 0:
        info["sigma"] = 0.0
        return info
    sigma = privacy.gaussian_sigma_alg4(catoni.v, d, cfg.T, catoni.delta_prime, catoni.n, eps_t)
    sens = catoni_sensitivity(catoni)
    total_rho = d * cfg.T * privacy.gaussian_zcdp(sens, sigma)
    spent = privacy.zcdp_to_dp(total_rho, cfg.budget.delta)
    if abs(total_rho - eps_t) > _IDENTITY_TOL * max(1.0, eps_t) or abs(spent - cfg.budget.eps) > _IDENTITY_TOL:
        raise ConfigError(f"Gaussian calibration does not compose back to eps: {spent} != {cfg.budget.eps}")
    info.update(sigma=sigma, sensitivity=sens, total_rho=total_rho, eps_spent=spent)
    return info


def _robust_estimator(model, catoni, sigma, rng):
    def estimate(w, X, y):
        g = catoni_mean(grad_samples(model, w, X, y), catoni, axis=0)
        if sigma > 0:
            g = g + sigma * rng.standard_normal(g.shape[0])
        return g

    return estimate


def dpgd_known_variance(
    data: Dataset, model: LossModel, cfg: OptimizerConfig, rng=None, noise_sigma: Optional[float] = None
) -> RunRecord:
    """Projected GD on the per-coordinate smoothed Catoni gradient plus Gaussian noise.

    ``noise_sigma`` overrides the calibrated sigma (0 gives the robust,
    non-private baseline).
    """
    rng, seed = _as_rng(rng)
    if cfg.catoni is None:
        raise ConfigError("known-variance method needs a CatoniConfig")
    if noise_sigma is None:
        _check_budget(cfg, data.d)
        info = _variance_calibration(cfg, data.d)
        sigma = info["sigma"]
    else:
        sigma = float(noise_sigma)
        info = {"sigma": sigma, "catoni_scale": cfg.catoni.scale, "catoni_beta": cfg.catoni.beta}
    estimate = _robust_estimator(model, cfg.catoni, sigma, rng)
    iterates, clock = _descend(data, cfg, estimate, rng)
    name = "alg4" if noise_sigma is None else "rgd"
    return RunRecord(iterates, cfg.snapshot() | {"algorithm": name}, seed, clock, info)


def rgd_baseline(data: Dataset, model: LossModel, cfg: OptimizerConfig) -> RunRecord:
    return dpgd_known_variance(data, model, cfg, rng=None, noise_sigma=0.0)


def dpgd_stochastic(
    data: Dataset, model: LossModel, cfg: OptimizerConfig, rng=None, noise_sigma: Optional[float] = None
) -> RunRecord:
    """Minibatch variant with a step/sqrt(t) schedule and running iterate averages."""
    rng, seed = _as_rng(rng)
    if cfg.minibatch is None:
        raise ConfigError("stochastic variant needs a minibatch size")
    if cfg.minibatch > data.n:
        raise DomainError(f"minibatch {cfg.minibatch} exceeds n={data.n}")
    if cfg.catoni is None:
        raise ConfigError("stochastic variant needs a CatoniConfig")
    cfg = dataclasses.replace(cfg, schedule=Schedule.INV_SQRT)
    if noise_sigma is None:
        _check_budget(cfg, data.d)
        info = _variance_calibration(cfg, data.d)
        sigma = info["sigma"]
        info["privacy"] = "heuristic"
    else:
        sigma = float(noise_sigma)
        info = {"sigma": sigma, "catoni_scale": cfg.catoni.scale, "catoni_beta": cfg.catoni.beta}
    estimate = _robust_estimator(model, cfg.catoni, sigma, rng)
    iterates, clock = _descend(data, cfg, estimate, rng, batch=cfg.minibatch)
    averaged = iterates.copy()
    if cfg.T > 0:
        counts = np.arange(1, cfg.T + 1)[:, None]
        averaged[1:] = np.cumsum(iterates[1:], axis=0) / counts
    name = "alg4_stochastic" if noise_sigma is None else "rgd_stochastic"
    return RunRecord(iterates, cfg.snapshot() | {"algorithm": name}, seed, clock, info, averaged=averaged)


def strongly_convex_iterations(model: LossModel, n: int) -> int:
    """T = ceil((beta / alpha) log n)."""
    if model.strong_convexity_alpha <= 0:
        raise ConfigError("strongly convex schedule needs alpha > 0")
    return max(1, math.ceil(model.smoothness_beta / model.strong_convexity_alpha * math.log(n)))


def convex_iterations(radius: float, n: int, eps_tilde: float, d: int) -> int:
    """T = ceil((R sqrt(n eps_tilde) / d)^(2/3)), with the set radius R standing in for |w0 - w*|."""
    return max(1, math.ceil((radius * math.sqrt(n * eps_tilde) / d) ** (2.0 / 3.0)))
