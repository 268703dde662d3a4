"""Sample-and-aggregate release of an ERM minimiser.

m random subsets are solved independently, the solution whose t0-th
nearest neighbour is closest is chosen as the centre, and Gaussian noise
is scaled by a smooth upper bound on that choice's sensitivity.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from .data import Dataset
from .errors import ConfigError, DomainError, ResourceError
from .losses import ConstraintSet, LossModel, curvature, full_gradient, project


# the neighbour table is m x m doubles
MAX_SUBSETS = 10_000


@dataclass(frozen=True)
class AggregateConfig:
    m: int
    eps: float
    delta: float
    erm_tolerance: float = 1e-8
    # at m = 25, n = 10^4 only ~4% of draws satisfy the multiplicity cap
    max_resample_attempts: int = 1000
    erm_max_iter: int = 10_000

    def __post_init__(self):
        if self.m < 1:
            raise ConfigError(f"subset count m must be >= 1, got {self.m}")
        if not self.eps > 0 or not 0 < self.delta < 1:
            raise ConfigError(f"invalid privacy parameters eps={self.eps}, delta={self.delta}")
        if self.max_resample_attempts < 1:
            raise ConfigError("max_resample_attempts must be >= 1")

    @property
    def s(self) -> int:
        return math.isqrt(self.m)

    @property
    def gamma(self) -> float:
        return self.eps / (5.0 * math.sqrt(2.0 * math.log(2.0 / self.delta)))

    def beta(self, d: int) -> float:
        return self.eps / (4.0 * (d + math.log(2.0 / self.delta)))

    @property
    def t0(self) -> int:
        return (self.m + self.s) // 2 + 1

    def top_count(self, d: int) -> int:
        return min(self.m, math.ceil(self.s / self.beta(d)))

    def validate(self, n: int, d: int) -> None:
        if self.eps <= 2.0 * d / math.sqrt(self.m):
            raise ConfigError(f"need eps > 2d/sqrt(m) = {2.0 * d / math.sqrt(self.m):.4g}, got {self.eps}")
        if n < self.m:
            raise ConfigError(f"need n >= m, got n={n}, m={self.m}")
        if self.m > MAX_SUBSETS:
            raise ResourceError(f"m={self.m} exceeds {MAX_SUBSETS}; the m x m neighbour table would not fit in memory")
        if self.m < math.log(n) ** 2:
            warnings.warn(f"m={self.m} is below log^2 n = {math.log(n) ** 2:.1f}; accuracy guarantees are weak")


def subsample_partition(n: int, cfg: AggregateConfig, rng: np.random.Generator) -> list[np.ndarray]:
    """m index sets of size floor(n/m), each drawn without replacement.

    Redraws the whole family until no index appears in more than sqrt(m)
    sets.
    """
    if n < cfg.m:
        raise ConfigError(f"need n >= m, got n={n}, m={cfg.m}")
    size = n // cfg.m
    cap = math.sqrt(cfg.m)
    for _ in range(cfg.max_resample_attempts):
        subsets = [np.sort(rng.choice(n, size=size, replace=False)) for _ in range(cfg.m)]
        if max_multiplicity(subsets, n) <= cap:
            return subsets
    raise ResourceError(
        f"no valid subsampling after {cfg.max_resample_attempts} attempts; m={cfg.m} is too large for n={n}"
    )


def max_multiplicity(subsets, n: int) -> int:
    return int(np.bincount(np.concatenate(subsets), minlength=n).max())


@dataclass
class ErmResult:
    w: np.ndarray
    converged: bool
    iterations: int


def erm_solve(
    X, y, model: LossModel, cset: ConstraintSet, tol: float = 1e-8, max_iter: int = 10_000
) -> ErmResult:
    """Projected gradient descent on the empirical risk, step 1/beta.

    Stops when the gradient mapping norm |w - P(w - g/beta)| * beta drops
    below ``tol``; hitting ``max_iter`` returns the last iterate flagged
    as unconverged.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.shape[0] == 0:
        raise DomainError("erm_solve on an empty subset")
    beta, _ = curvature(model, X)
    step = 1.0 / max(beta, 1e-12)
    w = project(np.zeros(X.shape[1]) + cset.center, cset)
    for it in range(1, max_iter + 1):
        nxt = project(w - step * full_gradient(model, w, X, y), cset)
        gap = np.linalg.norm(nxt - w) / step
        w = nxt
        if gap <= tol:
            return ErmResult(w, True, it)
    return ErmResult(w, False, max_iter)


def neighbour_table(points) -> np.ndarray:
    """Row i holds sorted distances from point i to every other point; column t-1 is r_i(t)."""
    P = np.atleast_2d(np.asarray(points, dtype=float))
    dist = cdist(P, P)
    m = P.shape[0]
    off = ~np.eye(m, dtype=bool)
    return np.sort(dist[off].reshape(m, m - 1), axis=1)


def aggregate_select(points, cfg: AggregateConfig):
    """(i*, table) with i* = argmin_i r_i(t0), ties to the smallest index."""
    P = np.atleast_2d(np.asarray(points, dtype=float))
    m = P.shape[0]
    if m != cfg.m:
        raise DomainError(f"expected {cfg.m} points, got {m}")
    if cfg.t0 > m - 1:
        raise DomainError(f"t0={cfg.t0} exceeds the {m - 1} neighbours available")
    table = neighbour_table(P)
    return int(np.argmin(table[:, cfg.t0 - 1])), table


def noise_calibrate(table, cfg: AggregateConfig, d: int) -> float:
    """S = 2 max_k rho(t0 + (k+1) s) exp(-beta k) over valid k.

    rho(t) is the mean of the largest ceil(s / beta) values of r_i(t).
    """
    table = np.asarray(table, dtype=float)
    m, neighbours = table.shape
    s, t0 = cfg.s, cfg.t0
    if s < 1 or t0 + s > neighbours:
        raise DomainError(f"no valid k: t0 + s = {t0 + s} exceeds {neighbours} neighbours")
    beta = cfg.beta(d)
    top = cfg.top_count(d)
    best = 0.0
    k = 0
    while t0 + (k + 1) * s <= neighbours:
        col = table[:, t0 + (k + 1) * s - 1]
        rho = np.sort(col)[m - top :].mean()
        best = max(best, rho * math.exp(-beta * k))
        k += 1
    return 2.0 * best


@dataclass
class AggregateResult:
    w: np.ndarray
    center: np.ndarray
    index: int
    smooth_sensitivity: float
    noise_scale: float
    unconverged: int


def sample_aggregate_run(
    data: Dataset, model: LossModel, cset: ConstraintSet, cfg: AggregateConfig, rng=None, add_noise: bool = True
) -> AggregateResult:
    rng = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
    cfg.validate(data.n, data.d)
    subsets = subsample_partition(data.n, cfg, rng)
    sols = [erm_solve(data.features[i], data.labels[i], model, cset, cfg.erm_tolerance, cfg.erm_max_iter) for i in subsets]
    points = np.array([r.w for r in sols])
    idx, table = aggregate_select(points, cfg)
    sens = noise_calibrate(table, cfg, data.d)
    scale = sens / cfg.gamma
    center = points[idx]
    w = center + scale * rng.standard_normal(data.d) if add_noise else center.copy()
    return AggregateResult(w, center, idx, sens, scale, sum(not r.converged for r in sols))
