"""Trimmed, clamped mean released with arsinh-normal noise.

Smooth-sensitivity instance for the trimmed mean: sort, drop ``m`` values
per side, average, clamp to the known mean range [a, b], then add
(4/eps) * S * sinh(Y). The release is (eps^2 / 2)-zCDP; that guarantee is
inherited from the mechanism's analysis, not checked empirically here.

Every function accepts a 1-D sample vector or an (n, d) matrix, in which
case each column is treated as an independent dataset.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .distributions import sinh_gaussian
from .errors import ConfigError, DomainError


@dataclass(frozen=True)
class TrimConfig:
    m: int
    a: float
    b: float
    eps: float

    def __post_init__(self):
        if int(self.m) < 0:
            raise ConfigError(f"trim count m must be >= 0, got {self.m}")
        if not self.a < self.b:
            raise ConfigError(f"mean range needs a < b, got [{self.a}, {self.b}]")
        if not self.eps > 0:
            raise ConfigError(f"eps must be positive, got {self.eps}")

    @property
    def t(self) -> float:
        return self.eps**2 / 16.0

    @property
    def release_scale(self) -> float:
        return self.eps / 4.0


def _check_size(x: np.ndarray, m: int) -> int:
    n = x.shape[0]
    if n <= 2 * m:
        raise DomainError(f"need n > 2m, got n={n}, m={m}")
    return n


def clamp(x, a: float, b: float):
    return np.clip(x, a, b)


def trimmed_mean(samples, m: int):
    """Mean of the order statistics m+1 .. n-m along axis 0."""
    x = np.asarray(samples, dtype=float)
    n = _check_size(x, m)
    if m == 0:
        return x.mean(axis=0)
    part = np.partition(x, (m, n - m - 1), axis=0)
    return part[m : n - m].mean(axis=0)


def trim_clamp(samples, cfg: TrimConfig):
    return clamp(trimmed_mean(samples, cfg.m), cfg.a, cfg.b)


def smooth_sens_bound(samples, cfg: TrimConfig):
    """max{(x_(n) - x_(1)) / (n - 2m), exp(-m t) (b - a)}."""
    x = np.asarray(samples, dtype=float)
    n = _check_size(x, cfg.m)
    spread = (x.max(axis=0) - x.min(axis=0)) / (n - 2 * cfg.m)
    floor = math.exp(-cfg.m * cfg.t) * (cfg.b - cfg.a)
    return np.maximum(spread, floor)


def arsinh_mechanism(samples, cfg: TrimConfig, rng: np.random.Generator):
    x = np.asarray(samples, dtype=float)
    centre = trim_clamp(x, cfg)
    sens = smooth_sens_bound(x, cfg)
    z = sinh_gaussian(rng, np.shape(centre))
    return centre + sens * z / cfg.release_scale
