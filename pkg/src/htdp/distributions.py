"""Heavy-tailed noise samplers and mechanism noise.

All samplers take a ``numpy.random.Generator`` and are pure functions of
(spec, generator state), so a fixed seed reproduces the stream exactly.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError


class NoiseKind(str, enum.Enum):
    LOGNORMAL = "lognormal"
    LOGLOGISTIC = "loglogistic"


@dataclass(frozen=True)
class NoiseSpec:
    kind: NoiseKind
    mu: float
    sigma: float

    def __post_init__(self):
        object.__setattr__(self, "kind", NoiseKind(self.kind))
        if not self.sigma > 0:
            raise ConfigError(f"noise sigma must be positive, got {self.sigma}")
        if self.kind is NoiseKind.LOGLOGISTIC and self.sigma >= 1:
            # mean is infinite for sigma >= 1, so the noise cannot be centred
            raise ConfigError(f"log-logistic sigma must be < 1, got {self.sigma}")

    @property
    def mean(self) -> float:
        """Closed-form mean of the positive (uncentred) variable."""
        if self.kind is NoiseKind.LOGNORMAL:
            return math.exp(self.mu + 0.5 * self.sigma**2)
        ps = math.pi * self.sigma
        return math.exp(self.mu) * ps / math.sin(ps)


def sample_lognormal(spec: NoiseSpec, rng: np.random.Generator, size=None):
    """Draw exp(mu + sigma * g) with g standard Gaussian."""
    if spec.kind is not NoiseKind.LOGNORMAL:
        raise ConfigError(f"expected a lognormal spec, got {spec.kind.value}")
    return np.exp(spec.mu + spec.sigma * rng.standard_normal(size))


def loglogistic_quantile(spec: NoiseSpec, u):
    """Inverse CDF of the log-logistic law with density e^z / (sigma x (1+e^z)^2)."""
    u = np.asarray(u, dtype=float)
    return np.exp(spec.mu + spec.sigma * (np.log(u) - np.log1p(-u)))


def sample_loglogistic(spec: NoiseSpec, rng: np.random.Generator, size=None):
    if spec.kind is not NoiseKind.LOGLOGISTIC:
        raise ConfigError(f"expected a log-logistic spec, got {spec.kind.value}")
    # rng.random returns k / 2**53; a half-step offset keeps u strictly inside (0, 1)
    u = rng.random(size) + 2.0**-54
    return loglogistic_quantile(spec, u)


def centered_noise(spec: NoiseSpec, rng: np.random.Generator, size=None):
    """Noise minus its closed-form mean, so it has exactly zero mean."""
    if spec.kind is NoiseKind.LOGNORMAL:
        raw = sample_lognormal(spec, rng, size)
    else:
        raw = sample_loglogistic(spec, rng, size)
    return raw - spec.mean


def sinh_gaussian(rng: np.random.Generator, size=None):
    """sinh(Y) for standard Gaussian Y (the arsinh-normal noise)."""
    return np.sinh(rng.standard_normal(size))
