"""Budget algebra for the two gradient methods.

Both optimizers run in zero-concentrated DP and convert to (eps, delta)
at the end: rho-zCDP implies (rho + 2 sqrt(rho log(1/delta)), delta)-DP.
Nothing here enforces a budget at runtime; the optimizers call these
once and the identities below are what the tests pin.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConfigError, DomainError


@dataclass(frozen=True)
class PrivacyBudget:
    eps: float
    delta: float
    d: int
    T: int

    def __post_init__(self):
        if not 0 < self.eps <= 1:
            raise ConfigError(f"eps must lie in (0, 1], got {self.eps}")
        if not 0 < self.delta < 1:
            raise ConfigError(f"delta must lie in (0, 1), got {self.delta}")
        if self.d < 1 or self.T < 0:
            raise ConfigError(f"need d >= 1 and T >= 0, got d={self.d}, T={self.T}")


def _log_inv(delta: float) -> float:
    if not 0 < delta < 1:
        raise DomainError(f"delta must lie in (0, 1), got {delta}")
    return math.log(1.0 / delta)


def zcdp_to_dp(rho: float, delta: float) -> float:
    if rho < 0:
        raise DomainError(f"rho must be >= 0, got {rho}")
    return rho + 2.0 * math.sqrt(rho * _log_inv(delta))


def eps_tilde_alg3(eps: float, delta: float) -> float:
    """Largest e with (e^2/2)-zCDP mapping to (eps, delta)-DP."""
    L = _log_inv(delta)
    # sqrt(2L + 2eps) - sqrt(2L), rationalised to avoid cancellation at small eps
    return 2.0 * eps / (math.sqrt(2.0 * L + 2.0 * eps) + math.sqrt(2.0 * L))


def eps_tilde_alg4(eps: float, delta: float) -> float:
    """Largest rho with rho-zCDP mapping to (eps, delta)-DP."""
    L = _log_inv(delta)
    root = eps / (math.sqrt(L + eps) + math.sqrt(L))
    return root * root


def per_query_eps_alg3(eps_tilde: float, d: int, T: int) -> float:
    if eps_tilde <= 0 or d < 1 or T < 1:
        raise DomainError("per_query_eps_alg3 needs positive inputs")
    return eps_tilde / math.sqrt(d * T)


def gaussian_sigma_alg4(v: float, d: int, T: int, delta_prime: float, n: int, eps_tilde: float) -> float:
    """sigma with sigma^2 = 8 v d T / (9 log(1/delta') n eps_tilde)."""
    if min(v, d, T, n, eps_tilde) <= 0:
        raise DomainError("gaussian_sigma_alg4 needs positive inputs")
    return math.sqrt(8.0 * v * d * T / (9.0 * _log_inv(delta_prime) * n * eps_tilde))


def gaussian_zcdp(sensitivity: float, sigma: float) -> float:
    """rho of one Gaussian release with the given L2 sensitivity."""
    return sensitivity**2 / (2.0 * sigma**2)
