"""Catoni-type soft-truncation mean with Gaussian multiplicative smoothing.

Each sample x is rescaled by s, multiplied by (1 + eta) with
eta ~ N(0, 1/beta), passed through the bounded influence function ``phi``
and averaged back on the original scale. The expectation over eta has a
closed form: E phi(a + b g) = a (1 - b^2/2) - a^3/6 + C(a, b), g ~ N(0, 1).
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from .errors import ConfigError, DomainError

SQRT2 = math.sqrt(2.0)
PHI_MAX = 2.0 * SQRT2 / 3.0
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)

# above this |a| the polynomial + correction form loses digits to cancellation
_CLOSED_FORM_LIMIT = 4.0
# log-decay at which the inner-branch integrand is treated as zero
_TAIL_CUTOFF = 40.0
_V_CLIP = 60.0
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(64)


class BetaMode(str, enum.Enum):
    STANDALONE = "standalone"  # beta = 2 log(1/delta'), for the mean estimator on its own
    ALG4 = "alg4"  # beta = log(1/delta')


@dataclass(frozen=True)
class CatoniConfig:
    v: float
    delta_prime: float
    n: int
    beta_mode: BetaMode = BetaMode.ALG4

    def __post_init__(self):
        object.__setattr__(self, "beta_mode", BetaMode(self.beta_mode))
        if not self.v > 0:
            raise ConfigError(f"second-moment bound v must be positive, got {self.v}")
        if not 0 < self.delta_prime < 1:
            raise ConfigError(f"delta' must lie in (0, 1), got {self.delta_prime}")
        if int(self.n) < 1:
            raise ConfigError(f"n must be >= 1, got {self.n}")

    @property
    def log_inv_delta(self) -> float:
        return math.log(1.0 / self.delta_prime)

    @property
    def scale(self) -> float:
        """s = sqrt(n v / (2 log(1/delta')))."""
        return math.sqrt(self.n * self.v / (2.0 * self.log_inv_delta))

    @property
    def beta(self) -> float:
        if self.beta_mode is BetaMode.STANDALONE:
            return 2.0 * self.log_inv_delta
        return self.log_inv_delta


def phi(x):
    """Bounded influence function: x - x^3/6 on [-sqrt2, sqrt2], +-2sqrt2/3 outside."""
    x = np.asarray(x, dtype=float)
    inner = x - x**3 / 6.0
    return np.where(np.abs(x) <= SQRT2, inner, np.sign(x) * PHI_MAX)


def correction_c(a, b):
    """Closed-form correction C(a, b) as the sum of the five terms T1..T5.

    At b = 0 the value is the limit phi(a) - a + a^3/6, which is 0 when
    |a| <= sqrt2.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if np.any(b < 0):
        raise DomainError("correction_c requires b >= 0")
    a, b = np.broadcast_arrays(a, b)
    out = np.empty(a.shape)
    zero = b == 0
    if np.any(zero):
        az = a[zero]
        out[zero] = np.where(np.abs(az) <= SQRT2, 0.0, phi(az) - az + az**3 / 6.0)
    pos = ~zero
    if np.any(pos):
        ap, bp = a[pos], b[pos]
        # beyond |V| = 60 every F and E below is exactly 0 or 1 in double precision;
        # clipping keeps V^2 E finite when b is tiny
        with np.errstate(over="ignore"):
            v_minus = np.clip((SQRT2 - ap) / bp, -_V_CLIP, _V_CLIP)
            v_plus = np.clip((SQRT2 + ap) / bp, -_V_CLIP, _V_CLIP)
        f_minus = ndtr(-v_minus)
        f_plus = ndtr(-v_plus)
        e_minus = np.exp(-0.5 * v_minus**2)
        e_plus = np.exp(-0.5 * v_plus**2)
        t1 = PHI_MAX * (f_minus - f_plus)
        t2 = -(ap - ap**3 / 6.0) * (f_minus + f_plus)
        t3 = bp * _INV_SQRT_2PI * (1.0 - ap**2 / 2.0) * (e_plus - e_minus)
        t4 = 0.5 * ap * bp**2 * (
            f_plus + f_minus + _INV_SQRT_2PI * (v_plus * e_plus + v_minus * e_minus)
        )
        t5 = bp**3 * _INV_SQRT_2PI / 6.0 * (
            (2.0 + v_minus**2) * e_minus - (2.0 + v_plus**2) * e_plus
        )
        out[pos] = t1 + t2 + t3 + t4 + t5
    return out if out.ndim else float(out)


def _smoothed_phi_far(a, b):
    # a > _CLOSED_FORM_LIMIT here. Mass above sqrt2 contributes PHI_MAX * P,
    # mass below -sqrt2 contributes -PHI_MAX * P; the inner branch is
    # integrated from its upper edge g = v_minus downward, where the
    # Gaussian weight is largest, so nothing cancels.
    out = np.full(a.shape, PHI_MAX)
    pos = b > 0
    if not np.any(pos):
        return out
    ap, bp = a[pos], b[pos]
    v_minus = (SQRT2 - ap) / bp  # negative
    v_plus = (SQRT2 + ap) / bp
    tails = PHI_MAX * (ndtr(-v_minus) - ndtr(-v_plus))
    width = v_minus + v_plus
    reach = -v_minus + np.sqrt(v_minus**2 + 2.0 * _TAIL_CUTOFF)
    t_max = np.minimum(width, reach)
    t = 0.5 * t_max[:, None] * (_GL_NODES[None, :] + 1.0)
    u = SQRT2 - bp[:, None] * t
    integrand = (u - u**3 / 6.0) * np.exp(v_minus[:, None] * t - 0.5 * t**2)
    inner = 0.5 * t_max * (integrand @ _GL_WEIGHTS)
    inner *= _INV_SQRT_2PI * np.exp(-0.5 * v_minus**2)
    out[pos] = tails + inner
    return out


def smoothed_phi(a, b):
    """E phi(a + b g) for standard Gaussian g, stable for arbitrarily large |a|."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if np.any(b < 0):
        raise DomainError("smoothed_phi requires b >= 0")
    a, b = np.broadcast_arrays(a, b)
    sign = np.where(a < 0, -1.0, 1.0)
    mag = np.abs(a)
    out = np.empty(mag.shape)
    near = mag <= _CLOSED_FORM_LIMIT
    if np.any(near):
        an, bn = mag[near], b[near]
        out[near] = an * (1.0 - bn**2 / 2.0) - an**3 / 6.0 + correction_c(an, bn)
    if not np.all(near):
        out[~near] = _smoothed_phi_far(mag[~near], b[~near])
    out = sign * np.clip(out, -PHI_MAX, PHI_MAX)
    return out if out.ndim else float(out)


def catoni_terms(samples, cfg: CatoniConfig):
    """Per-sample smoothed contributions s * E_eta phi(x (1 + eta) / s)."""
    x = np.asarray(samples, dtype=float)
    s = cfg.scale
    a = x / s
    return s * smoothed_phi(a, np.abs(a) / math.sqrt(cfg.beta))


def catoni_mean(samples, cfg: CatoniConfig, axis=0):
    """Smoothed soft-truncation mean estimate along ``axis``.

    Equal to (1/n) sum [x (1 - x^2/(2 s^2 beta)) - x^3/(6 s^2)]
    + (s/n) sum C(x/s, |x|/(s sqrt(beta))), evaluated stably. The average
    is over the samples actually supplied; ``cfg.n`` sets the scale s.
    """
    x = np.asarray(samples, dtype=float)
    if x.size == 0 or x.shape[axis] == 0:
        raise DomainError("catoni_mean needs at least one sample")
    return catoni_terms(x, cfg).mean(axis=axis)


def catoni_sensitivity(cfg: CatoniConfig) -> float:
    """L2 sensitivity (s/n)(4 sqrt2 / 3) of the estimate to one replaced sample."""
    return cfg.scale / cfg.n * 2.0 * PHI_MAX


def private_mean(samples, cfg: CatoniConfig, noise_sigma: float, rng: np.random.Generator, axis=0):
    """catoni_mean plus N(0, noise_sigma^2); sigma comes from the privacy module."""
    if noise_sigma < 0:
        raise DomainError(f"noise_sigma must be >= 0, got {noise_sigma}")
    est = catoni_mean(samples, cfg, axis=axis)
    if noise_sigma == 0:
        return est
    return est + noise_sigma * rng.standard_normal(np.shape(est))
