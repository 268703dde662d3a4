"""Ridge and logistic losses, their per-sample gradients, and the L2-ball constraint."""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .errors import ConfigError, DomainError


class LossKind(str, enum.Enum):
    RIDGE = "ridge"
    LOGISTIC = "logistic"


@dataclass(frozen=True)
class ConstraintSet:
    """Closed Euclidean ball."""

    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float))
        if not self.radius > 0:
            raise ConfigError(f"radius must be positive, got {self.radius}")

    @classmethod
    def ball(cls, d: int, radius: float) -> "ConstraintSet":
        return cls(np.zeros(d), radius)

    @property
    def diameter(self) -> float:
        return 2.0 * self.radius

    def contains(self, w, atol: float = 1e-9) -> bool:
        return bool(np.linalg.norm(np.asarray(w) - self.center) <= self.radius + atol)


def project(w, cset: ConstraintSet):
    w = np.asarray(w, dtype=float)
    if w.shape[-1] != cset.center.shape[0]:
        raise DomainError(f"dimension mismatch: {w.shape[-1]} vs {cset.center.shape[0]}")
    diff = w - cset.center
    norm = np.linalg.norm(diff)
    if norm <= cset.radius:
        return w
    return cset.center + diff * (cset.radius / norm)


@dataclass(frozen=True)
class LossModel:
    kind: LossKind
    lam: float = 0.0
    smoothness_beta: float = 1.0
    strong_convexity_alpha: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "kind", LossKind(self.kind))
        if self.lam < 0:
            raise ConfigError(f"ridge lambda must be >= 0, got {self.lam}")
        if not self.smoothness_beta > 0:
            raise ConfigError("smoothness_beta must be positive")
        if self.strong_convexity_alpha < 0:
            raise ConfigError("strong_convexity_alpha must be >= 0")
        if self.kind is LossKind.LOGISTIC and self.lam != 0:
            raise ConfigError("logistic model takes no ridge penalty")
        if self.kind is LossKind.RIDGE and self.strong_convexity_alpha < 2 * self.lam - 1e-12:
            raise ConfigError("ridge strong convexity must be at least 2 * lambda")

    @classmethod
    def ridge(cls, lam: float = 1e-3, smoothness_beta: float = None, strong_convexity_alpha: float = None):
        beta = 2.0 + 2.0 * lam if smoothness_beta is None else smoothness_beta
        alpha = 2.0 * lam if strong_convexity_alpha is None else strong_convexity_alpha
        return cls(LossKind.RIDGE, lam, beta, alpha)

    @classmethod
    def logistic(cls, smoothness_beta: float = 0.25, strong_convexity_alpha: float = 0.0):
        return cls(LossKind.LOGISTIC, 0.0, smoothness_beta, strong_convexity_alpha)

    def with_curvature(self, features) -> "LossModel":
        """Copy with beta (and alpha for ridge) read off the empirical second moment."""
        beta, alpha = curvature(self, features)
        return LossModel(self.kind, self.lam, beta, alpha)


def curvature(model: LossModel, features) -> tuple[float, float]:
    """(smoothness, strong convexity) estimates from the feature second moment.

    Ridge: 2 eig(X^T X / n) + 2 lambda at the extremes. Logistic: the
    smoothness is lambda_max / 4 and no strong convexity is claimed.
    """
    X = np.asarray(features, dtype=float)
    eig = np.linalg.eigvalsh(X.T @ X / X.shape[0])
    if model.kind is LossKind.RIDGE:
        return 2.0 * eig[-1] + 2.0 * model.lam, 2.0 * max(eig[0], 0.0) + 2.0 * model.lam
    return eig[-1] / 4.0, 0.0


def _check_dims(w, X):
    if w.shape[-1] != X.shape[-1]:
        raise DomainError(f"dimension mismatch: w has {w.shape[-1]}, x has {X.shape[-1]}")


def loss_values(model: LossModel, w, X, y):
    """Per-sample losses, shape (n,)."""
    w = np.asarray(w, dtype=float)
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    _check_dims(w, X)
    z = X @ w
    if model.kind is LossKind.RIDGE:
        return (z - y) ** 2 + model.lam * (w @ w)
    return np.logaddexp(0.0, -y * z)


def grad_samples(model: LossModel, w, X, y):
    """Per-sample gradients, shape (n, d)."""
    w = np.asarray(w, dtype=float)
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    _check_dims(w, X)
    z = X @ w
    if model.kind is LossKind.RIDGE:
        return 2.0 * (z - y)[:, None] * X + 2.0 * model.lam * w
    # -y x / (1 + exp(y z)) = -y x * sigmoid(-y z)
    return (-y * expit(-y * z))[:, None] * X


def grad_sample(model: LossModel, w, x, y):
    return grad_samples(model, w, np.asarray(x)[None, :], [y])[0]


def empirical_risk(model: LossModel, w, X, y) -> float:
    if len(y) == 0:
        raise DomainError("empirical risk of an empty dataset")
    return float(loss_values(model, w, X, y).mean())


def empirical_risk_path(model: LossModel, W, X, y):
    """Empirical risk at each row of W, vectorised over iterates."""
    W = np.atleast_2d(np.asarray(W, dtype=float))
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    Z = X @ W.T
    if model.kind is LossKind.RIDGE:
        return ((Z - y[:, None]) ** 2).mean(axis=0) + model.lam * np.einsum("ij,ij->i", W, W)
    return np.logaddexp(0.0, -y[:, None] * Z).mean(axis=0)


def full_gradient(model: LossModel, w, X, y):
    """Gradient of the empirical risk without materialising per-sample rows."""
    w = np.asarray(w, dtype=float)
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    z = X @ w
    n = X.shape[0]
    if model.kind is LossKind.RIDGE:
        return 2.0 * X.T @ (z - y) / n + 2.0 * model.lam * w
    return X.T @ (-y * expit(-y * z)) / n
