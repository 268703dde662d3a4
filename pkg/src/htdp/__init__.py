"""Differentially private convex optimisation for heavy-tailed data."""
from .aggregate import AggregateConfig, sample_aggregate_run
from .data import Dataset, gen_linear, gen_logistic, load_adult
from .distributions import NoiseKind, NoiseSpec
from .errors import ConfigError, DataError, DomainError, ResourceError
from .losses import ConstraintSet, LossModel
from .optimizers import OptimizerConfig, RunRecord, dpgd_known_mean, dpgd_known_variance, dpgd_stochastic, rgd_baseline
from .privacy import PrivacyBudget
from .robust_mean import CatoniConfig, catoni_mean, catoni_sensitivity, private_mean
from .trimmed import TrimConfig, arsinh_mechanism

__all__ = [
    "AggregateConfig",
    "CatoniConfig",
    "ConfigError",
    "ConstraintSet",
    "DataError",
    "Dataset",
    "DomainError",
    "LossModel",
    "NoiseKind",
    "NoiseSpec",
    "OptimizerConfig",
    "PrivacyBudget",
    "ResourceError",
    "RunRecord",
    "TrimConfig",
    "arsinh_mechanism",
    "catoni_mean",
    "catoni_sensitivity",
    "dpgd_known_mean",
    "dpgd_known_variance",
    "dpgd_stochastic",
    "gen_linear",
    "gen_logistic",
    "load_adult",
    "private_mean",
    "rgd_baseline",
    "sample_aggregate_run",
]
