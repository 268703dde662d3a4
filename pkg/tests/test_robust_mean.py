import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from htdp.errors import ConfigError, DomainError
from htdp.robust_mean import (
    PHI_MAX,
    BetaMode,
    CatoniConfig,
    catoni_mean,
    catoni_sensitivity,
    correction_c,
    phi,
    private_mean,
    smoothed_phi,
)
from oracles import correction_quad, smoothed_phi_quad

CFG = CatoniConfig(v=5.0, delta_prime=0.01, n=10_000)


def test_phi_values():
    assert phi(0.0) == 0.0
    assert phi(1.0) == pytest.approx(5 / 6)
    assert phi(2.0) == pytest.approx(2 * math.sqrt(2) / 3)
    r2 = math.sqrt(2)
    assert phi(r2) == pytest.approx(PHI_MAX, abs=1e-15)
    assert phi(np.nextafter(r2, 3)) == PHI_MAX


@given(st.floats(-1e6, 1e6), st.floats(-1e6, 1e6))
def test_phi_odd_monotone_bounded(x, y):
    assert phi(-x) == -phi(x)
    assert abs(phi(x)) <= PHI_MAX
    lo, hi = sorted((x, y))
    assert phi(lo) <= phi(hi) + 1e-15


def test_config():
    assert CFG.scale == pytest.approx(73.6796, abs=1e-4)
    assert CFG.beta == pytest.approx(math.log(100))
    assert CatoniConfig(5, 0.01, 10, BetaMode.STANDALONE).beta == pytest.approx(2 * math.log(100))
    for bad in [dict(v=0), dict(delta_prime=1.0), dict(n=0)]:
        with pytest.raises(ConfigError):
            CatoniConfig(**{"v": 1.0, "delta_prime": 0.1, "n": 5, **bad})


def test_correction_examples():
    assert correction_c(0.0, 1.0) == pytest.approx(0.0, abs=1e-15)
    assert correction_c(1.0, 1e-9) == pytest.approx(0.0, abs=1e-12)
    assert correction_c(1.0, 1.0) == pytest.approx(correction_quad(1.0, 1.0), abs=1e-8)
    assert correction_c(1.0, 0.0) == 0.0
    # b = 0 limit outside the inner branch
    assert correction_c(3.0, 0.0) == pytest.approx(PHI_MAX - 3 + 4.5)
    with pytest.raises(DomainError):
        correction_c(1.0, -0.1)


@pytest.mark.parametrize("a", [-3.0, -1.5, -0.2, 0.7, 1.41, 2.5])
@pytest.mark.parametrize("b", [0.05, 0.5, 1.3, 3.0])
def test_correction_against_quadrature(a, b):
    assert correction_c(a, b) == pytest.approx(correction_quad(a, b), abs=1e-9)


@pytest.mark.parametrize("a", [4.5, 10.0, 1e3, 1e7, -25.0])
@pytest.mark.parametrize("b", [0.01, 0.3, 2.0])
def test_smoothed_phi_stable_far_from_origin(a, b):
    assert smoothed_phi(a, b) == pytest.approx(smoothed_phi_quad(a, b), abs=1e-10)
    assert abs(smoothed_phi(a, b)) <= PHI_MAX


def test_smoothed_phi_continuous_across_paths():
    a = np.array([np.nextafter(4.0, 0), 4.0, np.nextafter(4.0, 5)])
    vals = smoothed_phi(a, a / 2.0)
    assert np.ptp(vals) < 1e-12


def test_catoni_mean_examples():
    assert catoni_mean(np.zeros(7), CFG) == 0.0
    with pytest.raises(DomainError):
        catoni_mean(np.array([]), CFG)
    # beta -> infinity: a tiny delta' makes b negligible
    cfg = CatoniConfig(v=1.0, delta_prime=1e-300, n=1)
    x = 0.3 * cfg.scale
    s = cfg.scale
    assert catoni_mean([x], cfg) == pytest.approx(x - x**3 / (6 * s * s), rel=1e-2)


def test_catoni_mean_closed_form_identity(rng):
    x = rng.standard_normal(50) * 40
    s, beta = CFG.scale, CFG.beta
    n = x.size
    poly = np.mean(x * (1 - x**2 / (2 * s * s * beta)) - x**3 / (6 * s * s))
    corr = s / n * np.sum(correction_c(x / s, np.abs(x) / (s * math.sqrt(beta))))
    assert catoni_mean(x, CFG) == pytest.approx(poly + corr, abs=1e-12)


def test_catoni_mean_accuracy_on_heavy_tails():
    # Pareto(3) shifted to mean 1: variance 3/4, second moment well below v = 5
    rng = np.random.default_rng(7)
    n = 10_000
    bound = 5 * math.sqrt(5 * math.log(100) / n)
    hits = 0
    for _ in range(100):
        x = rng.pareto(3.0, n) + 1 - 0.5
        hits += abs(catoni_mean(x, CFG) - 1.0) <= bound
    assert hits >= 99


def test_sensitivity_values():
    cfg = CatoniConfig(v=2 * math.log(2) * 9, delta_prime=0.5, n=1)
    assert cfg.scale == pytest.approx(3.0)
    assert catoni_sensitivity(cfg) == pytest.approx(4 * math.sqrt(2))
    assert catoni_sensitivity(CFG) == pytest.approx(0.0138932, abs=1e-7)
    doubled = CatoniConfig(5.0, 0.01, 20_000)
    assert catoni_sensitivity(doubled) == pytest.approx(catoni_sensitivity(CFG) / math.sqrt(2))


@settings(max_examples=60, deadline=None)
@given(
    seed=st.integers(0, 2**31),
    outlier=st.sampled_from([1e9, -1e9, 0.0, 1e3, -57.3]),
    idx=st.integers(0, 19),
)
def test_one_sample_swap_respects_sensitivity(seed, outlier, idx):
    cfg = CatoniConfig(5.0, 0.01, 20)
    x = np.random.default_rng(seed).standard_t(3, 20) * 3
    y = x.copy()
    y[idx] = outlier
    assert abs(catoni_mean(x, cfg) - catoni_mean(y, cfg)) <= catoni_sensitivity(cfg) + 1e-12


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-1e12, 1e12), min_size=1, max_size=30))
def test_bounded_and_permutation_invariant(xs):
    cfg = CatoniConfig(5.0, 0.01, len(xs))
    val = catoni_mean(xs, cfg)
    assert abs(val) <= cfg.scale * PHI_MAX * (1 + 1e-12)
    assert catoni_mean(xs[::-1], cfg) == pytest.approx(val, abs=1e-12 * cfg.scale)


def test_columnwise_matches_per_column(rng):
    X = rng.standard_normal((200, 4)) * 10
    cfg = CatoniConfig(5.0, 0.01, 200)
    cols = [catoni_mean(X[:, j], cfg) for j in range(4)]
    np.testing.assert_allclose(catoni_mean(X, cfg, axis=0), cols, rtol=1e-14, atol=0)


def test_private_mean():
    x = np.random.default_rng(0).standard_normal(100)
    cfg = CatoniConfig(5.0, 0.01, 100)
    assert private_mean(x, cfg, 0.0, np.random.default_rng(1)) == catoni_mean(x, cfg)
    a = private_mean(x, cfg, 0.3, np.random.default_rng(9))
    assert a == private_mean(x, cfg, 0.3, np.random.default_rng(9))
    with pytest.raises(DomainError):
        private_mean(x, cfg, -1.0, np.random.default_rng(1))
    rng = np.random.default_rng(2)
    base = catoni_mean(x, cfg)
    draws = np.array([private_mean(x, cfg, 0.3, rng) for _ in range(10_000)]) - base
    assert draws.std() == pytest.approx(0.3, rel=0.05)
