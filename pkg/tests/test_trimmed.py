import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from htdp.errors import ConfigError, DomainError
from htdp.trimmed import TrimConfig, arsinh_mechanism, clamp, smooth_sens_bound, trim_clamp, trimmed_mean
from oracles import trim_clamp_loop

DATA = np.array([5.0, 1.0, 3.0, 2.0, 4.0])


class ZeroNormal:
    def standard_normal(self, size=None):
        return np.zeros(size) if size is not None else 0.0


def test_config():
    cfg = TrimConfig(1, 0.0, 10.0, 0.4)
    assert cfg.t == pytest.approx(0.01)
    assert cfg.release_scale == pytest.approx(0.1)
    with pytest.raises(ConfigError):
        TrimConfig(1, 1.0, 1.0, 0.4)
    with pytest.raises(ConfigError):
        TrimConfig(1, 0.0, 1.0, 0.0)


def test_trim_clamp_examples():
    assert trim_clamp(DATA, TrimConfig(1, 0, 10, 1)) == pytest.approx(3.0)
    assert trim_clamp(DATA, TrimConfig(1, 0, 2, 1)) == 2.0
    assert trim_clamp(np.full(9, 0.7), TrimConfig(3, 0, 1, 1)) == pytest.approx(0.7)
    with pytest.raises(DomainError):
        trim_clamp(DATA, TrimConfig(3, 0, 10, 1))
    with pytest.raises(DomainError):
        trimmed_mean(np.ones(4), 2)


def test_smooth_sens_examples():
    cfg = TrimConfig(1, 0.0, 10.0, 0.4)
    assert smooth_sens_bound(DATA, cfg) == pytest.approx(10 * math.exp(-0.01))
    assert smooth_sens_bound(DATA, cfg) == pytest.approx(9.90050, abs=1e-5)
    # m t = 20 with b - a = 1
    cfg = TrimConfig(20, 0.0, 1.0, 4.0)
    assert cfg.m * cfg.t == pytest.approx(20)
    assert smooth_sens_bound(np.full(50, 0.3), cfg) == pytest.approx(2.061e-9, rel=1e-3)
    # range branch wins when the floor is small
    assert smooth_sens_bound(DATA, TrimConfig(1, 0.0, 1.0, 40.0)) == pytest.approx(4 / 3)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-100, 100), min_size=5, max_size=40), st.floats(0, 1000))
def test_smooth_sens_monotone_in_range(xs, widen):
    cfg = TrimConfig(2, -1.0, 1.0, 0.5)
    x = np.array(xs)
    y = x.copy()
    y[np.argmax(y)] += widen
    assert smooth_sens_bound(y, cfg) >= smooth_sens_bound(x, cfg)


def test_trim_clamp_matches_loop_oracle():
    rng = np.random.default_rng(0)
    for _ in range(300):
        n = int(rng.integers(3, 200))
        m = int(rng.integers(0, (n - 1) // 2 + 1))
        x = rng.standard_t(2, n) * 3
        a = float(rng.uniform(-2, 0))
        b = a + float(rng.uniform(0.1, 4))
        assert trim_clamp(x, TrimConfig(m, a, b, 1.0)) == pytest.approx(trim_clamp_loop(list(x), m, a, b), abs=1e-12)


def test_columns_are_independent_datasets(rng):
    X = rng.standard_normal((101, 3))
    cfg = TrimConfig(5, -0.5, 0.5, 1.0)
    expect = [trim_clamp(X[:, j], cfg) for j in range(3)]
    np.testing.assert_allclose(trim_clamp(X, cfg), expect, rtol=0, atol=1e-15)


@given(st.floats(-1e6, 1e6), st.floats(-5, 5), st.floats(0.01, 5))
def test_clamp_reduces_error(x, a, width):
    b = a + width
    mu = (a + b) / 2
    assert abs(clamp(x, a, b) - mu) <= abs(x - mu)


def test_arsinh_zero_noise_and_determinism():
    cfg = TrimConfig(1, 0, 10, 0.5)
    assert arsinh_mechanism(DATA, cfg, ZeroNormal()) == trim_clamp(DATA, cfg)
    a = arsinh_mechanism(DATA, cfg, np.random.default_rng(3))
    assert a == arsinh_mechanism(DATA, cfg, np.random.default_rng(3))


def test_arsinh_noise_is_centred():
    cfg = TrimConfig(1, 0, 10, 2.0)
    rng = np.random.default_rng(5)
    base = trim_clamp(DATA, cfg)
    out = np.array([arsinh_mechanism(DATA, cfg, rng) for _ in range(10_000)]) - base
    scale = smooth_sens_bound(DATA, cfg) / cfg.release_scale
    assert abs(np.median(out)) < 0.05 * scale


def test_trimmed_error_bound_worst_case():
    # |Trim_m - mu| <= (n t' + m s') / (n - 2m), with t' the mean deviation and s' the max deviation
    rng = np.random.default_rng(11)
    for _ in range(500):
        n = int(rng.integers(3, 21))
        m = int(rng.integers(0, (n - 1) // 2 + 1))
        mu = float(rng.normal())
        x = mu + rng.laplace(size=n)
        if rng.random() < 0.5:
            x[: m + 1] = mu + rng.choice([-1, 1]) * 50  # push outliers to one side
        t_dev = abs(x.mean() - mu)
        s_dev = np.max(np.abs(x - mu))
        assert abs(trimmed_mean(x, m) - mu) <= (n * t_dev + m * s_dev) / (n - 2 * m) + 1e-12
