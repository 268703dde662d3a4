import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from htdp.aggregate import (
    AggregateConfig,
    aggregate_select,
    erm_solve,
    max_multiplicity,
    neighbour_table,
    noise_calibrate,
    sample_aggregate_run,
    subsample_partition,
)
from htdp.data import Dataset, Provenance
from htdp.errors import ConfigError, DomainError, ResourceError
from htdp.losses import ConstraintSet, LossModel
from oracles import calibrate_loop, select_loop


def test_derived_quantities():
    cfg = AggregateConfig(25, 2.0, 1e-4)
    assert (cfg.s, cfg.t0) == (5, 16)
    assert cfg.gamma == pytest.approx(2.0 / (5 * math.sqrt(2 * math.log(2e4))))
    assert cfg.beta(2) == pytest.approx(2.0 / (4 * (2 + math.log(2e4))))
    assert cfg.top_count(2) == 25
    assert AggregateConfig(10, 1.0, 0.1).s == 3


def test_validation():
    with pytest.raises(ConfigError):
        AggregateConfig(0, 1.0, 0.1)
    with pytest.raises(ConfigError):
        AggregateConfig(25, 2.0, 1e-4).validate(10_000, 5)  # eps <= 2d / sqrt(m)
    with pytest.raises(ConfigError):
        AggregateConfig(25, 2.0, 1e-4).validate(20, 2)
    with pytest.warns(UserWarning):
        AggregateConfig(25, 2.0, 1e-4).validate(10_000, 2)
    with pytest.raises(ResourceError):
        AggregateConfig(20_000, 1.0, 1e-4).validate(10**6, 1)


def test_partition_single_subset():
    (only,) = subsample_partition(50, AggregateConfig(1, 1.0, 0.1), np.random.default_rng(0))
    np.testing.assert_array_equal(only, np.arange(50))


def test_partition_multiplicity_holds_whp():
    cfg = AggregateConfig(100, 1.0, 0.1)
    for seed in range(100):
        subsets = subsample_partition(10_000, cfg, np.random.default_rng(seed))
        assert len(subsets) == 100
        assert all(len(s) == 100 and len(np.unique(s)) == 100 for s in subsets)
        assert max_multiplicity(subsets, 10_000) <= 10


def test_partition_exhaustion_raises():
    # 4 subsets of size 1 from 5 points: some seed puts one point in 3 > sqrt(4) subsets
    cfg = AggregateConfig(4, 1.0, 0.1, max_resample_attempts=1)
    raised = 0
    for seed in range(60):
        try:
            subsample_partition(5, cfg, np.random.default_rng(seed))
        except ResourceError:
            raised += 1
    assert raised > 0


def test_erm_solve_matches_normal_equations(rng):
    X = rng.standard_normal((400, 3))
    y = X @ np.array([0.5, -0.2, 0.1]) + 0.1 * rng.standard_normal(400)
    model = LossModel.ridge(0.01)
    res = erm_solve(X, y, model, ConstraintSet.ball(3, 10.0), tol=1e-10)
    w = np.linalg.solve(X.T @ X / 400 + 0.01 * np.eye(3), X.T @ y / 400)
    assert res.converged
    np.testing.assert_allclose(res.w, w, atol=1e-9)
    again = erm_solve(X, y, model, ConstraintSet.ball(3, 10.0), tol=1e-10)
    assert np.array_equal(res.w, again.w)


def test_erm_solve_repeated_sample_and_cap():
    x = np.array([[1.0, 2.0]] * 5)
    y = x @ np.array([0.3, 0.4])
    res = erm_solve(x, y, LossModel.ridge(0.0), ConstraintSet.ball(2, 5.0), tol=1e-12)
    assert res.converged and np.sum((x @ res.w - y) ** 2) < 1e-20
    capped = erm_solve(np.random.default_rng(0).standard_normal((50, 2)), np.ones(50), LossModel.logistic(), ConstraintSet.ball(2, 5.0), tol=0.0, max_iter=3)
    assert not capped.converged and capped.iterations == 3
    with pytest.raises(DomainError):
        erm_solve(np.zeros((0, 2)), np.zeros(0), LossModel.ridge(), ConstraintSet.ball(2, 1.0))


def test_select_examples():
    cfg = AggregateConfig(16, 5.0, 0.1)
    idx, table = aggregate_select(np.ones((16, 2)), cfg)
    assert idx == 0 and np.all(table == 0)
    assert noise_calibrate(table, cfg, 2) == 0.0
    with pytest.raises(DomainError):
        aggregate_select(np.array([[0.0], [1.0], [2.0], [10.0]]), AggregateConfig(4, 5.0, 0.1))
    with pytest.raises(DomainError):
        aggregate_select(np.zeros((5, 2)), cfg)


def test_calibrate_single_k_and_errors(rng):
    cfg = AggregateConfig(25, 2.0, 1e-4)
    pts = rng.standard_normal((25, 2))
    table = neighbour_table(pts)
    # t0 + s = 21 <= 24 but t0 + 2s = 26 > 24: only k = 0
    top = cfg.top_count(2)
    rho = np.sort(table[:, 20])[-top:].mean()
    assert noise_calibrate(table, cfg, 2) == pytest.approx(2 * rho)
    with pytest.raises(DomainError):
        # m = 9: s = 3, t0 = 7, t0 + s = 10 > 8 neighbours
        noise_calibrate(neighbour_table(pts[:9]), AggregateConfig(9, 2.0, 1e-4), 2)


def instance(seed):
    r = np.random.default_rng(seed)
    m = int(r.integers(6, 65))
    d = int(r.integers(1, 4))
    pts = r.standard_normal((m, d)) * r.uniform(0.1, 10)
    if r.random() < 0.3:
        pts[: m // 2] = pts[0]  # force ties
    eps = float(r.uniform(0.5, 20))
    return pts, AggregateConfig(m, eps, float(r.uniform(1e-6, 0.1)))


def test_select_and_calibrate_match_brute_force():
    checked = 0
    for seed in range(100):
        pts, cfg = instance(seed)
        m, d = pts.shape
        if cfg.t0 + cfg.s > m - 1:
            continue
        idx, table = aggregate_select(pts, cfg)
        assert idx == select_loop(pts.tolist(), cfg.t0)
        expect = calibrate_loop(pts.tolist(), m, cfg.s, cfg.t0, cfg.beta(d), cfg.top_count(d))
        assert noise_calibrate(table, cfg, d) == pytest.approx(expect, rel=1e-12, abs=1e-15)
        checked += 1
    assert checked > 50


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6), st.floats(0.01, 100))
def test_permutation_covariance_and_scale_equivariance(seed, c):
    r = np.random.default_rng(seed)
    cfg = AggregateConfig(30, 5.0, 1e-3)
    pts = r.standard_normal((30, 2))
    idx, table = aggregate_select(pts, cfg)
    perm = r.permutation(30)
    idx_p, _ = aggregate_select(pts[perm], cfg)
    assert perm[idx_p] == idx
    s = noise_calibrate(table, cfg, 2)
    assert s > 0
    assert noise_calibrate(neighbour_table(c * pts), cfg, 2) == pytest.approx(c * s, rel=1e-10)


class ZeroNormal:
    def __init__(self):
        self._rng = np.random.default_rng(0)

    def choice(self, *a, **k):
        return self._rng.choice(*a, **k)

    def standard_normal(self, size=None):
        return np.zeros(size)


def test_run_noise_free_identical_solutions():
    X = np.tile(np.array([[1.0, 0.0], [0.0, 1.0]]), (500, 1))
    y = X @ np.array([0.4, -0.3])
    data = Dataset(X, y, Provenance.SYNTHETIC_LINEAR)
    cfg = AggregateConfig(25, 2.0, 1e-4, erm_tolerance=1e-12)
    model = LossModel.ridge(0.0).with_curvature(X)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        res = sample_aggregate_run(data, model, ConstraintSet.ball(2, 5.0), cfg, np.random.default_rng(1), add_noise=False)
        a = sample_aggregate_run(data, model, ConstraintSet.ball(2, 5.0), cfg, np.random.default_rng(2))
        b = sample_aggregate_run(data, model, ConstraintSet.ball(2, 5.0), cfg, np.random.default_rng(2))
    np.testing.assert_allclose(res.w, [0.4, -0.3], atol=1e-9)
    assert np.array_equal(a.w, b.w)
    assert a.smooth_sensitivity == pytest.approx(0.0, abs=1e-9)
