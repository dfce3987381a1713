from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dynerg.edge_process import (
    EdgeDynamics,
    Trajectory,
    assumption2_constant,
    covariance,
    double_switch_probability,
    limit_functions,
    sample_flips,
    sample_trajectory,
    stationary_probability,
    switch_probability,
)
from dynerg.scaling import ScalingRegime

DENSE = EdgeDynamics(1.0, 1.0, ScalingRegime.constant_one(), 1.0)
SPARSE = EdgeDynamics(1.0, 1.0, ScalingRegime.power_law("1/2"), 1.0)
times = st.floats(0.0, 1.0, allow_nan=False)


def test_stationary_probability_dense():
    assert stationary_probability(DENSE, 10) == 0.5
    assert covariance(DENSE, 10, 0.3, 0.3) == pytest.approx(0.25)


def test_sparse_limits():
    # kappa_N / rho_N -> (lambda_off / lambda_on) exp(-lambda_on |s-t|)
    dyn = EdgeDynamics(2.0, 0.5, ScalingRegime.power_law("1/2"), 1.0)
    N = 10**6
    rho = dyn.regime.rho(N)
    p_star, kappa_star = limit_functions(dyn)
    assert p_star == 0.25
    assert stationary_probability(dyn, N) / rho == pytest.approx(p_star, rel=1e-3)
    for s, t in [(0, 0), (0.2, 0.7), (1, 0)]:
        assert covariance(dyn, N, s, t) / rho == pytest.approx(kappa_star(s, t), rel=1e-3)


def test_dense_limit_uses_exact_moments():
    p_star, kappa_star = limit_functions(DENSE)
    assert p_star == 0.5
    assert kappa_star(0, 0.5) == pytest.approx(covariance(DENSE, 7, 0, 0.5))


def test_assumption2_constant():
    assert assumption2_constant(SPARSE) == pytest.approx((1 + 2) * 1 * math.e)
    assert assumption2_constant(DENSE) == pytest.approx(2.5 * math.e)


@given(times, times, st.sampled_from([10, 100, 1000]))
def test_single_switch_bound(r, s, N):
    r, s = min(r, s), max(r, s)
    C = assumption2_constant(SPARSE)
    assert switch_probability(SPARSE, N, r, s) <= C * SPARSE.regime.rho(N) * (s - r) + 1e-15


@given(times, times, times, st.sampled_from([10, 100, 1000]))
def test_double_switch_bound(r, s, t, N):
    r, s, t = sorted((r, s, t))
    C = assumption2_constant(SPARSE)
    assert double_switch_probability(SPARSE, N, r, s, t) <= C * SPARSE.regime.rho(N) * (t - r) ** 2 + 1e-15


def test_lipschitz_bound_trivial():
    # p_N does not depend on time, so |p_N(s) - p_N(r)| = 0
    assert stationary_probability(SPARSE, 50) - stationary_probability(SPARSE, 50) == 0


def test_trajectory_validation():
    with pytest.raises(ValueError):
        Trajectory(0, np.array([0.5, 0.2]))
    with pytest.raises(ValueError):
        Trajectory(1, np.array([0.0, 0.2]))
    tr = Trajectory(1, np.array([0.25, 0.5]))
    assert tr.state_at(0.0) == 1
    assert tr.state_at(0.25) == 0  # right-continuous
    assert tr.state_at(0.6) == 1


def test_sample_trajectory_properties(rng):
    for _ in range(50):
        tr = sample_trajectory(DENSE, 10, rng)
        assert np.all(np.diff(tr.flip_times) > 0)
        assert np.all((tr.flip_times > 0) & (tr.flip_times <= 1.0))


def test_sampling_is_deterministic():
    a = sample_flips(SPARSE, 50, 100, np.random.default_rng(3))
    b = sample_flips(SPARSE, 50, 100, np.random.default_rng(3))
    assert np.array_equal(a.initial_states, b.initial_states)
    assert np.array_equal(a.times, b.times)


def test_initial_state_frequency(rng):
    n = 10**5
    p = stationary_probability(SPARSE, 100)
    batch = sample_flips(SPARSE, 100, n, rng)
    se = math.sqrt(p * (1 - p) / n)
    assert abs(batch.initial_states.mean() - p) < 4 * se


def test_stationarity_on_grid(rng):
    n = 10**5
    dyn = EdgeDynamics(2.0, 1.0, ScalingRegime.power_law("3/10"), 1.0)
    p = stationary_probability(dyn, 100)
    batch = sample_flips(dyn, 100, n, rng)
    se = math.sqrt(p * (1 - p) / n)
    for t in (0.0, 0.25, 0.5, 0.75, 1.0):
        assert abs(batch.states_at(t).mean() - p) < 4 * se


def test_covariance_monte_carlo(rng):
    # 10^6 trajectory pairs of the same edge at two times
    n = 10**6
    s, t = 0.2, 0.9
    batch = sample_flips(SPARSE, 100, n, rng)
    a, b = batch.states_at(s).astype(float), batch.states_at(t).astype(float)
    emp = np.mean(a * b) - a.mean() * b.mean()
    exact = covariance(SPARSE, 100, s, t)
    # Var(a b) <= E[a b] <= p bounds the standard error of the product mean
    se = math.sqrt(stationary_probability(SPARSE, 100) / n)
    assert abs(emp - exact) < 4 * se


def test_switch_frequencies_monte_carlo(rng):
    n = 10**6
    N = 100
    r, s, t = 0.1, 0.4, 0.8
    batch = sample_flips(SPARSE, N, n, rng)
    a_r, a_s, a_t = batch.states_at(r), batch.states_at(s), batch.states_at(t)
    single = np.mean(a_r != a_s)
    double = np.mean((a_r != a_s) & (a_s != a_t))
    for freq, exact in ((single, switch_probability(SPARSE, N, r, s)),
                        (double, double_switch_probability(SPARSE, N, r, s, t))):
        assert abs(freq - exact) < 4 * math.sqrt(exact * (1 - exact) / n)
