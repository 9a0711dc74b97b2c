import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from renewplan import (
    RandomVariable,
    sample,
    sample_pair,
    upper_quantile_mc,
    z_epsilon_oracle,
)
from renewplan.errors import InfeasibleError, InputError, ParameterError
from renewplan.stochastic import (
    CHUNK_SIZE,
    _chunk_rng,
    _draw,
    _uniform_ratio_tail,
    constraint_ratio_samples,
)
from conftest import GOLDEN_Z_L2700


# --- sampling -------------------------------------------------------------

def test_constant_samples():
    batch = sample(RandomVariable.constant(5.0), seed=11, n=3)
    assert batch.values.tolist() == [5.0, 5.0, 5.0]
    assert batch.count == 3


def test_uniform_mean_law_of_large_numbers():
    batch = sample(RandomVariable.uniform(0.0, 1.0), seed=42, n=10**6)
    assert abs(batch.values.mean() - 0.5) < 0.002


def test_empirical_single_atom():
    batch = sample(RandomVariable.empirical([2.0]), seed=7, n=4)
    assert batch.values.tolist() == [2.0, 2.0, 2.0, 2.0]


def test_empirical_resamples_only_observed_values():
    rv = RandomVariable.empirical([1.0, 3.0, 9.0])
    batch = sample(rv, seed=3, n=1000)
    assert set(batch.values.tolist()) <= {1.0, 3.0, 9.0}


def test_sampling_deterministic():
    rv = RandomVariable.uniform(-2.0, 5.0)
    a = sample(rv, seed=123, n=5000).values
    b = sample(rv, seed=123, n=5000).values
    assert np.array_equal(a, b)
    c = sample(rv, seed=124, n=5000).values
    assert not np.array_equal(a, c)


def test_chunks_are_order_independent():
    # Evaluating the substreams out of order must reproduce the same batch.
    rv = RandomVariable.uniform(0.0, 1.0)
    n = CHUNK_SIZE + 12345
    full = sample(rv, seed=9, n=n).values
    tail = _draw(rv, _chunk_rng(9, 1), n - CHUNK_SIZE)
    head = _draw(rv, _chunk_rng(9, 0), CHUNK_SIZE)
    assert np.array_equal(full, np.concatenate([head, tail]))


def test_sample_pair_streams_are_distinct():
    rv = RandomVariable.uniform(0.0, 1.0)
    d, v = sample_pair(rv, rv, seed=5, n=1000)
    assert not np.array_equal(d, v)


@given(
    lo=st.floats(-100, 100),
    width=st.floats(0.001, 50),
    seed=st.integers(0, 2**32 - 1),
)
@settings(max_examples=25, deadline=None)
def test_uniform_draws_within_bounds(lo, width, seed):
    batch = sample(RandomVariable.uniform(lo, lo + width), seed, 200)
    assert np.all(batch.values >= lo) and np.all(batch.values <= lo + width)


def test_invalid_distributions_rejected():
    with pytest.raises(ParameterError):
        RandomVariable.uniform(1.0, 1.0)
    with pytest.raises(ParameterError):
        RandomVariable.empirical([])
    with pytest.raises(ParameterError):
        RandomVariable.constant(float("nan"))
    with pytest.raises(ParameterError):
        RandomVariable(kind="normal")
    with pytest.raises(ParameterError):
        sample(RandomVariable.constant(1.0), seed=0, n=0)


# --- empirical upper quantile ----------------------------------------------

def test_quantile_order_statistics_example():
    res = upper_quantile_mc([1, 2, 3, 4, 5, 6, 7, 8, 9, 10], 0.2)
    assert res.z == 8.0
    assert res.method == "monte_carlo"


def test_quantile_constant_samples():
    res = upper_quantile_mc([3.0] * 50, 0.37)
    assert res.z == 3.0
    assert res.ci_halfwidth == 0.0


def test_quantile_input_validation():
    with pytest.raises(InputError):
        upper_quantile_mc([], 0.2)
    with pytest.raises(ParameterError):
        upper_quantile_mc([1.0], 1.5)


@given(
    data=st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=200),
    epsilon=st.floats(0.01, 0.99),
)
@settings(max_examples=100, deadline=None)
def test_quantile_strict_exceedance_convention(data, epsilon):
    z = upper_quantile_mc(data, epsilon).z
    n = len(data)
    limit = math.floor(round(epsilon * n, 9))
    assert z in data
    assert sum(x > z for x in data) <= limit
    smaller = [x for x in data if x < z]
    if smaller:
        w = max(smaller)
        assert sum(x > w for x in data) > limit


@given(
    data=st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=200),
    e1=st.floats(0.01, 0.98),
    delta=st.floats(0.005, 0.5),
)
@settings(max_examples=100, deadline=None)
def test_quantile_epsilon_monotonicity(data, e1, delta):
    e2 = min(e1 + delta, 0.99)
    assert upper_quantile_mc(data, e1).z >= upper_quantile_mc(data, e2).z


def test_quantile_ci_positive_for_continuous_samples():
    draws = sample(RandomVariable.uniform(0.0, 1.0), seed=1, n=10000).values
    res = upper_quantile_mc(draws, 0.2)
    assert res.ci_halfwidth > 0.0


# --- quadrature oracle ------------------------------------------------------

def test_oracle_degenerate_limit():
    # Near-constant D and V ~ 1: quantile approaches T*d - L/e_F = 33642.857...
    d = RandomVariable.uniform(1250.0 - 1e-6, 1250.0 + 1e-6)
    v = RandomVariable.uniform(1.0 - 1e-9, 1.0)
    res = z_epsilon_oracle(d, v, T=30.0, L=2700.0, e_F=0.7, epsilon=0.4)
    assert res.z == pytest.approx(30 * 1250 - 2700 / 0.7, rel=1e-6)
    assert res.method == "quadrature_oracle"
    assert res.ci_halfwidth == 0.0


def test_oracle_golden_value_and_brute_force_agreement():
    d = RandomVariable.uniform(1000.0, 1500.0)
    v = RandomVariable.uniform(0.5, 1.0)
    res = z_epsilon_oracle(d, v, T=30.0, L=2700.0, e_F=0.7, epsilon=0.2)
    assert res.z == pytest.approx(GOLDEN_Z_L2700, rel=1e-9)

    # Independent brute force: 1e7 raw numpy draws, binomial CI.
    rng = np.random.default_rng(20240817)
    n = 10**7
    ratio = (30 * rng.uniform(1000, 1500, n) - 2700 / 0.7) / rng.uniform(0.5, 1.0, n)
    p = np.mean(ratio > res.z)
    se = math.sqrt(p * (1 - p) / n)
    assert abs(p - 0.2) <= 3 * se


def test_oracle_tail_monotone_in_z():
    args = dict(a=30 * 1000 - 2700 / 0.7, b=30 * 1500 - 2700 / 0.7, v_lo=0.0, v_hi=1.0)
    zs = np.linspace(0.0, 3e5, 50)
    tails = [_uniform_ratio_tail(z, **args) for z in zs]
    assert all(t1 >= t2 for t1, t2 in zip(tails, tails[1:]))
    assert all(0.0 <= t <= 1.0 for t in tails)


def test_oracle_tail_matches_adaptive_quadrature():
    # Cross-check the exact piecewise integration against scipy.integrate.quad.
    a, b = 30 * 1000 - 2700 / 0.7, 30 * 1500 - 2700 / 0.7
    for v_lo, v_hi in [(0.0, 1.0), (0.5, 1.0), (0.01, 0.8)]:
        for z in [0.0, 3e4, 6e4, 1.2e5, 3e5]:
            exact = _uniform_ratio_tail(z, a, b, v_lo, v_hi)
            cuts = {a / z, b / z} if z else set()
            pts = sorted({v_lo, v_hi} | {c for c in cuts if v_lo < c < v_hi})
            num = sum(
                quad(lambda v: min(max((b - z * v) / (b - a), 0.0), 1.0), p, q)[0]
                for p, q in zip(pts, pts[1:])
            ) / (v_hi - v_lo)
            assert exact == pytest.approx(num, abs=1e-10)


def test_oracle_epsilon_monotone():
    d = RandomVariable.uniform(1000.0, 1500.0)
    v = RandomVariable.uniform(0.5, 1.0)
    zs = [
        z_epsilon_oracle(d, v, 30.0, 2700.0, 0.7, eps).z
        for eps in (0.05, 0.2, 0.5, 0.9)
    ]
    assert zs == sorted(zs, reverse=True)


def test_oracle_infeasible_when_target_is_loose():
    d = RandomVariable.uniform(1000.0, 1500.0)
    v = RandomVariable.uniform(0.5, 1.0)
    with pytest.raises(InfeasibleError) as exc:
        z_epsilon_oracle(d, v, T=30.0, L=1e9, e_F=0.7, epsilon=0.2)
    lo, hi = exc.value.details["attainable_tail_range"]
    assert hi < 0.2


def test_oracle_rejects_non_uniform():
    with pytest.raises(ParameterError):
        z_epsilon_oracle(
            RandomVariable.constant(1250.0),
            RandomVariable.uniform(0.5, 1.0),
            30.0,
            2700.0,
            0.7,
            0.2,
        )


# --- Monte Carlo quantile against the oracle --------------------------------

@pytest.mark.parametrize("v_lo", [0.5, 0.0])
def test_mc_quantile_within_one_percent_of_oracle(v_lo):
    d = RandomVariable.uniform(1000.0, 1500.0)
    v = RandomVariable.uniform(v_lo, 1.0)
    oracle = z_epsilon_oracle(d, v, 30.0, 2700.0, 0.7, 0.2)
    draws = constraint_ratio_samples(d, v, 30.0, 2700.0, 0.7, seed=2024, n=10**6)
    mc = upper_quantile_mc(draws, 0.2)
    assert mc.z == pytest.approx(oracle.z, rel=0.01)
    assert mc.ci_halfwidth > 0.0
