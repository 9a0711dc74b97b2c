import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from renewplan import (
    RandomVariable,
    ScenarioParams,
    classify_regime,
    solve_n_interventions,
    solve_one_intervention,
    solve_sequential,
    solve_total_capacity,
    solve_two_interventions,
)
from renewplan.errors import InfeasibleError, ParameterError, UnsupportedRegimeError
from renewplan.solver import COLLAPSED_SINGLE, CORNER_T0, CORNER_XIM, INTERIOR


def make_params(rho=0.05, T=30.0, xi_M=1000.0, kappa=1.0, K_f=0.0):
    return ScenarioParams(
        T=T,
        rho=rho,
        kappa=kappa,
        e_F=0.7,
        C_F=2000.0,
        L=2700.0,
        epsilon=0.2,
        xi_M=xi_M,
        D=RandomVariable.uniform(1000.0, 1500.0),
        V=RandomVariable.uniform(0.0, 1.0),
        K_f=K_f,
    )


Z = 6000.0


def test_interior_regime():
    sol = solve_one_intervention(Z, make_params(rho=0.05))
    (t, xi), = sol.plan.interventions
    assert sol.regime == INTERIOR
    assert abs(t - 10.0) < 1e-12 and abs(xi - 300.0) < 1e-12
    assert sol.cost == pytest.approx(300 * math.exp(-0.5), rel=1e-12)


def test_corner_t0_regime():
    sol = solve_one_intervention(Z, make_params(rho=0.02))
    (t, xi), = sol.plan.interventions
    assert sol.regime == CORNER_T0
    assert t == 0.0 and abs(xi - 200.0) < 1e-12
    assert sol.cost == pytest.approx(200.0, rel=1e-12)


def test_corner_xim_regime():
    sol = solve_one_intervention(Z, make_params(rho=0.2))
    (t, xi), = sol.plan.interventions
    assert sol.regime == CORNER_XIM
    assert abs(t - 24.0) < 1e-12 and xi == 1000.0
    assert sol.cost == pytest.approx(1000 * math.exp(-0.2 * 24), rel=1e-12)


def test_regime_boundaries_are_continuous():
    # At rho = 1/T the interior formulas give (0, z/T), same as the corner.
    at_low = solve_one_intervention(Z, make_params(rho=1 / 30))
    assert at_low.regime == INTERIOR
    (t, xi), = at_low.plan.interventions
    assert abs(t - 0.0) < 1e-9 and xi == pytest.approx(Z / 30, rel=1e-12)

    # At rho = xi_M/z the interior formulas give (T - z/xi_M, xi_M).
    at_high = solve_one_intervention(Z, make_params(rho=1000.0 / Z))
    assert at_high.regime == INTERIOR
    (t, xi), = at_high.plan.interventions
    assert t == pytest.approx(30 - Z / 1000.0, rel=1e-12)
    assert xi == pytest.approx(1000.0, rel=1e-12)


def test_interior_first_order_condition():
    params = make_params(rho=0.05)
    sol = solve_one_intervention(Z, params)
    (t_hat, _), = sol.plan.interventions

    def cost(t):
        return params.kappa * (Z / (params.T - t)) * math.exp(-params.rho * t)

    h = 1e-6
    deriv = (cost(t_hat + h) - cost(t_hat - h)) / (2 * h)
    assert abs(deriv) < 1e-6 * sol.cost


@given(
    rho=st.floats(0.001, 0.5),
    T=st.floats(5.0, 60.0),
    xi_M=st.floats(10.0, 5000.0),
    z_frac=st.floats(0.01, 0.99),
)
@settings(max_examples=150, deadline=None)
def test_constraint_identity_and_cap(rho, T, xi_M, z_frac):
    z = z_frac * T * xi_M  # quantile condition holds by construction
    sol = solve_one_intervention(z, make_params(rho=rho, T=T, xi_M=xi_M))
    (t, xi), = sol.plan.interventions
    assert (T - t) * xi == pytest.approx(z, rel=1e-9)
    assert xi <= xi_M * (1 + 1e-12)
    assert 0.0 <= t < T
    assert sol.regime == classify_regime(z, make_params(rho=rho, T=T, xi_M=xi_M))


def test_infeasible_when_capacity_cap_too_small():
    with pytest.raises(InfeasibleError):
        solve_one_intervention(45000.0, make_params())  # z/T = 1500 > 1000
    with pytest.raises(ParameterError):
        solve_one_intervention(0.0, make_params())


def test_fixed_costs_rejected():
    with pytest.raises(ParameterError, match="fixed cost"):
        solve_one_intervention(Z, make_params(K_f=1.0))


def test_two_interventions_collapse():
    params = make_params(rho=0.05)
    one = solve_one_intervention(Z, params)
    two = solve_two_interventions(Z, params)
    assert two.plan.interventions == one.plan.interventions
    assert two.cost == one.cost
    assert two.regime == COLLAPSED_SINGLE
    assert any("single intervention" in d for d in two.diagnostics)


def test_sequential_split_merges():
    sol = solve_sequential(Z, 2000.0, make_params(rho=0.05))
    (t, xi), = sol.plan.interventions
    assert t == pytest.approx(10.0, rel=1e-12)
    assert xi == pytest.approx(300.0, rel=1e-12)  # rho*z_tilde + rho*(z - z_tilde)
    assert sol.cost == pytest.approx(solve_one_intervention(Z, make_params()).cost, rel=1e-12)


@pytest.mark.parametrize("z_tilde", [1e-9 * Z, Z * (1 - 1e-12)])
def test_sequential_degenerate_splits(z_tilde):
    sol = solve_sequential(Z, z_tilde, make_params(rho=0.05))
    one = solve_one_intervention(Z, make_params(rho=0.05))
    assert sol.plan.times == one.plan.times
    assert sol.plan.sizes[0] == pytest.approx(one.plan.sizes[0], rel=1e-9)


def test_sequential_rejects_non_interior_and_bad_split():
    with pytest.raises(UnsupportedRegimeError):
        solve_sequential(Z, 2000.0, make_params(rho=0.02))
    with pytest.raises(ParameterError):
        solve_sequential(Z, Z, make_params(rho=0.05))
    with pytest.raises(ParameterError):
        solve_sequential(Z, 0.0, make_params(rho=0.05))


def test_total_capacity_case():
    sol = solve_total_capacity(Z, 1000.0, make_params(rho=0.05))
    (t, xi), = sol.plan.interventions
    assert t == pytest.approx(24.0, rel=1e-12) and xi == 1000.0
    assert sol.cost == pytest.approx(1000 * math.exp(-0.05 * 24), rel=1e-12)
    assert sol.regime == COLLAPSED_SINGLE

    boundary = solve_total_capacity(30.0 * 1000.0, 1000.0, make_params())
    assert boundary.plan.times == (0.0,)

    with pytest.raises(InfeasibleError):
        solve_total_capacity(30.0 * 1000.0 + 1.0, 1000.0, make_params())


def test_n_interventions_collapse_and_cost_invariance():
    params = make_params(rho=0.05)
    one = solve_one_intervention(Z, params)
    for n in (1, 2, 3, 5):
        sol = solve_n_interventions(Z, n, params)
        assert sol.plan.interventions == one.plan.interventions
        assert sol.cost == one.cost
    assert solve_n_interventions(Z, 1, params).regime == one.regime
    assert solve_n_interventions(Z, 5, params).regime == COLLAPSED_SINGLE
    with pytest.raises(ParameterError):
        solve_n_interventions(Z, 0, params)
