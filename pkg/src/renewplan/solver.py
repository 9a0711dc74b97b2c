"""Closed-form optimal capacity-expansion plans.

One intervention splits into three regimes by the discount rate; allowing
two or N interventions never helps, so those solvers return the collapsed
single-intervention plan with diagnostics explaining why.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .energy import CapacityPlan, ScenarioParams
from .errors import InfeasibleError, ParameterError, UnsupportedRegimeError
from .feasibility import check_quantile_condition

INTERIOR = "interior"
CORNER_T0 = "corner_t0"
CORNER_XIM = "corner_xiM"
COLLAPSED_SINGLE = "collapsed_single"


@dataclass(frozen=True)
class Solution:
    """An optimal plan with its regime label and discounted installation cost."""

    plan: CapacityPlan
    regime: str
    cost: float
    z_eps: float
    feasible: bool
    diagnostics: tuple[str, ...] = ()


def classify_regime(z_eps: float, params: ScenarioParams) -> str:
    """Discount-rate regime; boundary ties go to the interior (values coincide)."""
    if params.rho < 1.0 / params.T:
        return CORNER_T0
    if params.rho <= params.xi_M / z_eps:
        return INTERIOR
    return CORNER_XIM


def _require_solvable(z_eps: float, params: ScenarioParams) -> None:
    if z_eps <= 0:
        raise ParameterError(f"z_eps must be positive, got {z_eps}")
    if params.K_f != 0:
        raise ParameterError("analytic solvers assume zero fixed cost per intervention")
    if not check_quantile_condition(z_eps, params.T, params.xi_M):
        raise InfeasibleError(
            f"required capacity z_eps/T = {z_eps / params.T:g} exceeds the per-intervention "
            f"maximum xi_M = {params.xi_M:g}; no intervention time admits a feasible expansion",
            details={"z_eps": z_eps, "z_over_T": z_eps / params.T, "xi_M": params.xi_M},
        )


def solve_one_intervention(z_eps: float, params: ScenarioParams) -> Solution:
    """Optimal single intervention at quantile budget ``z_eps``.

    Regimes: install immediately when discounting is weak (rho < 1/T), delay
    to ``T - 1/rho`` in the interior, and hit the capacity cap at
    ``T - z_eps/xi_M`` when discounting is strong.
    """
    _require_solvable(z_eps, params)
    regime = classify_regime(z_eps, params)
    if regime == INTERIOR:
        t_hat = params.T - 1.0 / params.rho
        xi_hat = params.rho * z_eps
    elif regime == CORNER_T0:
        t_hat = 0.0
        xi_hat = z_eps / params.T
    else:
        t_hat = params.T - z_eps / params.xi_M
        xi_hat = params.xi_M
    cost = params.kappa * xi_hat * math.exp(-params.rho * t_hat)
    diags = (
        f"regime thresholds: 1/T = {1.0 / params.T:g}, xi_M/z_eps = {params.xi_M / z_eps:g}, "
        f"rho = {params.rho:g}",
    )
    return Solution(
        plan=CapacityPlan(((t_hat, xi_hat),)),
        regime=regime,
        cost=cost,
        z_eps=z_eps,
        feasible=True,
        diagnostics=diags,
    )


def solve_two_interventions(z_eps: float, params: ScenarioParams) -> Solution:
    """Two admissible interventions collapse to one: returns the single plan."""
    single = solve_one_intervention(z_eps, params)
    diags = single.diagnostics + (
        "first-order conditions for two interventions force t1 = t2 = T - 1/rho "
        "in the interior, i.e. a single intervention",
        f"underlying single-intervention regime: {single.regime}",
    )
    return replace(single, regime=COLLAPSED_SINGLE, diagnostics=diags)


def solve_sequential(z_eps: float, z_tilde: float, params: ScenarioParams) -> Solution:
    """Solve the second intervention against a residual budget, then the first.

    Both stages land at ``T - 1/rho`` with sizes ``rho*z_tilde`` and
    ``rho*(z_eps - z_tilde)``, so they merge into the single interior plan.
    Only derived for the interior regime; anything else is rejected.
    """
    _require_solvable(z_eps, params)
    if not 0.0 < z_tilde < z_eps:
        raise ParameterError("the residual budget z_tilde must lie in (0, z_eps)")
    if classify_regime(z_eps, params) != INTERIOR:
        raise UnsupportedRegimeError(
            "the sequential decomposition assumes the interior first-order condition "
            f"(1/T <= rho <= xi_M/z_eps); got rho = {params.rho:g}"
        )
    t_hat = params.T - 1.0 / params.rho
    xi2 = params.rho * z_tilde
    xi1 = params.rho * (z_eps - z_tilde)
    cost = params.kappa * (xi1 + xi2) * math.exp(-params.rho * t_hat)
    diags = (
        f"stage 2: t = {t_hat:g}, xi = {xi2:g} from residual budget {z_tilde:g}",
        f"stage 1: t = {t_hat:g}, xi = {xi1:g} from remaining budget {z_eps - z_tilde:g}",
        "both stages coincide in time and merge into one intervention",
    )
    return Solution(
        plan=CapacityPlan(((t_hat, xi1 + xi2),)),
        regime=COLLAPSED_SINGLE,
        cost=cost,
        z_eps=z_eps,
        feasible=True,
        diagnostics=diags,
    )


def solve_total_capacity(z_eps: float, xi_tot: float, params: ScenarioParams) -> Solution:
    """With a fixed total build ``xi_tot``, install everything at ``T - z_eps/xi_tot``."""
    if z_eps <= 0:
        raise ParameterError(f"z_eps must be positive, got {z_eps}")
    if xi_tot <= 0:
        raise ParameterError("xi_tot must be positive")
    if params.K_f != 0:
        raise ParameterError("analytic solvers assume zero fixed cost per intervention")
    if z_eps > params.T * xi_tot:
        raise InfeasibleError(
            f"quantile budget z_eps = {z_eps:g} exceeds T * xi_tot = {params.T * xi_tot:g}; "
            "even installing the full capacity at time zero cannot meet the constraint",
            details={"z_eps": z_eps, "T_xi_tot": params.T * xi_tot},
        )
    t_hat = params.T - z_eps / xi_tot
    cost = params.kappa * xi_tot * math.exp(-params.rho * t_hat)
    return Solution(
        plan=CapacityPlan(((t_hat, xi_tot),)),
        regime=COLLAPSED_SINGLE,
        cost=cost,
        z_eps=z_eps,
        feasible=True,
        diagnostics=(
            "splitting the fixed total capacity is never optimal: the stationarity "
            "conditions force a zero first stage",
        ),
    )


def solve_n_interventions(z_eps: float, n: int, params: ScenarioParams) -> Solution:
    """N admissible interventions collapse to one; cost is independent of n."""
    if n < 1:
        raise ParameterError("n must be >= 1")
    single = solve_one_intervention(z_eps, params)
    if n == 1:
        return single
    diags = single.diagnostics + (
        f"first-order conditions put all {n} interventions at T - 1/rho; "
        "they merge into a single intervention",
        f"underlying single-intervention regime: {single.regime}",
    )
    return replace(single, regime=COLLAPSED_SINGLE, diagnostics=diags)
