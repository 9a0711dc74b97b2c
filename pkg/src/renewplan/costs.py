"""Installation, operational, and emission-penalty costs.

Everything is measured at present value; proportional costs decay as
``kappa * exp(-rho * t)`` and each started intervention may carry a fixed
cost ``K_f`` at the same discount.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .energy import CapacityPlan, ScenarioParams, emissions_exact, require_scalar_plan
from .errors import InputError, ParameterError
from .stochastic import SamplingConfig, sample_pair

POLYNOMIAL = "polynomial"
LAGRANGE = "lagrange"


@dataclass(frozen=True)
class PenaltySpec:
    """Emission penalty: polynomial overshoot or the Lagrange indicator form.

    polynomial: ``lam * max(0, x - L)**k``.
    lagrange:   ``lam * (1(x > L) - epsilon)``, the multiplier form of the
    chance constraint; its expectation vanishes exactly at plans whose
    violation probability equals ``epsilon``.
    """

    kind: str
    lam: float
    L: float
    k: int = 1
    epsilon: float = 0.0

    def __post_init__(self):
        if self.kind not in (POLYNOMIAL, LAGRANGE):
            raise ParameterError(f"unknown penalty kind {self.kind!r}")
        if self.lam < 0:
            raise ParameterError("penalty weight must be non-negative")
        if self.kind == POLYNOMIAL and self.k < 1:
            raise ParameterError("polynomial penalty order must be >= 1")
        if self.kind == LAGRANGE and not 0.0 < self.epsilon < 1.0:
            raise ParameterError("epsilon must lie in (0,1)")

    @classmethod
    def polynomial(cls, lam: float, L: float, k: int = 1) -> "PenaltySpec":
        return cls(kind=POLYNOMIAL, lam=lam, L=L, k=k)

    @classmethod
    def lagrange(cls, lam: float, L: float, epsilon: float) -> "PenaltySpec":
        return cls(kind=LAGRANGE, lam=lam, L=L, epsilon=epsilon)

    def __call__(self, emissions):
        x = np.asarray(emissions, dtype=float)
        if self.kind == POLYNOMIAL:
            return (self.lam * np.maximum(0.0, x - self.L) ** self.k)[()]
        return (self.lam * ((x > self.L).astype(float) - self.epsilon))[()]


@dataclass(frozen=True)
class CostBreakdown:
    """Installation + operational + penalty components and their total."""

    installation: float
    operational: float
    penalty: float
    total: float

    def __post_init__(self):
        s = self.installation + self.operational + self.penalty
        if abs(s - self.total) > 1e-9 * max(abs(s), abs(self.total), 1.0):
            raise ParameterError("cost components do not sum to the total")


@dataclass(frozen=True)
class DoNothingReport:
    """Baseline diagnostics for the empty plan."""

    J0: float
    moment_k: float
    violation_prob: float


def installation_cost(plan: CapacityPlan, params: ScenarioParams) -> float:
    """Discounted cost of all interventions: ``sum (K_f + kappa*xi) * exp(-rho*t)``."""
    require_scalar_plan(plan, "installation_cost")
    return sum(
        (params.K_f + params.kappa * xi) * math.exp(-params.rho * t)
        for t, xi in plan.interventions
        if xi > 0
    )


def operational_cost(plan: CapacityPlan, params: ScenarioParams, f_coeff: float) -> float:
    """Linear running cost ``f_coeff * integral of installed capacity over [0, T]``."""
    require_scalar_plan(plan, "operational_cost")
    if f_coeff < 0:
        raise ParameterError("f_coeff must be non-negative")
    if any(t > params.T for t in plan.times):
        raise InputError("plan has interventions beyond the horizon")
    stock = plan.initial_capacity * params.T + sum(
        (params.T - t) * xi for t, xi in plan.interventions
    )
    return f_coeff * stock


def objective_penalty_form(
    plan: CapacityPlan,
    params: ScenarioParams,
    f_coeff: float,
    penalty: PenaltySpec,
    mc: SamplingConfig,
) -> CostBreakdown:
    """Expected penalty-form objective under Monte Carlo draws of (D, V)."""
    install = installation_cost(plan, params)
    operational = operational_cost(plan, params, f_coeff)
    d, v = sample_pair(params.D, params.V, mc.seed, mc.n_samples)
    mean_penalty = float(np.mean(penalty(emissions_exact(plan, d, v, params))))
    return CostBreakdown(
        installation=install,
        operational=operational,
        penalty=mean_penalty,
        total=install + operational + mean_penalty,
    )


def do_nothing_report(
    params: ScenarioParams,
    k: int,
    n_samples: int,
    seed: int,
    f_coeff: float = 0.0,
    penalty: PenaltySpec | None = None,
) -> DoNothingReport:
    """Monte Carlo baseline for the empty plan.

    Estimates the do-nothing objective, the k-th emission moment (for the
    well-definedness bound), and the probability of exceeding the target.
    """
    if k < 1:
        raise ParameterError("moment order k must be >= 1")
    empty = CapacityPlan()
    d, v = sample_pair(params.D, params.V, seed, n_samples)
    emissions = np.asarray(emissions_exact(empty, d, v, params))
    j0 = operational_cost(empty, params, f_coeff)
    if penalty is not None:
        j0 += float(np.mean(penalty(emissions)))
    return DoNothingReport(
        J0=j0,
        moment_k=float(np.mean(emissions**k)),
        violation_prob=float(np.mean(emissions > params.L)),
    )
