"""Brute-force grid optimization and Monte Carlo constraint verification.

The chance constraint is eliminated analytically: intervention sizes are
solved from the times through the quantile budget, so every grid point is
exactly feasible and the search runs over times (and all-but-one size).
Ties break lexicographically on (t_1, ..., xi_1, ...) so the result does
not depend on evaluation order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .energy import CapacityPlan, ScenarioParams, emissions_exact
from .errors import ConfigError, InfeasibleError, ParameterError
from .solver import COLLAPSED_SINGLE, Solution, classify_regime
from .stochastic import sample_pair

#: Upper bound on evaluated grid combinations for the n-intervention search.
MAX_GRID_COMBOS = 50_000_000


@dataclass(frozen=True)
class GridSpec:
    """Uniform search grids: times on [0, T], sizes on (0, xi_M]."""

    t_points: int = 3001
    xi_points: int = 101

    def __post_init__(self):
        if self.t_points < 2 or self.xi_points < 2:
            raise ParameterError("grids need at least 2 points per axis")

    def t_grid(self, T: float) -> np.ndarray:
        return np.linspace(0.0, T, self.t_points)

    def t_step(self, T: float) -> float:
        return T / (self.t_points - 1)

    def xi_grid(self, xi_M: float) -> np.ndarray:
        return np.linspace(xi_M / self.xi_points, xi_M, self.xi_points)


@dataclass(frozen=True)
class VerificationReport:
    """Monte Carlo check that a plan's violation probability matches epsilon."""

    estimated_prob: float
    target_eps: float
    n_samples: int
    std_error: float
    passed: bool
    diagnostics: tuple[str, ...] = ()


def _effective_interventions(pairs) -> tuple[tuple[float, float], ...]:
    """Drop zero sizes and merge interventions that share a time."""
    merged: dict[float, float] = {}
    for t, xi in pairs:
        if xi > 0:
            merged[t] = merged.get(t, 0.0) + xi
    return tuple(sorted(merged.items()))


def _grid_solution(pairs, z_eps: float, params: ScenarioParams, diags) -> Solution:
    effective = _effective_interventions(pairs)
    cost = sum(params.kappa * xi * math.exp(-params.rho * t) for t, xi in effective)
    if len(effective) <= 1:
        regime = classify_regime(z_eps, params) if len(pairs) == 1 else COLLAPSED_SINGLE
    else:
        regime = classify_regime(z_eps, params)
        diags = diags + (f"grid argmin retains {len(effective)} effective interventions",)
    return Solution(
        plan=CapacityPlan(effective),
        regime=regime,
        cost=cost,
        z_eps=z_eps,
        feasible=True,
        diagnostics=diags,
    )


def grid_search_one(z_eps: float, params: ScenarioParams, grid: GridSpec) -> Solution:
    """Exhaustive single-intervention search: size solved as z_eps / (T - t)."""
    if z_eps <= 0:
        raise ParameterError(f"z_eps must be positive, got {z_eps}")
    t = grid.t_grid(params.T)
    t = t[t < params.T]
    xi = z_eps / (params.T - t)
    feasible = xi <= params.xi_M
    if not np.any(feasible):
        raise InfeasibleError(
            "no grid time admits a feasible expansion (z_eps/(T-t) > xi_M everywhere)",
            details={"z_eps": z_eps, "xi_M": params.xi_M},
        )
    cost = params.kappa * xi * np.exp(-params.rho * t)
    cost[~feasible] = np.inf
    i = int(np.argmin(cost))  # earliest time wins ties: t is ascending
    return _grid_solution(
        [(float(t[i]), float(xi[i]))],
        z_eps,
        params,
        (f"t-grid step {grid.t_step(params.T):g}, argmin index {i}",),
    )


def _better(key, best_key) -> bool:
    return best_key is None or key < best_key


def _snap(values: np.ndarray, anchors: tuple[float, ...], scale: float) -> np.ndarray:
    """Snap solved sizes onto boundary anchors (0, caps) to cancel roundoff.

    Solved sizes carry ~1e-12 relative noise while genuine grid sizes are
    >= 1/xi_points of the cap, so a 1e-9 relative window is unambiguous.
    Exact boundary values restore the cost ties that the lexicographic
    tie-break relies on."""
    out = np.asarray(values, dtype=float).copy()
    for anchor in anchors:
        out[np.abs(out - anchor) <= 1e-9 * scale] = anchor
    return out


def grid_search_two(
    z_eps: float,
    params: ScenarioParams,
    grid: GridSpec,
    xi_total: float | None = None,
) -> Solution:
    """Exhaustive two-intervention search over (t1 < t2, xi2), xi1 solved.

    Zero sizes are admitted so single-intervention plans are embedded in the
    search. With ``xi_total`` set, only plans with xi1 + xi2 = xi_total are
    scanned (sizes then follow from the two times).
    """
    if z_eps <= 0:
        raise ParameterError(f"z_eps must be positive, got {z_eps}")
    T, xi_M = params.T, params.xi_M
    t = grid.t_grid(T)
    t = t[t < T]
    disc = np.exp(-params.rho * t)

    best_key = None
    for i1 in range(len(t) - 1):
        t1 = t[i1]
        t2 = t[i1 + 1 :]
        d2 = disc[i1 + 1 :]
        if xi_total is None:
            xi2 = np.concatenate([[0.0], grid.xi_grid(xi_M)])
            # rows: t2 choices, cols: xi2 choices
            xi1 = _snap((z_eps - np.outer(T - t2, xi2)) / (T - t1), (0.0, xi_M), xi_M)
            ok = (xi1 >= 0.0) & (xi1 <= xi_M)
            cost = params.kappa * (xi1 * disc[i1] + np.outer(d2, xi2))
            xi2_mat = np.broadcast_to(xi2, cost.shape)
        else:
            xi2_col = _snap(
                ((T - t1) * xi_total - z_eps) / (t2 - t1), (0.0, xi_total), xi_total
            )
            xi1 = xi_total - xi2_col
            ok = (xi2_col >= 0.0) & (xi2_col <= xi_total) & (xi1 >= 0.0)
            cost = params.kappa * (xi1 * disc[i1] + d2 * xi2_col)
            xi1 = xi1[:, None]
            ok = ok[:, None]
            cost = cost[:, None]
            xi2_mat = xi2_col[:, None]
        if not np.any(ok):
            continue
        cost = np.where(ok, cost, np.inf)
        flat = int(np.argmin(cost))
        r, c = np.unravel_index(flat, cost.shape)
        cmin = cost[r, c]
        # Resolve exact-cost ties lexicographically on (t1, t2, xi1, xi2).
        for rr, cc in zip(*np.nonzero(cost == cmin)):
            key = (cmin, t1, float(t2[rr]), float(xi1[rr, cc]), float(xi2_mat[rr, cc]))
            if _better(key, best_key):
                best_key = key
    if best_key is None:
        raise InfeasibleError(
            "two-intervention grid contains no feasible plan",
            details={"z_eps": z_eps, "xi_M": xi_M, "xi_total": xi_total},
        )
    _, t1, t2, xi1, xi2 = best_key
    return _grid_solution(
        [(t1, xi1), (t2, xi2)],
        z_eps,
        params,
        (f"two-intervention grid, t-step {grid.t_step(T):g}",),
    )


def grid_search_n(z_eps: float, n: int, params: ScenarioParams, grid: GridSpec) -> Solution:
    """Exhaustive n-intervention search; the last size is solved from the budget."""
    if n < 1:
        raise ParameterError("n must be >= 1")
    if n > 4:
        raise ConfigError("exhaustive search supports at most 4 interventions")
    if n == 1:
        return grid_search_one(z_eps, params, grid)

    T, xi_M = params.T, params.xi_M
    t = grid.t_grid(T)
    t = t[t < T]
    n_tuples = math.comb(len(t), n)
    size_combos = (grid.xi_points + 1) ** (n - 1)
    if n_tuples * size_combos > MAX_GRID_COMBOS:
        raise ConfigError(
            f"grid budget exceeded: {n_tuples} time tuples x {size_combos} size tuples"
        )

    xi_axis = np.concatenate([[0.0], grid.xi_grid(xi_M)])
    mesh = np.meshgrid(*([xi_axis] * (n - 1)), indexing="ij")
    lead_sizes = np.stack([m.ravel() for m in mesh], axis=1)  # (combos, n-1)

    best_key = None
    for idx in combinations(range(len(t)), n):
        times = t[list(idx)]
        weights = T - times
        disc = np.exp(-params.rho * times)
        rem = z_eps - lead_sizes @ weights[:-1]
        xi_last = _snap(rem / weights[-1], (0.0, xi_M), xi_M)
        ok = (xi_last >= 0.0) & (xi_last <= xi_M)
        if not np.any(ok):
            continue
        cost = params.kappa * (lead_sizes @ disc[:-1] + xi_last * disc[-1])
        cost = np.where(ok, cost, np.inf)
        j = int(np.argmin(cost))
        cmin = cost[j]
        for jj in np.nonzero(cost == cmin)[0]:
            sizes = (*lead_sizes[jj], xi_last[jj])
            key = (cmin, *times, *sizes)
            if _better(key, best_key):
                best_key = key
    if best_key is None:
        raise InfeasibleError(
            f"{n}-intervention grid contains no feasible plan",
            details={"z_eps": z_eps, "xi_M": xi_M, "n": n},
        )
    times = best_key[1 : 1 + n]
    sizes = best_key[1 + n :]
    return _grid_solution(
        list(zip(times, sizes)),
        z_eps,
        params,
        (f"{n}-intervention grid, t-step {grid.t_step(T):g}",),
    )


def verify_constraint(
    plan: CapacityPlan,
    params: ScenarioParams,
    n_samples: int,
    seed: int,
    tol: float = 0.0,
) -> VerificationReport:
    """Monte Carlo estimate of P(E(T) > L) for a plan, against target epsilon.

    Emissions are evaluated with the fully clipped formula, which remains
    correct on draws where renewables cover demand (where the linearized
    closed form would not apply).
    """
    d, v = sample_pair(params.D, params.V, seed, n_samples)
    emissions = np.asarray(emissions_exact(plan, d, v, params))
    p = float(np.mean(emissions > params.L))
    se = math.sqrt(p * (1.0 - p) / n_samples)
    diags = ()
    atom = float(np.mean(emissions == params.L))
    if atom > 0:
        diags = (
            f"atom at the target: P(E = L) = {atom:g}; "
            f"weak-inequality variant P(E >= L) = {p + atom:g}",
        )
    return VerificationReport(
        estimated_prob=p,
        target_eps=params.epsilon,
        n_samples=n_samples,
        std_error=se,
        passed=abs(p - params.epsilon) <= max(3.0 * se, tol),
        diagnostics=diags,
    )
