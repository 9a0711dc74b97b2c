"""Capacity plans, fossil dispatch, and accumulated emissions.

Exact closed forms cover the time-independent demand/capacity-factor case;
the path integral covers general sampled paths, multiple technologies
(vector capacities), and import emissions.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError, ModelAssumptionError, ParameterError
from .stochastic import RandomVariable

_SNAP_TOL = 1e-9


def _as_size(x):
    """Normalize an intervention size: float for one technology, tuple for several."""
    if np.ndim(x) == 0:
        return float(x)
    return tuple(float(v) for v in np.asarray(x).ravel())


@dataclass(frozen=True)
class CapacityPlan:
    """Sorted intervention times with positive expansion sizes.

    Sizes are scalars for a single aggregated technology or equal-length
    tuples for several. ``initial_capacity`` is the pre-existing stock.
    """

    interventions: tuple = ()
    initial_capacity: float | tuple = 0.0
    dim: int = field(init=False, repr=False, default=1)

    def __post_init__(self):
        ivs = tuple((float(t), _as_size(xi)) for t, xi in self.interventions)
        initial = _as_size(self.initial_capacity)

        times = [t for t, _ in ivs]
        if any(t < 0 or not math.isfinite(t) for t in times):
            raise ParameterError("intervention times must be finite and non-negative")
        if any(a >= b for a, b in zip(times, times[1:])):
            raise ParameterError("intervention times must be strictly increasing")

        dims = {len(np.atleast_1d(xi)) for _, xi in ivs}
        if len(dims) > 1:
            raise ParameterError("all sizes must share the same technology dimension")
        dim = dims.pop() if dims else len(np.atleast_1d(initial))
        if dim == 1:
            ivs = tuple((t, float(np.atleast_1d(xi)[0])) for t, xi in ivs)
            initial = float(np.atleast_1d(initial)[0])
        elif np.ndim(initial) == 0:
            initial = (float(initial),) * dim  # broadcast scalar stock
        elif len(initial) != dim:
            raise ParameterError("initial capacity dimension does not match the sizes")

        for _, xi in ivs:
            arr = np.atleast_1d(xi)
            if np.any(arr < 0) or not np.all(np.isfinite(arr)):
                raise ParameterError("expansion sizes must be finite and non-negative")
            if not np.any(arr > 0):
                raise ParameterError("each intervention must add positive capacity")
        if np.any(np.atleast_1d(initial) < 0):
            raise ParameterError("initial capacity must be non-negative")
        object.__setattr__(self, "interventions", ivs)
        object.__setattr__(self, "initial_capacity", initial)
        object.__setattr__(self, "dim", dim)

    @property
    def times(self) -> tuple[float, ...]:
        return tuple(t for t, _ in self.interventions)

    @property
    def sizes(self) -> tuple:
        return tuple(xi for _, xi in self.interventions)

    def is_scalar(self) -> bool:
        return self.dim == 1

    def capacity_at(self, t: float):
        """Installed capacity immediately after time ``t`` (jumps count at t_i)."""
        cap = np.atleast_1d(np.asarray(self.initial_capacity, dtype=float)).copy()
        for t_i, xi in self.interventions:
            if t_i <= t:
                cap += np.atleast_1d(xi)
        return float(cap[0]) if self.is_scalar() else cap

    def total_capacity(self):
        cap = np.atleast_1d(np.asarray(self.initial_capacity, dtype=float)).copy()
        for _, xi in self.interventions:
            cap += np.atleast_1d(xi)
        return float(cap[0]) if self.is_scalar() else cap


def require_scalar_plan(plan: CapacityPlan, what: str) -> None:
    if not plan.is_scalar():
        raise InputError(f"{what} requires a single aggregated technology (scalar sizes)")


@dataclass(frozen=True)
class ScenarioParams:
    """All scenario inputs: horizon, costs, emission factors, targets, distributions."""

    T: float
    rho: float
    kappa: float
    e_F: float
    C_F: float
    L: float
    epsilon: float
    xi_M: float
    D: RandomVariable
    V: RandomVariable
    K_f: float = 0.0
    e_I: float = 0.0

    def __post_init__(self):
        checks = [
            (self.T > 0, "T must be positive"),
            (self.rho >= 0, "rho must be non-negative"),
            (self.kappa > 0, "kappa must be positive"),
            (self.e_F > 0, "e_F must be positive"),
            (self.e_I >= 0, "e_I must be non-negative"),
            (self.C_F >= 0, "C_F must be non-negative"),
            (self.L > 0, "L must be positive"),
            (0.0 < self.epsilon < 1.0, "epsilon must lie in (0,1)"),
            (self.xi_M > 0, "xi_M must be positive"),
            (self.K_f >= 0, "K_f must be non-negative"),
        ]
        for ok, msg in checks:
            if not ok:
                raise ParameterError(msg)
        v_lo, v_hi = self.V.support()
        if v_lo < 0 or v_hi > 1:
            raise ParameterError("capacity factor support must lie within [0, 1]")
        d_lo, _ = self.D.support()
        if d_lo < 0:
            raise ParameterError("demand support must be non-negative")


@dataclass(frozen=True)
class EmissionsResult:
    """Total accumulated emissions with per-segment contributions."""

    total: float
    breakdown: tuple[tuple[float, float, float], ...] = ()

    def __post_init__(self):
        if self.breakdown:
            s = sum(c for _, _, c in self.breakdown)
            scale = max(abs(self.total), abs(s), 1e-300)
            if abs(s - self.total) > 1e-9 * scale:
                raise ParameterError("breakdown does not sum to the emission total")


def dispatch_fossil(demand, renewable, C_F: float):
    """Fossil output: the demand shortfall after renewables, clipped to [0, C_F]."""
    if C_F < 0:
        raise ParameterError("C_F must be non-negative")
    return np.clip(np.asarray(demand) - np.asarray(renewable), 0.0, C_F)[()]


def emission_rate(x, e_F: float, e_I: float, C_F: float):
    """Emission rate for a demand shortfall ``x``: fossil up to C_F, imports above."""
    if e_F < 0 or e_I < 0 or C_F < 0:
        raise ParameterError("emission factors and C_F must be non-negative")
    x = np.asarray(x, dtype=float)
    rate = np.where(x < 0, 0.0, np.where(x < C_F, e_F * x, e_I * (x - C_F) + e_F * C_F))
    return rate[()]


def renewable_production(plan: CapacityPlan, v, t: float):
    """Variable production at time ``t``: installed capacity dotted with the factor."""
    cap = plan.capacity_at(t)
    if plan.is_scalar():
        return cap * float(v)
    return float(np.dot(np.atleast_1d(cap), np.atleast_1d(v)))


def _segments(plan: CapacityPlan, T: float):
    """(start, end, installed capacity) pieces of [0, T] between interventions."""
    edges = [0.0] + [t for t in plan.times if t <= T] + [T]
    running = np.atleast_1d(np.asarray(plan.initial_capacity, dtype=float)).copy()
    caps = [running.copy()]
    for t_i, xi in plan.interventions:
        if t_i > T:
            break
        running = running + np.atleast_1d(xi)
        caps.append(running)
    if plan.is_scalar():
        caps = [float(c[0]) for c in caps]
    return [(a, b, c) for (a, b), c in zip(zip(edges, edges[1:]), caps)]


def emissions_closed_form(
    plan: CapacityPlan, d: float, v: float, params: ScenarioParams
) -> EmissionsResult:
    """Accumulated emissions ``e_F * (T*d - v * sum (T - t_i) xi_i)`` for constant inputs.

    Valid only while demand dominates renewable output on every draw, so the
    positive-part in the dispatch never activates; violations raise a
    model-assumption error instead of returning a silently wrong value.
    """
    require_scalar_plan(plan, "emissions_closed_form")
    if any(t > params.T for t in plan.times):
        raise InputError("plan has interventions beyond the horizon")
    if d - v * plan.total_capacity() < 0:
        raise ModelAssumptionError(
            "closed form requires demand to dominate renewable output "
            f"(d - v*capacity = {d - v * plan.total_capacity():g} < 0); "
            "the demand-dominance condition P(D < xi*V) ~ 0 is violated here"
        )
    if d > params.C_F:
        raise ModelAssumptionError(
            f"closed form assumes fossil capacity covers demand (d={d:g} > C_F={params.C_F:g})"
        )
    breakdown = tuple(
        (a, b, params.e_F * (b - a) * (d - v * cap)) for a, b, cap in _segments(plan, params.T)
    )
    total = params.e_F * (
        params.T * d
        - v * (plan.initial_capacity * params.T + sum((params.T - t) * xi for t, xi in plan.interventions))
    )
    return EmissionsResult(total=total, breakdown=breakdown)


def emissions_exact(plan: CapacityPlan, d, v, params: ScenarioParams):
    """Exact accumulated emissions for time-independent draws, with full clipping.

    Works element-wise over arrays of (d, v) draws; unlike the closed form it
    applies the dispatch positive-part and the C_F/import split, so it stays
    correct when renewables can exceed demand.
    """
    require_scalar_plan(plan, "emissions_exact")
    d = np.asarray(d, dtype=float)
    v = np.asarray(v, dtype=float)
    total = np.zeros(np.broadcast(d, v).shape)
    for a, b, cap in _segments(plan, params.T):
        total += (b - a) * emission_rate(d - v * cap, params.e_F, params.e_I, params.C_F)
    return total[()]


def accumulated_emissions_path(
    plan: CapacityPlan,
    d_path,
    v_path,
    params: ScenarioParams,
    dt: float,
) -> EmissionsResult:
    """Left-endpoint Riemann sum of the emission rate along sampled paths.

    ``v_path`` may be (n,) for one technology or (n, dim) for several.
    Interventions off the time grid are snapped to the nearest grid point
    below, with a warning.
    """
    if dt <= 0:
        raise ParameterError("dt must be positive")
    d_arr = np.asarray(d_path, dtype=float)
    v_arr = np.asarray(v_path, dtype=float)
    if d_arr.ndim != 1:
        raise InputError("d_path must be one-dimensional")
    n = d_arr.size
    if v_arr.shape[0] != n:
        raise InputError(f"d_path and v_path lengths differ ({n} vs {v_arr.shape[0]})")
    if abs(n * dt - params.T) > 1e-9 * max(1.0, params.T):
        raise InputError(f"n*dt = {n * dt:g} must equal the horizon T = {params.T:g}")

    sizes = np.atleast_2d(np.asarray([np.atleast_1d(xi) for xi in plan.sizes], dtype=float))
    dim = sizes.shape[1] if plan.sizes else (1 if plan.is_scalar() else len(np.atleast_1d(plan.initial_capacity)))
    if v_arr.ndim == 1:
        v_arr = v_arr[:, None]
    if v_arr.shape[1] != dim:
        raise InputError(f"v_path has {v_arr.shape[1]} technologies, plan has {dim}")

    grid = np.arange(n) * dt
    cap = np.tile(np.atleast_1d(np.asarray(plan.initial_capacity, dtype=float)), (n, 1))
    for (t_i, _), size in zip(plan.interventions, sizes):
        k = int(math.floor(t_i / dt + _SNAP_TOL))
        snapped = k * dt
        if abs(snapped - t_i) > _SNAP_TOL * max(1.0, params.T):
            warnings.warn(
                f"intervention time {t_i:g} snapped to grid point {snapped:g}",
                stacklevel=2,
            )
        if k < n:
            cap[k:] += size

    shortfall = d_arr - np.einsum("ij,ij->i", cap, v_arr)
    rates = emission_rate(shortfall, params.e_F, params.e_I, params.C_F)

    edges = [0]
    for t_i, _ in plan.interventions:
        k = int(math.floor(t_i / dt + _SNAP_TOL))
        if 0 < k < n:
            edges.append(k)
    edges.append(n)
    breakdown = tuple(
        (grid[a], b * dt if b < n else params.T, float(np.sum(rates[a:b]) * dt))
        for a, b in zip(edges, edges[1:])
    )
    return EmissionsResult(total=float(np.sum(rates) * dt), breakdown=breakdown)


def emissions_partials(
    t: float, xi: float, d: float, v: float, params: ScenarioParams
) -> tuple[float, float]:
    """Sensitivities of accumulated emissions to one intervention's time and size.

    Time-independent single-intervention case: later installs raise emissions
    at rate ``e_F * min(d, xi*v)``; bigger installs lower them at rate
    ``e_F * (T - t) * v`` while demand still exceeds renewable output.
    """
    if not 0 <= t < params.T:
        raise ParameterError("t must lie in [0, T)")
    dE_dt = params.e_F * min(d, xi * v)
    dE_dxi = -params.e_F * (params.T - t) * v if d - xi * v > 0 else 0.0
    return dE_dt, dE_dxi
