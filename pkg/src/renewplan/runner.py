"""Experiment orchestration: quantile -> feasibility -> solve -> verify -> report.

Reports can be emitted as CSV (stable column set, byte-deterministic for a
fixed config and seed) or JSON (a full mirror of the run report).
"""
from __future__ import annotations

import csv
import dataclasses
import json
import time
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .config import ScenarioConfig
from .costs import do_nothing_report
from .energy import ScenarioParams, accumulated_emissions_path
from .errors import ConfigError, InfeasibleError, RenewplanError
from .feasibility import (
    CheckResult,
    check_dv_condition,
    check_quantile_condition,
    check_target_reachable,
)
from .gridsearch import (
    VerificationReport,
    grid_search_n,
    grid_search_one,
    grid_search_two,
    verify_constraint,
)
from .solver import (
    Solution,
    solve_n_interventions,
    solve_one_intervention,
    solve_total_capacity,
    solve_two_interventions,
)
from .stochastic import (
    QUADRATURE_ORACLE,
    QuantileResult,
    constraint_ratio_samples,
    derive_seeds,
    sample,
    upper_quantile_mc,
    z_epsilon_oracle,
)

CSV_COLUMNS = (
    "scenario_id",
    "rho",
    "T",
    "L",
    "epsilon",
    "xi_M",
    "z_eps",
    "regime",
    "t_hat",
    "xi_hat",
    "cost_analytic",
    "cost_numeric",
    "prob_estimate",
    "prob_stderr",
    "feasible",
)

CURVE_COLUMNS = ("rho", "t", "cost", "feasible")


@dataclass(frozen=True)
class FeasibilitySection:
    """All standing-assumption checks, with their estimated probabilities."""

    target_reachable: CheckResult
    do_nothing_exceeds: CheckResult
    demand_dominance: CheckResult
    quantile_ok: bool
    z_over_T: float


@dataclass(frozen=True)
class SweepRow:
    rho: float
    regime: str
    t_hat: float
    xi_hat: float
    cost_analytic: float
    cost_numeric: float
    prob_estimate: float
    prob_stderr: float
    feasible: bool


@dataclass
class RunReport:
    """Everything one scenario run produced; sweep mode fills one row per rho."""

    scenario_id: str
    config: ScenarioConfig
    z_eps: QuantileResult | None = None
    feasibility: FeasibilitySection | None = None
    analytic: Solution | None = None
    numeric: Solution | None = None
    verification: VerificationReport | None = None
    infeasibility: dict | None = None
    sweep_rows: tuple[SweepRow, ...] = ()
    cost_curve: tuple[tuple[float, float, float, bool], ...] = ()
    wall_time: float = 0.0


def _stage(name: str, exc: RenewplanError) -> RenewplanError:
    exc.args = (f"[{name}] {exc.args[0]}" if exc.args else f"[{name}]",) + exc.args[1:]
    return exc


def compute_quantile(config: ScenarioConfig, seed: int) -> QuantileResult:
    p = config.params
    if config.quantile.method == QUADRATURE_ORACLE:
        return z_epsilon_oracle(p.D, p.V, p.T, p.L, p.e_F, p.epsilon)
    draws = constraint_ratio_samples(
        p.D, p.V, p.T, p.L, p.e_F, seed, config.quantile.n_samples
    )
    return upper_quantile_mc(draws, p.epsilon)


def _n_interventions(config: ScenarioConfig) -> int:
    mode = config.solver.mode
    if mode == "two" or mode == "total_capacity":
        return 2
    if mode == "n":
        return config.solver.n
    return 1


def feasibility_section(
    config: ScenarioConfig, z_eps: float, seed: int
) -> FeasibilitySection:
    p = config.params
    n = config.quantile.n_samples
    margin = config.checks.margin
    reachable = check_target_reachable(p, n, seed, margin)
    baseline = do_nothing_report(p, k=1, n_samples=n, seed=seed)
    threshold = min(1.0, margin * p.epsilon)
    exceeds = CheckResult(
        prob=baseline.violation_prob,
        satisfied=baseline.violation_prob >= threshold,
        threshold=threshold,
        name="do_nothing_exceeds",
    )
    dominance = check_dv_condition(p, _n_interventions(config), n, seed, config.checks.tol_dv)
    return FeasibilitySection(
        target_reachable=reachable,
        do_nothing_exceeds=exceeds,
        demand_dominance=dominance,
        quantile_ok=check_quantile_condition(z_eps, p.T, p.xi_M),
        z_over_T=z_eps / p.T,
    )


def _solve_analytic(config: ScenarioConfig, z_eps: float) -> Solution:
    mode = config.solver.mode
    p = config.params
    if mode == "two":
        return solve_two_interventions(z_eps, p)
    if mode == "n":
        return solve_n_interventions(z_eps, config.solver.n, p)
    if mode == "total_capacity":
        return solve_total_capacity(z_eps, config.solver.xi_tot, p)
    return solve_one_intervention(z_eps, p)


def _solve_numeric(config: ScenarioConfig, z_eps: float) -> Solution:
    mode = config.solver.mode
    p = config.params
    if mode == "two":
        return grid_search_two(z_eps, p, config.grid)
    if mode == "n":
        return grid_search_n(z_eps, config.solver.n, p, config.grid)
    if mode == "total_capacity":
        return grid_search_two(z_eps, p, config.grid, xi_total=config.solver.xi_tot)
    return grid_search_one(z_eps, p, config.grid)


def _infeasibility_block(stage: str, reason: str, details: dict) -> dict:
    return {
        "stage": stage,
        "reason": reason,
        "hint": "the emission target L, threshold epsilon, and capacity cap xi_M "
        "must be realistic and mutually achievable",
        **details,
    }


def run_scenario(config: ScenarioConfig) -> RunReport:
    """Full pipeline for one scenario; aborts with a structured infeasibility
    block instead of solving when the targets are unachievable."""
    if config.solver.mode == "sweep":
        return sweep_rho(config)
    start = time.perf_counter()
    report = RunReport(scenario_id=config.scenario_id, config=config)
    seed_quant, seed_checks, seed_verify, _ = derive_seeds(config.quantile.seed, 4)

    try:
        report.z_eps = compute_quantile(config, seed_quant)
    except InfeasibleError as exc:
        report.infeasibility = _infeasibility_block("quantile", str(exc), exc.details)
        report.wall_time = time.perf_counter() - start
        return report
    except RenewplanError as exc:
        raise _stage("quantile", exc)

    try:
        report.feasibility = feasibility_section(config, report.z_eps.z, seed_checks)
    except RenewplanError as exc:
        raise _stage("feasibility", exc)

    feas = report.feasibility
    if not feas.target_reachable.satisfied or not feas.quantile_ok:
        reasons = []
        if not feas.target_reachable.satisfied:
            reasons.append(
                f"emission target is not binding enough: P(do-nothing emissions >= L) = "
                f"{feas.target_reachable.prob:g} < {feas.target_reachable.threshold:g}"
            )
        if not feas.quantile_ok:
            reasons.append(
                f"required capacity z_eps/T = {feas.z_over_T:g} exceeds xi_M = "
                f"{config.params.xi_M:g} (or z_eps <= 0)"
            )
        report.infeasibility = _infeasibility_block(
            "feasibility", "; ".join(reasons), {"z_eps": report.z_eps.z}
        )
        report.wall_time = time.perf_counter() - start
        return report

    try:
        report.analytic = _solve_analytic(config, report.z_eps.z)
        report.numeric = _solve_numeric(config, report.z_eps.z)
    except RenewplanError as exc:
        raise _stage("solve", exc)
    try:
        report.verification = verify_constraint(
            report.analytic.plan, config.params, config.quantile.n_samples, seed_verify
        )
    except RenewplanError as exc:
        raise _stage("verification", exc)

    report.wall_time = time.perf_counter() - start
    return report


def sweep_rho(config: ScenarioConfig) -> RunReport:
    """One solved row per discount rate, plus the plotting curve
    ``kappa * (z_eps/(T-t)) * exp(-rho t)`` on the time grid."""
    if not config.solver.rho_list:
        raise ConfigError("sweep requires solver.rho_list")
    start = time.perf_counter()
    report = RunReport(scenario_id=config.scenario_id, config=config)
    seed_quant, seed_checks, seed_verify, _ = derive_seeds(config.quantile.seed, 4)

    try:
        report.z_eps = compute_quantile(config, seed_quant)
    except InfeasibleError as exc:
        report.infeasibility = _infeasibility_block("quantile", str(exc), exc.details)
        report.wall_time = time.perf_counter() - start
        return report
    z = report.z_eps.z

    report.feasibility = feasibility_section(config, z, seed_checks)
    if not report.feasibility.target_reachable.satisfied or not report.feasibility.quantile_ok:
        report.infeasibility = _infeasibility_block(
            "feasibility",
            "sweep aborted: scenario infeasible independent of the discount rate",
            {"z_eps": z},
        )
        report.wall_time = time.perf_counter() - start
        return report

    p = config.params
    t_axis = config.grid.t_grid(p.T)
    t_axis = t_axis[t_axis < p.T]
    rows = []
    curve = []
    for rho in config.solver.rho_list:
        params_r = replace(p, rho=rho)
        analytic = solve_one_intervention(z, params_r)
        numeric = grid_search_one(z, params_r, config.grid)
        verification = verify_constraint(
            analytic.plan, params_r, config.quantile.n_samples, seed_verify
        )
        (t_hat, xi_hat), = analytic.plan.interventions
        rows.append(
            SweepRow(
                rho=rho,
                regime=analytic.regime,
                t_hat=t_hat,
                xi_hat=xi_hat,
                cost_analytic=analytic.cost,
                cost_numeric=numeric.cost,
                prob_estimate=verification.estimated_prob,
                prob_stderr=verification.std_error,
                feasible=True,
            )
        )
        xi_t = z / (p.T - t_axis)
        cost_t = p.kappa * xi_t * np.exp(-rho * t_axis)
        for t_k, c_k, f_k in zip(t_axis, cost_t, xi_t <= p.xi_M):
            curve.append((rho, float(t_k), float(c_k), bool(f_k)))

    report.sweep_rows = tuple(rows)
    report.cost_curve = tuple(curve)
    report.wall_time = time.perf_counter() - start
    return report


def simulate_paths(config: ScenarioConfig, n_paths: int | None = None) -> dict:
    """Path-simulate the configured plan with i.i.d. per-step redraws of (D, V).

    The per-path emission integral honors import emissions (e_I > 0); this is
    the only entry point that exercises them end to end.
    """
    if config.plan is None:
        raise ConfigError("simulate requires a [plan] section")
    p = config.params
    dt = config.simulate.dt
    n_steps = round(p.T / dt)
    if abs(n_steps * dt - p.T) > 1e-9 * max(1.0, p.T):
        raise ConfigError(f"simulate.dt = {dt:g} must divide the horizon T = {p.T:g}")
    paths = n_paths if n_paths is not None else config.simulate.n_paths
    _, _, _, seed_sim = derive_seeds(config.quantile.seed, 4)
    child = derive_seeds(seed_sim, 2 * paths)

    totals = np.empty(paths)
    for k in range(paths):
        d_path = sample(p.D, child[2 * k], n_steps).values
        v_path = sample(p.V, child[2 * k + 1], n_steps).values
        totals[k] = accumulated_emissions_path(config.plan, d_path, v_path, p, dt).total
    return {
        "n_paths": paths,
        "n_steps": n_steps,
        "dt": dt,
        "mean_emissions": float(np.mean(totals)),
        "std_emissions": float(np.std(totals)),
        "violation_prob": float(np.mean(totals > p.L)),
        "target_L": p.L,
    }


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))  # shortest round-trip decimal
    return str(value)


def _single_intervention(sol: Solution | None) -> tuple[float | None, float | None]:
    if sol is None or len(sol.plan.interventions) != 1:
        return None, None
    (t, xi), = sol.plan.interventions
    return t, xi


def _csv_rows(report: RunReport) -> list[list]:
    p = report.config.params
    z = report.z_eps.z if report.z_eps else None
    base = [report.scenario_id]
    if report.sweep_rows or (report.config.solver.mode == "sweep"):
        return [
            [
                report.scenario_id, row.rho, p.T, p.L, p.epsilon, p.xi_M, z,
                row.regime, row.t_hat, row.xi_hat, row.cost_analytic,
                row.cost_numeric, row.prob_estimate, row.prob_stderr, row.feasible,
            ]
            for row in report.sweep_rows
        ]
    feasible = report.infeasibility is None
    t_hat, xi_hat = _single_intervention(report.analytic)
    return [
        base
        + [
            p.rho, p.T, p.L, p.epsilon, p.xi_M, z,
            report.analytic.regime if report.analytic else None,
            t_hat, xi_hat,
            report.analytic.cost if report.analytic else None,
            report.numeric.cost if report.numeric else None,
            report.verification.estimated_prob if report.verification else None,
            report.verification.std_error if report.verification else None,
            feasible,
        ]
    ]


def _jsonable(obj):
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: _jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, Path):
        return str(obj)
    return obj


def report_to_json(report: RunReport) -> str:
    """JSON mirror of the report; the volatile wall time is omitted so the
    output is byte-deterministic for a fixed config and seed."""
    data = _jsonable(report)
    data.pop("wall_time", None)
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def emit_report(report: RunReport, format: str, path: str | Path) -> Path:
    """Write the report; CSV columns are documented and stable.

    Sweep runs additionally write the plotting curve next to a CSV report,
    with the suffix ``.curve.csv``.
    """
    path = Path(path)
    try:
        if format == "json":
            path.write_text(report_to_json(report))
            return path
        if format != "csv":
            raise ConfigError("output format must be 'csv' or 'json'")
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(CSV_COLUMNS)
            for row in _csv_rows(report):
                writer.writerow([_fmt(v) for v in row])
        if report.cost_curve:
            curve_path = path.with_suffix(".curve.csv")
            with open(curve_path, "w", newline="") as fh:
                writer = csv.writer(fh, lineterminator="\n")
                writer.writerow(CURVE_COLUMNS)
                for point in report.cost_curve:
                    writer.writerow([_fmt(v) for v in point])
        return path
    except OSError as exc:
        raise ConfigError(f"cannot write report to {path}: {exc}") from exc
