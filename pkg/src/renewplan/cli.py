"""Command-line interface.

Subcommands: solve, sweep, verify, check, simulate. Exit codes: 0 success,
2 configuration error, 3 infeasible targets, 4 internal numerical failure.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import sys

from .config import ScenarioConfig, load_scenario
from .errors import ConfigError, InfeasibleError, RenewplanError
from .gridsearch import verify_constraint
from .runner import (
    RunReport,
    _jsonable,
    compute_quantile,
    emit_report,
    feasibility_section,
    run_scenario,
    simulate_paths,
    sweep_rho,
)
from .stochastic import derive_seeds

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INFEASIBLE = 3
EXIT_NUMERICAL = 4


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="renewplan",
        description="Cost-minimal renewable capacity expansion under a "
        "probabilistic emissions constraint.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    commands = {
        "solve": "solve one scenario end to end and verify the constraint",
        "sweep": "solve across a list of discount rates",
        "verify": "Monte Carlo check of the configured plan's constraint",
        "check": "run the feasibility checks only",
        "simulate": "path-simulate the configured plan",
    }
    for name, help_text in commands.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="scenario TOML file")
        p.add_argument("--seed", type=int, default=None, help="override the master seed")
        p.add_argument("--samples", type=int, default=None, help="override the sample count")
        p.add_argument("--out", default=None, help="report output path (.csv or .json)")
    return parser


def _apply_overrides(config: ScenarioConfig, args) -> ScenarioConfig:
    quantile = config.quantile
    if args.seed is not None:
        quantile = dataclasses.replace(quantile, seed=args.seed)
    if args.samples is not None:
        quantile = dataclasses.replace(quantile, n_samples=args.samples)
    output = config.output
    if args.out is not None:
        output = dataclasses.replace(output, path=args.out)
    return dataclasses.replace(config, quantile=quantile, output=output)


def _output_format(config: ScenarioConfig, out: str | None) -> str:
    if out is not None:
        if out.endswith(".json"):
            return "json"
        if out.endswith(".csv"):
            return "csv"
    return config.output.format


def _emit(report: RunReport, config: ScenarioConfig) -> None:
    out = config.output.path
    if out is not None:
        emit_report(report, _output_format(config, out), out)


def _print_infeasible(report: RunReport) -> None:
    block = {"infeasible": report.infeasibility}
    if report.z_eps is not None:
        block["z_eps"] = _jsonable(report.z_eps)
    if report.feasibility is not None:
        block["feasibility"] = _jsonable(report.feasibility)
    print(json.dumps(block, indent=2, sort_keys=True))


def _cmd_solve(config: ScenarioConfig, sweep: bool) -> int:
    report = sweep_rho(config) if sweep else run_scenario(config)
    _emit(report, config)
    if report.infeasibility is not None:
        _print_infeasible(report)
        return EXIT_INFEASIBLE
    if report.sweep_rows:
        for row in report.sweep_rows:
            print(
                f"rho={row.rho:g} regime={row.regime} t_hat={row.t_hat:g} "
                f"xi_hat={row.xi_hat:g} cost={row.cost_analytic:g} "
                f"constraint={row.prob_estimate:g}+-{row.prob_stderr:g}"
            )
        return EXIT_OK
    (t_hat, xi_hat), = report.analytic.plan.interventions
    v = report.verification
    print(f"z_eps = {report.z_eps.z:g} ({report.z_eps.method})")
    print(
        f"analytic: regime={report.analytic.regime} t_hat={t_hat:g} "
        f"xi_hat={xi_hat:g} cost={report.analytic.cost:g}"
    )
    print(f"numeric grid: cost={report.numeric.cost:g}")
    print(
        f"constraint: {v.estimated_prob:g} +- {v.std_error:g} "
        f"(target {v.target_eps:g}) {'PASS' if v.passed else 'FAIL'}"
    )
    return EXIT_OK


def _cmd_verify(config: ScenarioConfig) -> int:
    if config.plan is None:
        raise ConfigError("verify requires a [plan] section in the config")
    _, _, seed_verify, _ = derive_seeds(config.quantile.seed, 4)
    rep = verify_constraint(
        config.plan, config.params, config.quantile.n_samples, seed_verify
    )
    print(json.dumps(_jsonable(rep), indent=2, sort_keys=True))
    return EXIT_OK


def _cmd_check(config: ScenarioConfig) -> int:
    seed_quant, seed_checks, _, _ = derive_seeds(config.quantile.seed, 4)
    z = compute_quantile(config, seed_quant)
    section = feasibility_section(config, z.z, seed_checks)
    print(json.dumps({"z_eps": _jsonable(z), "checks": _jsonable(section)}, indent=2, sort_keys=True))
    if not section.target_reachable.satisfied or not section.quantile_ok:
        return EXIT_INFEASIBLE
    return EXIT_OK


def _cmd_simulate(config: ScenarioConfig) -> int:
    result = simulate_paths(config)
    print(json.dumps(result, indent=2, sort_keys=True))
    return EXIT_OK


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        config = _apply_overrides(load_scenario(args.config), args)
        if args.command == "solve":
            return _cmd_solve(config, sweep=False)
        if args.command == "sweep":
            return _cmd_solve(config, sweep=True)
        if args.command == "verify":
            return _cmd_verify(config)
        if args.command == "check":
            return _cmd_check(config)
        return _cmd_simulate(config)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InfeasibleError as exc:
        print(json.dumps({"infeasible": {"reason": str(exc), **exc.details}}, indent=2, sort_keys=True))
        return EXIT_INFEASIBLE
    except RenewplanError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
