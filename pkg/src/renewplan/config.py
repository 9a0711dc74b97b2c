"""Scenario configuration: TOML schema, validation, and defaults.

See README.md for the documented schema. Every section except ``[params]``
is optional; defaults are seed=0, n_samples=10^6, margin=10, tol_dv=1e-3.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

try:  # Python 3.11+
    import tomllib
except ModuleNotFoundError:  # pragma: no cover
    import tomli as tomllib

from .energy import CapacityPlan, ScenarioParams
from .errors import ConfigError, ParameterError
from .gridsearch import GridSpec
from .stochastic import MONTE_CARLO, QUADRATURE_ORACLE, RandomVariable

MODES = ("one", "two", "n", "total_capacity", "sweep")


@dataclass(frozen=True)
class QuantileConfig:
    method: str = MONTE_CARLO
    n_samples: int = 10**6
    seed: int = 0


@dataclass(frozen=True)
class SolverConfig:
    mode: str = "one"
    n: int | None = None
    xi_tot: float | None = None
    rho_list: tuple[float, ...] | None = None


@dataclass(frozen=True)
class CheckConfig:
    margin: float = 10.0
    tol_dv: float = 1e-3


@dataclass(frozen=True)
class SimulateConfig:
    dt: float = 0.1
    n_paths: int = 200


@dataclass(frozen=True)
class OutputConfig:
    format: str = "csv"
    path: str | None = None


@dataclass(frozen=True)
class ScenarioConfig:
    params: ScenarioParams
    quantile: QuantileConfig = QuantileConfig()
    solver: SolverConfig = SolverConfig()
    grid: GridSpec = GridSpec()
    checks: CheckConfig = CheckConfig()
    simulate: SimulateConfig = SimulateConfig()
    output: OutputConfig = OutputConfig()
    plan: CapacityPlan | None = None
    scenario_id: str = "scenario"

    def __post_init__(self):
        s = self.solver
        if s.mode not in MODES:
            raise ConfigError(f"solver.mode must be one of {MODES}, got {s.mode!r}")
        if s.mode == "n" and (s.n is None or s.n < 1):
            raise ConfigError("solver.n is required (and >= 1) for mode = 'n'")
        if s.mode == "total_capacity" and (s.xi_tot is None or s.xi_tot <= 0):
            raise ConfigError("solver.xi_tot is required (and > 0) for mode = 'total_capacity'")
        if s.mode == "sweep" and not s.rho_list:
            raise ConfigError("solver.rho_list is required and non-empty for mode = 'sweep'")
        if self.quantile.method not in (MONTE_CARLO, QUADRATURE_ORACLE):
            raise ConfigError(
                f"quantile.method must be '{MONTE_CARLO}' or '{QUADRATURE_ORACLE}'"
            )
        if self.quantile.n_samples < 1:
            raise ConfigError("quantile.n_samples must be >= 1")
        if self.output.format not in ("csv", "json"):
            raise ConfigError("output.format must be 'csv' or 'json'")


def _rv_from_config(value, where: str) -> RandomVariable:
    try:
        if isinstance(value, (int, float)):
            return RandomVariable.constant(value)
        if isinstance(value, dict):
            if set(value) == {"uniform"}:
                lo, hi = value["uniform"]
                return RandomVariable.uniform(lo, hi)
            if set(value) == {"constant"}:
                return RandomVariable.constant(value["constant"])
            if set(value) == {"empirical"}:
                return RandomVariable.empirical(value["empirical"])
    except (ParameterError, TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: {exc}") from exc
    raise ConfigError(
        f"{where}: expected a number or one of {{uniform=[lo,hi], constant=v, empirical=[...]}}"
    )


def _take(section: dict, where: str, allowed: dict):
    """Pop known keys with defaults; reject anything unrecognized."""
    unknown = set(section) - set(allowed)
    if unknown:
        raise ConfigError(f"unknown key(s) in [{where}]: {', '.join(sorted(unknown))}")
    return {k: section.get(k, default) for k, default in allowed.items()}


def _build(data: dict, scenario_id: str) -> ScenarioConfig:
    if "params" not in data:
        raise ConfigError("missing required [params] section")
    unknown = set(data) - {"params", "quantile", "solver", "grid", "checks", "simulate", "output", "plan"}
    if unknown:
        raise ConfigError(f"unknown section(s): {', '.join(sorted(unknown))}")

    p = _take(
        data["params"],
        "params",
        {
            "T": None, "rho": None, "kappa": None, "e_F": None, "C_F": None,
            "L": None, "epsilon": None, "xi_M": None, "D": None, "V": None,
            "K_f": 0.0, "e_I": 0.0,
        },
    )
    missing = [k for k, v in p.items() if v is None]
    if missing:
        raise ConfigError(f"[params] missing required key(s): {', '.join(missing)}")
    p["D"] = _rv_from_config(p["D"], "params.D")
    p["V"] = _rv_from_config(p["V"], "params.V")
    try:
        params = ScenarioParams(**p)
    except ParameterError as exc:
        raise ConfigError(str(exc)) from exc

    q = _take(data.get("quantile", {}), "quantile", {"method": MONTE_CARLO, "n_samples": 10**6, "seed": 0})
    s = _take(data.get("solver", {}), "solver", {"mode": "one", "n": None, "xi_tot": None, "rho_list": None})
    if s["rho_list"] is not None:
        s["rho_list"] = tuple(float(r) for r in s["rho_list"])
    g = _take(data.get("grid", {}), "grid", {"t_points": 3001, "xi_points": 101})
    c = _take(data.get("checks", {}), "checks", {"margin": 10.0, "tol_dv": 1e-3})
    sim = _take(data.get("simulate", {}), "simulate", {"dt": 0.1, "n_paths": 200})
    o = _take(data.get("output", {}), "output", {"format": "csv", "path": None})

    plan = None
    if "plan" in data:
        pl = _take(data["plan"], "plan", {"times": None, "sizes": None, "initial_capacity": 0.0})
        if pl["times"] is None or pl["sizes"] is None:
            raise ConfigError("[plan] requires both times and sizes")
        if len(pl["times"]) != len(pl["sizes"]):
            raise ConfigError("[plan] times and sizes must have equal length")
        try:
            plan = CapacityPlan(tuple(zip(pl["times"], pl["sizes"])), pl["initial_capacity"])
        except ParameterError as exc:
            raise ConfigError(f"[plan]: {exc}") from exc

    try:
        grid = GridSpec(**g)
    except ParameterError as exc:
        raise ConfigError(f"[grid]: {exc}") from exc

    return ScenarioConfig(
        params=params,
        quantile=QuantileConfig(**q),
        solver=SolverConfig(**s),
        grid=grid,
        checks=CheckConfig(**c),
        simulate=SimulateConfig(**sim),
        output=OutputConfig(**o),
        plan=plan,
        scenario_id=scenario_id,
    )


def load_scenario(path: str | Path) -> ScenarioConfig:
    """Parse and validate a scenario TOML file."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return _build(data, scenario_id=path.stem)
