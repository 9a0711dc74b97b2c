"""renewplan: cost-minimal renewable capacity expansion under a
probabilistic emissions constraint.

Analytic single/two/N-intervention solutions, brute-force grid-search
verification, Monte Carlo quantile estimation, and a config-driven runner.
"""

from .config import ScenarioConfig, load_scenario
from .costs import (
    CostBreakdown,
    DoNothingReport,
    PenaltySpec,
    do_nothing_report,
    installation_cost,
    objective_penalty_form,
    operational_cost,
)
from .energy import (
    CapacityPlan,
    EmissionsResult,
    ScenarioParams,
    accumulated_emissions_path,
    dispatch_fossil,
    emission_rate,
    emissions_closed_form,
    emissions_exact,
    emissions_partials,
    renewable_production,
)
from .errors import (
    ConfigError,
    InfeasibleError,
    InputError,
    ModelAssumptionError,
    NumericalError,
    ParameterError,
    RenewplanError,
    UnsupportedRegimeError,
)
from .feasibility import (
    CheckResult,
    check_do_nothing_exceeds,
    check_dv_condition,
    check_quantile_condition,
    check_target_reachable,
    feasible_xi_bisection,
)
from .gridsearch import (
    GridSpec,
    VerificationReport,
    grid_search_n,
    grid_search_one,
    grid_search_two,
    verify_constraint,
)
from .runner import (
    RunReport,
    SweepRow,
    emit_report,
    run_scenario,
    simulate_paths,
    sweep_rho,
)
from .solver import (
    Solution,
    classify_regime,
    solve_n_interventions,
    solve_one_intervention,
    solve_sequential,
    solve_total_capacity,
    solve_two_interventions,
)
from .stochastic import (
    QuantileResult,
    RandomVariable,
    SampleBatch,
    SamplingConfig,
    sample,
    sample_pair,
    upper_quantile_mc,
    z_epsilon_oracle,
)

__version__ = "0.1.0"
