import pytest

from renewplan import load_scenario
from renewplan.errors import ConfigError
from renewplan.stochastic import MONTE_CARLO

MINIMAL = """
[params]
T = 30.0
rho = 0.05
kappa = 1.0
e_F = 0.7
C_F = 2000.0
L = 13125.0
epsilon = 0.2
xi_M = 2000.0
D = { uniform = [1000.0, 1500.0] }
V = { uniform = [0.5, 1.0] }
"""


def write(tmp_path, text, name="scenario.toml"):
    path = tmp_path / name
    path.write_text(text)
    return path


def test_minimal_config_gets_defaults(tmp_path):
    cfg = load_scenario(write(tmp_path, MINIMAL))
    assert cfg.quantile.method == MONTE_CARLO
    assert cfg.quantile.n_samples == 10**6
    assert cfg.quantile.seed == 0
    assert cfg.checks.margin == 10.0
    assert cfg.checks.tol_dv == 1e-3
    assert cfg.solver.mode == "one"
    assert cfg.grid.t_points == 3001 and cfg.grid.xi_points == 101
    assert cfg.plan is None
    assert cfg.scenario_id == "scenario"
    assert cfg.params.D.kind == "uniform"


def test_epsilon_out_of_range(tmp_path):
    bad = MINIMAL.replace("epsilon = 0.2", "epsilon = 1.5")
    with pytest.raises(ConfigError, match=r"epsilon must lie in \(0,1\)"):
        load_scenario(write(tmp_path, bad))


def test_sweep_without_rho_list(tmp_path):
    bad = MINIMAL + "\n[solver]\nmode = \"sweep\"\n"
    with pytest.raises(ConfigError, match="rho_list"):
        load_scenario(write(tmp_path, bad))


def test_mode_n_requires_n(tmp_path):
    bad = MINIMAL + "\n[solver]\nmode = \"n\"\n"
    with pytest.raises(ConfigError, match="solver.n"):
        load_scenario(write(tmp_path, bad))


def test_unknown_key_rejected(tmp_path):
    bad = MINIMAL + "discount = 0.05\n"
    with pytest.raises(ConfigError, match="unknown key.*discount"):
        load_scenario(write(tmp_path, bad))


def test_unknown_section_rejected(tmp_path):
    bad = MINIMAL + "\n[plots]\nstyle = \"fancy\"\n"
    with pytest.raises(ConfigError, match="unknown section"):
        load_scenario(write(tmp_path, bad))


def test_missing_params_key(tmp_path):
    bad = MINIMAL.replace("xi_M = 2000.0\n", "")
    with pytest.raises(ConfigError, match="missing required key.*xi_M"):
        load_scenario(write(tmp_path, bad))


def test_toml_syntax_error_reports_location(tmp_path):
    with pytest.raises(ConfigError, match="line"):
        load_scenario(write(tmp_path, "[params\nT = 30"))


def test_missing_file():
    with pytest.raises(ConfigError, match="not found"):
        load_scenario("/nonexistent/scenario.toml")


def test_random_variable_forms(tmp_path):
    text = MINIMAL.replace(
        "D = { uniform = [1000.0, 1500.0] }", "D = 1250.0"
    ).replace(
        "V = { uniform = [0.5, 1.0] }", "V = { empirical = [0.5, 0.6, 0.7] }"
    )
    cfg = load_scenario(write(tmp_path, text))
    assert cfg.params.D.kind == "constant" and cfg.params.D.value == 1250.0
    assert cfg.params.V.kind == "empirical" and cfg.params.V.values == (0.5, 0.6, 0.7)


def test_random_variable_bad_spec(tmp_path):
    bad = MINIMAL.replace(
        "D = { uniform = [1000.0, 1500.0] }", "D = { normal = [0.0, 1.0] }"
    )
    with pytest.raises(ConfigError, match="params.D"):
        load_scenario(write(tmp_path, bad))


def test_plan_section(tmp_path):
    text = MINIMAL + "\n[plan]\ntimes = [10.0]\nsizes = [300.0]\n"
    cfg = load_scenario(write(tmp_path, text))
    assert cfg.plan.interventions == ((10.0, 300.0),)

    bad = MINIMAL + "\n[plan]\ntimes = [10.0, 20.0]\nsizes = [300.0]\n"
    with pytest.raises(ConfigError, match="equal length"):
        load_scenario(write(tmp_path, bad))


def test_bad_grid(tmp_path):
    bad = MINIMAL + "\n[grid]\nt_points = 1\n"
    with pytest.raises(ConfigError, match="grid"):
        load_scenario(write(tmp_path, bad))


def test_bad_quantile_method(tmp_path):
    bad = MINIMAL + "\n[quantile]\nmethod = \"bootstrap\"\n"
    with pytest.raises(ConfigError, match="quantile.method"):
        load_scenario(write(tmp_path, bad))
