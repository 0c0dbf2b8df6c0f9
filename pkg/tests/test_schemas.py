# tests/test_schemas.py
import pytest
from pydantic import ValidationError

from GFRAG.critical_gf.schemas import CaseResult, Environment, GridSpec, RunConfig, VerificationReport


# --- Mallas ---

def test_log_grid_points():
    grid = GridSpec.parse("log:0.01:100:5")
    assert grid.kind == "log"
    assert [p.real for p in grid.points()] == pytest.approx([0.01, 0.1, 1.0, 10.0, 100.0], rel=1e-12)
    assert all(p.imag == 0.0 for p in grid.points())


def test_lin_grid_single_point():
    assert GridSpec.parse("lin:2:2:1").points() == [complex(2.0, 0.0)]


def test_vertical_line_grid():
    grid = GridSpec.parse("line:0.5:-1:1:3")
    assert grid.points() == [complex(0.5, -1.0), complex(0.5, 0.0), complex(0.5, 1.0)]


@pytest.mark.parametrize("text", ["log:0:1:5", "lin:1:0.5:3", "cubic:1:2:3", "log:1:2", "log:a:2:3",
                                  "log:1:2:0", "lin:1:inf:3"])
def test_invalid_grids(text):
    with pytest.raises(ValueError):
        GridSpec.parse(text)


def test_line_grid_allows_negative_ordinates():
    # los extremos negativos sólo se prohíben en mallas reales
    assert GridSpec.parse("line:-0.5:-3:-1:2").s0 == -0.5


# --- RunConfig ---

def _config(**kwargs):
    base = {"command": "classify", "params": {"gamma": 1.0, "theta": 0.75}}
    base.update(kwargs)
    return RunConfig(**base)


def test_format_defaults():
    assert _config().format == "csv"
    assert _config(command="suite", suite="blowup").format == "json"
    assert _config(format="json").format == "json"


def test_grids_are_parsed_from_strings():
    config = _config(command="eval-density", t=0.5, x_grid="log:0.1:1:3")
    assert isinstance(config.x_grid, GridSpec)
    assert config.x_grid.n == 3


def test_unknown_fields_are_rejected():
    with pytest.raises(ValidationError):
        _config(colour="blue")


@pytest.mark.parametrize("params", [{"gamma": 0.0, "theta": 1.0}, {"gamma": 1.0, "theta": 0.0},
                                    {"gamma": float("nan"), "theta": 1.0}, {"gamma": 1.0}])
def test_invalid_params(params):
    with pytest.raises(ValidationError):
        RunConfig(command="classify", params=params)


@pytest.mark.parametrize("kwargs", [
    {"command": "eval-density", "x_grid": "log:0.1:1:3"},                       # falta t
    {"command": "eval-density", "t": 0.5},                                      # falta la malla
    {"command": "eval-density", "t": 0.5, "x_grid": "line:1:0:1:3"},
    {"command": "eval-mellin", "t": 0.5},
    {"command": "eval-mellin", "t": 1.5, "s_grid": "lin:0.5:1:3"},              # Ω requiere γt < 1
    {"command": "eval-mellin", "t": 0.5, "s_grid": "lin:0.5:1:3", "kind": "u"},
    {"command": "eval-mellin", "t": 0.5, "s_grid": "lin:0.5:1:3", "kind": "u2"},
    {"command": "moments", "r_values": [0.0]},
    {"command": "suite"},
    {"command": "suite", "suite": "unknown"},
    {"command": "classify", "t": -1.0},
])
def test_command_requirements(kwargs):
    with pytest.raises(ValidationError):
        _config(**kwargs)


def test_negative_gamma_time_window():
    params = {"gamma": -1.0, "theta": 2.0}
    assert RunConfig(command="scan-sign", params=params, t=0.3).t == 0.3
    with pytest.raises(ValidationError):
        RunConfig(command="scan-sign", params=params, t=1.5)
    with pytest.raises(ValidationError):
        RunConfig(command="moments", params=params)


# --- Reportes ---

def test_case_result_pass_must_match_measurement():
    ok = CaseResult(id="a", anchor="x", measured=1e-7, target=0.0, tol=1e-6, passed=True)
    assert ok.passed
    with pytest.raises(ValidationError):
        CaseResult(id="a", anchor="x", measured=1e-5, target=0.0, tol=1e-6, passed=True)
    with pytest.raises(ValidationError):
        CaseResult(id="a", anchor="x", measured=1e-5, bound=1e-6, passed=True)


def test_case_result_error_cannot_pass():
    failed = CaseResult(id="a", anchor="x", bound=1e-6, passed=False, error="NonConvergence: ...")
    assert failed.measured is None
    with pytest.raises(ValidationError):
        CaseResult(id="a", anchor="x", bound=1e-6, passed=True, error="NonConvergence: ...")


def test_case_result_serializes_pass_alias():
    case = CaseResult(id="a", anchor="x", measured=0.5, bound=1.0, passed=True)
    assert case.model_dump(by_alias=True)["pass"] is True
    assert CaseResult.model_validate({"id": "a", "anchor": "x", "measured": 0.5, "bound": 1.0, "pass": True}).passed


def test_report_needs_cases():
    with pytest.raises(ValidationError):
        VerificationReport(suite="blowup", cases=[], environment=Environment(seed=1))
