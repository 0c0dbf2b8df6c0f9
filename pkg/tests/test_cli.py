# tests/test_cli.py
import json
import logging
import math

import pytest

from GFRAG.critical_gf.errors import DegenerateConnection
from GFRAG.critical_gf.main import build_parser, main, merge_config, with_nudge
from GFRAG.critical_gf.schemas import RunConfig
from GFRAG.critical_gf.settings import NUDGE

MALTHUSIAN = ["--gamma", "1", "--theta", "0.75"]


@pytest.fixture(autouse=True)
def detach_console_handler():
    # el handler de consola queda atado al stderr capturado de cada prueba
    yield
    root = logging.getLogger("gfrag")
    for handler in list(root.handlers):
        if handler.get_name() == "gfrag-console":
            root.removeHandler(handler)


def _lines(text):
    return text.split("\r\n")[:-1]


# --- classify ---

def test_classify_csv(capsys):
    assert main(["classify", *MALTHUSIAN]) == 0
    header, row = _lines(capsys.readouterr().out)
    assert header.startswith("gamma,theta,sigma1_re,sigma1_im,sigma2_re,sigma2_im,malthusian")
    cells = row.split(",")
    assert cells[:7] == ["1", "0.75", "0.5", "0", "1.5", "0", "true"]
    assert cells[-1] == "GlobalNonneg"


def test_classify_json(capsys):
    assert main(["classify", "--gamma", "-1", "--theta", "2", "--format", "json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["expected_behavior"] == "NoLocalNonneg"
    assert data["sigma2"] == {"re": 1.0, "im": 1.0}
    assert data["nu"] is None


# --- errores de entrada ---

def test_invalid_parameters_exit_one(capsys):
    assert main(["classify", "--gamma", "0", "--theta", "1"]) == 1
    assert "[ERROR CONFIG]" in capsys.readouterr().err


def test_usage_errors_exit_one(capsys):
    with pytest.raises(SystemExit) as excinfo:
        main(["classify", "--gamma", "uno"])
    assert excinfo.value.code == 1
    with pytest.raises(SystemExit) as excinfo:
        main([])
    assert excinfo.value.code == 1


def test_missing_config_file(tmp_path, capsys):
    assert main(["classify", "--config", str(tmp_path / "missing.toml")]) == 1
    assert "no existe" in capsys.readouterr().err


def test_eval_density_requires_time(capsys):
    assert main(["eval-density", *MALTHUSIAN, "--x-grid", "lin:0.5:2:4"]) == 1


# --- configuración TOML ---

def test_config_file_and_override(tmp_path, capsys):
    path = tmp_path / "run.toml"
    path.write_text('gamma = 1.0\ntheta = 0.75\nformat = "json"\n')
    assert main(["classify", "--config", str(path)]) == 0
    assert json.loads(capsys.readouterr().out)["expected_behavior"] == "GlobalNonneg"
    assert main(["classify", "--config", str(path), "--theta", "2"]) == 0
    assert json.loads(capsys.readouterr().out)["expected_behavior"] == "BlowupNoExtension"


def test_merge_config_prefers_command_line():
    args = build_parser().parse_args(["suite", "--name", "blowup", "--theta", "0.75", "--tol", "moment=0.05"])
    merged = merge_config(args, {"params": {"gamma": 2.0, "theta": 0.5}, "seed": 1,
                                 "tolerances": {"slope": 0.1}})
    assert merged["params"] == {"gamma": 2.0, "theta": 0.75}
    assert merged["seed"] == 1
    assert merged["suite"] == "blowup"
    assert merged["tolerances"] == {"slope": 0.1, "moment": 0.05}
    assert "nudge" not in merged


# --- tablas ---

def test_eval_density_to_file(tmp_path):
    out = tmp_path / "u.csv"
    assert main(["eval-density", *MALTHUSIAN, "--t", "0.5", "--x-grid", "lin:0.5:2:4", "--output", str(out)]) == 0
    with open(out, newline="") as handle:
        lines = _lines(handle.read())
    assert lines[0] == "x,density,atom,error"
    assert len(lines) == 5
    last = lines[-1].split(",")
    assert last[0] == "2"
    assert last[2] == "0.5"
    assert last[3] == ""
    assert sorted(p.name for p in tmp_path.iterdir()) == ["u.csv"]


def test_eval_mellin_reports_point_errors(capsys):
    assert main(["eval-mellin", *MALTHUSIAN, "--t", "0.5", "--s-grid", "line:0:-1:1:3", "--format", "json"]) == 0
    rows = json.loads(capsys.readouterr().out)["rows"]
    # s = 0 es un polo de Ω
    assert [r["error"] for r in rows] == [None, "PoleProximity", None]
    assert rows[1]["value_re"] is None
    assert rows[1]["s_re"] == 0.0
    assert math.isfinite(rows[2]["value_re"])


def test_moments_json(capsys):
    assert main(["moments", *MALTHUSIAN, "--r", "2", "--format", "json"]) == 0
    row = json.loads(capsys.readouterr().out)["rows"][0]
    assert row["law"] == "MomentBlowup"
    assert row["target"] == pytest.approx(16.0 / (3.0 * math.pi), rel=1e-12)
    assert row["relative_error"] < 1e-2


def test_scan_sign_json(capsys):
    args = ["scan-sign", "--gamma", "1", "--theta", "2", "--t", "2", "--x-grid", "log:0.1:1000:257", "--format", "json"]
    assert main(args) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["verdict"] == "Oscillates"
    assert report["sign_changes"]


# --- suites ---

@pytest.mark.slow
def test_suite_exit_codes(capsys):
    assert main(["suite", "--name", "large-x", *MALTHUSIAN]) == 0
    report = json.loads(capsys.readouterr().out)
    assert all(case["pass"] for case in report["cases"])
    assert main(["suite", "--name", "large-x", *MALTHUSIAN, "--tol", "slope=0", "--format", "csv"]) == 2
    assert capsys.readouterr().out.startswith("id,anchor,gamma,theta,measured,target,bound,tol,pass,error\r\n")


def test_unknown_tolerance_key_is_an_error(capsys):
    assert main(["suite", "--name", "large-x", *MALTHUSIAN, "--tol", "slop=0.1"]) == 1
    assert "DomainError" in capsys.readouterr().err


def _suite_bytes(tmp_path, name, args):
    out = tmp_path / name
    code = main(["suite", *args, "--output", str(out)])
    return code, out.read_bytes()


@pytest.mark.parametrize("fmt", ["json", "csv"])
def test_suite_rerun_is_byte_identical(tmp_path, monkeypatch, fmt):
    args = ["--name", "mellin-core", *MALTHUSIAN, "--seed", "5", "--format", fmt]
    first = _suite_bytes(tmp_path, f"first.{fmt}", args)
    # el orden de los casos no depende del número de hilos
    monkeypatch.setenv("GFRAG_THREADS", "3")
    second = _suite_bytes(tmp_path, f"second.{fmt}", args)
    assert first == second
    assert first[1]


@pytest.mark.slow
def test_seeded_suite_rerun_is_byte_identical(tmp_path):
    args = ["--name", "roundtrip", *MALTHUSIAN, "--seed", "9"]
    assert _suite_bytes(tmp_path, "a.json", args) == _suite_bytes(tmp_path, "b.json", args)
    other = _suite_bytes(tmp_path, "c.json", ["--name", "roundtrip", *MALTHUSIAN, "--seed", "10"])
    assert other[1] != _suite_bytes(tmp_path, "d.json", args)[1]


# --- desplazamiento de θ ---

def test_nudge_retries_with_shifted_theta():
    config = RunConfig(command="classify", params={"gamma": -1.0, "theta": 0.75}, nudge=True)
    seen = []

    def action(params):
        seen.append(params.theta)
        if len(seen) == 1:
            raise DegenerateConnection("test", 0.0)
        return params.theta

    assert with_nudge(config, action) == pytest.approx(0.75 + NUDGE)
    assert seen[0] == 0.75


def test_nudge_is_on_by_default():
    assert RunConfig(command="classify", params={"gamma": 1.0, "theta": 0.75}).nudge
    args = build_parser().parse_args(["classify", "--no-nudge"])
    assert merge_config(args, {"nudge": True})["nudge"] is False


def test_without_nudge_degenerate_connection_propagates():
    config = RunConfig(command="classify", params={"gamma": -1.0, "theta": 0.75}, nudge=False)

    def action(params):
        raise DegenerateConnection("test", 0.0)

    with pytest.raises(DegenerateConnection):
        with_nudge(config, action)
