import csv
import io
import json

import pytest

from app.main import build_parser, main
from app.schemas.run import Command, OutputFormat
from app.schemas.state import FockState
from app.services import validation_service
from app.utils.cli_args import config_from_args


def _csv_body(text: str):
    lines = [line for line in text.splitlines() if not line.startswith("#")]
    return list(csv.reader(io.StringIO("\n".join(lines))))


def _comments(text: str) -> dict:
    return dict(
        line[2:].split("=", 1) for line in text.splitlines() if line.startswith("# ")
    )


def test_dist_csv(capsys):
    assert main(["dist", "--gamma", "1", "--nbar", "2", "--nmax", "10"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("# schema_version=1\n# command=dist\n")
    rows = _csv_body(out)
    assert rows[0] == ["n", "p_raw", "p_normalized", "s_abs2"]
    assert len(rows) == 12
    comments = _comments(out)
    assert comments["n_max"] == "10"
    assert comments["channel"] == "r"


def test_dist_json_to_file(tmp_path):
    out = tmp_path / "nested" / "dist.json"
    code = main(["dist", "--gamma", "2", "--delta", "1", "--nbar", "3",
                 "--channel", "l", "--format", "json", "--out", str(out)])
    assert code == 0
    payload = json.loads(out.read_text())
    assert payload["command"] == "dist"
    assert payload["params"]["gamma"] == 2.0
    assert payload["params"]["channel"] == "l"
    total = sum(row["p_normalized"] for row in payload["rows"])
    assert total == pytest.approx(1.0, abs=1e-10)


def test_output_is_deterministic(capsys):
    argv = ["joint", "--gamma", "1", "--delta", "0.5", "--nbar", "1", "--nmax", "6"]
    main(argv)
    first = capsys.readouterr().out
    main(argv)
    assert capsys.readouterr().out == first


@pytest.mark.parametrize("argv, flag", [
    (["dist", "--gamma", "-1", "--nbar", "2"], "--gamma"),
    (["dist", "--gamma", "1", "--nbar", "nan"], "--nbar"),
    (["dist", "--gamma", "1", "--nbar", "2", "--nmax", "many"], "--nmax"),
    (["sweep", "--gamma", "2:1:3", "--nbar", "1"], "--gamma"),
    (["continuum", "--state", "fock:2", "--T", "1.5"], "T must lie"),
    (["continuum", "--state", "thermal:2", "--T", "0.5"], "--state"),
    (["sweep", "--gamma", "1", "--nbar", "1", "--jobs", "0"], "--jobs"),
])
def test_invalid_parameters_exit_2(capsys, argv, flag):
    assert main(argv) == 2
    err = capsys.readouterr().err
    assert err.startswith("error: ")
    assert flag in err


def test_unnormalized_custom_state_exits_4(tmp_path, capsys):
    path = tmp_path / "state.json"
    path.write_text(json.dumps([[1.0, 0.0], [1.0, 0.0]]))
    assert main(["continuum", "--state", f"custom:{path}", "--T", "0.5"]) == 4
    assert "not normalized" in capsys.readouterr().err


@pytest.mark.parametrize("body", ["[[0.6, 0], [NaN, 0]]", "[[NaN, 0]]"])
def test_non_finite_custom_state_exits_4(tmp_path, capsys, body):
    path = tmp_path / "state.json"
    path.write_text(body)
    assert main(["continuum", "--state", f"custom:{path}", "--T", "0.5"]) == 4
    captured = capsys.readouterr()
    assert "non-finite" in captured.err
    assert captured.out == ""


def test_continuum_fock(capsys):
    assert main(["continuum", "--state", "fock:3", "--T", "0.5", "--nmax", "5", "--format", "json"]) == 0
    payload = json.loads(capsys.readouterr().out)
    probs = [row["p"] for row in payload["rows"]]
    assert probs[3] == pytest.approx(0.125)
    assert probs[0] == pytest.approx(0.875)
    assert payload["params"]["R"] == pytest.approx(0.5)


def test_continuum_squeezed_reports_both_forms(capsys):
    assert main(["continuum", "--state", "squeezed:0.5,0", "--T", "0.5", "--power", "1"]) == 0
    out = capsys.readouterr().out
    assert _csv_body(out)[0] == ["n", "p_closed_form", "p_general", "discrepancy"]
    assert float(_comments(out)["max_discrepancy"]) < 1e-10


def test_kernel_routes_at_origin(capsys):
    assert main(["kernel", "--gamma", "1", "--delta", "1", "--format", "json"]) == 0
    rows = json.loads(capsys.readouterr().out)["rows"]
    assert [row["route"] for row in rows] == ["trig", "roots", "series"]
    for row in rows:
        assert row["d_re"] == pytest.approx(1.0, abs=1e-12)
        assert row["d_im"] == pytest.approx(0.0, abs=1e-12)


def test_coeffs_table_and_marginal(capsys):
    assert main(["coeffs", "--gamma", "1", "--nmax", "4"]) == 0
    rows = _csv_body(capsys.readouterr().out)
    assert rows[0] == ["n", "m", "s_re", "s_im", "s_abs", "error_bound"]
    assert len(rows) == 1 + 15

    assert main(["coeffs", "--gamma", "1", "--nmax", "4", "--marginal", "--format", "json"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert len(payload["rows"]) == 5
    assert payload["rows"][0]["asymptotic_r"] is None
    assert payload["rows"][2]["asymptotic_r"] == pytest.approx(0.5403023058681398)


def test_oracle_route_matches_bessel_route(capsys):
    main(["coeffs", "--gamma", "1", "--delta", "0.5", "--nmax", "5", "--format", "json"])
    bessel = json.loads(capsys.readouterr().out)["rows"]
    main(["coeffs", "--gamma", "1", "--delta", "0.5", "--nmax", "5", "--route", "jet_oracle", "--format", "json"])
    oracle = json.loads(capsys.readouterr().out)["rows"]
    for a, b in zip(bessel, oracle):
        assert (a["n"], a["m"]) == (b["n"], b["m"])
        assert a["s_re"] == pytest.approx(b["s_re"], abs=1e-10)
        assert a["s_im"] == pytest.approx(b["s_im"], abs=1e-10)


def test_fcs_finite_and_continuum(capsys):
    assert main(["fcs", "--gamma", "1", "--nbar", "2", "--lambda-r", "0:3.141592653589793:3",
                 "--format", "json"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert len(payload["rows"]) == 3
    assert payload["rows"][0]["F_re"] == pytest.approx(1.0, abs=1e-12)
    assert "kappa_1_r" in payload["params"]

    assert main(["fcs", "--state", "fock:2", "--T", "0.5", "--lambda-r", "0", "--lambda-l", "0"]) == 0
    rows = _csv_body(capsys.readouterr().out)
    assert float(rows[1][2]) == pytest.approx(1.0)

    assert main(["fcs", "--state", "fock:2"]) == 2


def test_run_config_collects_shared_flags():
    parser = build_parser()
    config = config_from_args(parser.parse_args(
        ["dist", "--gamma", "2", "--delta", "1", "--nbar", "3", "--nmax", "12", "--format", "json"]
    ))
    assert config.command == Command.DIST
    assert (config.params.gamma, config.params.delta) == (2.0, 1.0)
    assert config.n_max == 12
    assert config.output_format == OutputFormat.JSON
    assert config.state is None and config.grid is None

    sweep = config_from_args(parser.parse_args(["sweep", "--gamma", "1:2:3", "--nbar", "1", "--jobs", "-1"]))
    assert sweep.grid.gamma_values == [1.0, 1.5, 2.0]
    assert sweep.jobs == -1
    assert sweep.params is None
    assert sweep.n_max is None

    continuum = config_from_args(parser.parse_args(["continuum", "--state", "fock:2", "--T", "0.5"]))
    assert continuum.state == FockState(n=2)


def test_sweep_summary(capsys):
    assert main(["sweep", "--gamma", "0:1:2", "--nbar", "1", "--nmax", "8", "--summary"]) == 0
    rows = _csv_body(capsys.readouterr().out)
    assert rows[0][:3] == ["gamma", "delta", "nbar"]
    assert [row[0] for row in rows[1:]] == ["0", "1"]


def test_sweep_distribution_rows_sorted(capsys):
    assert main(["sweep", "--gamma", "1", "--nbar", "2:1:2", "--nmax", "3"]) == 2
    assert main(["sweep", "--gamma", "1", "--nbar", "1:2:2", "--nmax", "3", "--jobs", "2"]) == 0
    rows = _csv_body(capsys.readouterr().out)[1:]
    assert len(rows) == 8
    assert [float(row[2]) for row in rows] == [1.0] * 4 + [2.0] * 4


def test_validate_perturbation_fails(monkeypatch, tmp_path, capsys):
    monkeypatch.setattr(validation_service, "CHECKS", [
        validation_service.check_c0_identity,
        validation_service.check_oracle_equivalence,
    ])
    report = tmp_path / "report.json"
    assert main(["validate", "--perturb-s", "1.0", "--json", str(report)]) == 5
    captured = capsys.readouterr()
    assert "oracle_equivalence" in captured.err
    assert "check,residual" in captured.out
    checks = {c["name"]: c for c in json.loads(report.read_text())["checks"]}
    assert checks["c0_identity"]["passed"]
    assert not checks["oracle_equivalence"]["passed"]


def test_validate_passes_unperturbed_subset(monkeypatch, capsys):
    monkeypatch.setattr(validation_service, "CHECKS", [
        validation_service.check_c0_identity,
        validation_service.check_continuum_laws,
    ])
    assert main(["validate"]) == 0
