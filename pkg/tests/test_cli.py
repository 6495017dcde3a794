import json

import pytest
import yaml
from typer.testing import CliRunner

from cli.main import app
from cli.utils.validation import ExitCode

from tests.conftest import CONFIG_DIR

cli = CliRunner()


def test_verify_all_bundled_scenarios():
    result = cli.invoke(app, ["verify-spacetime", "--all"])
    assert result.exit_code == ExitCode.OK, result.output
    assert "FAIL" not in result.output


def test_verify_unknown_scenario_is_a_schema_error():
    result = cli.invoke(app, ["verify-spacetime", "mars-I"])
    assert result.exit_code == ExitCode.SCHEMA


def test_verify_custom_scenario(tmp_path):
    data = yaml.safe_load((CONFIG_DIR / "scenarios" / "example-lab.yaml").read_text())
    good = tmp_path / "lab.yaml"
    good.write_text(yaml.safe_dump(data))
    assert cli.invoke(app, ["verify-spacetime", "--scenario", str(good)]).exit_code == ExitCode.OK

    data["expected"][1]["relation"] = "before"
    bad = tmp_path / "lab-bad.yaml"
    bad.write_text(yaml.safe_dump(data))
    report = tmp_path / "verify.json"
    result = cli.invoke(app, ["verify-spacetime", "--scenario", str(bad), "--out", str(report)])
    assert result.exit_code == ExitCode.VERIFICATION
    assert json.loads(report.read_text())["reports"][0]["passed"] is False


def test_config_without_seed_is_rejected(tmp_path):
    data = yaml.safe_load((CONFIG_DIR / "vienna-II.yaml").read_text())
    del data["seed"]
    path = tmp_path / "no-seed.yaml"
    path.write_text(yaml.safe_dump(data))
    result = cli.invoke(app, ["simulate", "--config", str(path), "--out", str(tmp_path / "run")])
    assert result.exit_code == ExitCode.SCHEMA
    assert "seed" in result.output


def test_analyze_missing_run_directory(tmp_path):
    result = cli.invoke(app, ["analyze", str(tmp_path / "nowhere")])
    assert result.exit_code == ExitCode.SCHEMA


@pytest.fixture(scope="module")
def simulated_run(tmp_path_factory):
    run_dir = tmp_path_factory.mktemp("runs") / "vienna"
    result = cli.invoke(
        app,
        [
            "simulate", "--config", str(CONFIG_DIR / "vienna-II.yaml"), "--out", str(run_dir),
            "--steps", "8", "--dwell", "1.0", "--blocking-dwell", "2.0",
        ],
    )
    assert result.exit_code == ExitCode.OK, result.output
    return run_dir


def test_simulate_writes_manifest_and_streams(simulated_run):
    manifest = json.loads((simulated_run / "manifest.json").read_text())
    assert manifest["seed"] == 20121105
    assert set(manifest["runs"]) == {"scan", "blocked-a", "blocked-b"}
    assert manifest["runs"]["blocked-a"]["blocked"] == "path-a"
    for name in manifest["runs"]:
        assert (simulated_run / name / "system.tags").is_file()
        assert (simulated_run / name / "environment.tags").is_file()


def test_analyze_then_report(simulated_run, tmp_path):
    result = cli.invoke(app, ["analyze", str(simulated_run)])
    assert result.exit_code == ExitCode.OK, result.output
    report = json.loads((simulated_run / "report.json").read_text())
    assert report["scan"]["offset_ps"] == pytest.approx(
        json.loads((simulated_run / "manifest.json").read_text())["nominal_offset_ps"], abs=200
    )
    assert 0.8 < report["v"]["value"] <= 1.05
    assert report["i"]["value"] > 0.9
    assert (simulated_run / "fringes.svg").is_file()
    assert (simulated_run / "coincidences.csv").is_file()

    pdf = tmp_path / "report.pdf"
    result = cli.invoke(app, ["report", str(simulated_run / "report.json"), "--output", str(pdf)])
    assert result.exit_code == ExitCode.OK, result.output
    assert pdf.read_bytes().startswith(b"%PDF")


def test_analyze_stream_pair_with_explicit_offset(simulated_run, tmp_path):
    manifest = json.loads((simulated_run / "manifest.json").read_text())
    result = cli.invoke(
        app,
        [
            "analyze",
            "--system", str(simulated_run / "scan" / "system.tags"),
            "--environment", str(simulated_run / "scan" / "environment.tags"),
            "--offset-ps", str(manifest["nominal_offset_ps"]),
            "--out", str(tmp_path / "pair"),
        ],
    )
    assert result.exit_code == ExitCode.OK, result.output
    report = json.loads((tmp_path / "pair" / "report.json").read_text())
    assert report["i"] is None
    assert report["scan"]["offset_ps"] == manifest["nominal_offset_ps"]


def test_rerun_from_manifest_is_byte_identical(tmp_path):
    first = tmp_path / "first"
    args = ["--steps", "2", "--dwell", "0.2", "--blocking-dwell", "0.2"]
    result = cli.invoke(app, ["simulate", "--config", str(CONFIG_DIR / "vienna-II.yaml"), "--out", str(first), *args])
    assert result.exit_code == ExitCode.OK, result.output
    second = tmp_path / "second"
    result = cli.invoke(app, ["simulate", "--config", str(first / "manifest.json"), "--out", str(second)])
    assert result.exit_code == ExitCode.OK, result.output
    for name in ("scan/system.tags", "scan/environment.tags", "blocked-a/environment.tags", "manifest.json"):
        assert (first / name).read_bytes() == (second / name).read_bytes()
