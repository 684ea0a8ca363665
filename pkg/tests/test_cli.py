"""Tests for the command line."""
import json

import pytest

from fblab import __main__ as cli
from fblab.__main__ import EXIT_CONFIG, EXIT_FAILED, EXIT_INCONCLUSIVE, EXIT_OK, main
from fblab.schemas import Status
from fblab.utils.exceptions import ZeroCertificationError
from fblab.verify import suites
from fblab.verify.baselines import load_baselines, save_baselines
from fblab.verify.checks import Check, Outcome


def run(argv):
    with pytest.raises(SystemExit) as info:
        main(argv)
    return info.value.code


@pytest.fixture(autouse=True)
def isolated(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    monkeypatch.setenv("HOME", str(tmp_path))
    monkeypatch.setenv("FBLAB_THREADS", "1")


def fake_suite(monkeypatch, status):
    monkeypatch.setitem(suites.SUITES, "zeros", lambda ctx: [Check("zeros.fake", "fake", lambda: Outcome(status))])


def test_zeros_csv(capsys):
    assert run(["zeros", "--nu", "0.5", "--count", "3", "--format", "csv"]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("#")
    assert lines[1] == "n,zero,lower,upper"
    assert float(lines[2].split(",")[1]) == pytest.approx(3.141592653589793, abs=1e-12)


def test_eval_json(capsys):
    assert run(["eval", "--nu", "0", "--index", "1", "2", "--grid", "4"]) == EXIT_OK
    document = json.loads(capsys.readouterr().out)
    assert document["columns"] == ["x", "n=1", "n=2"]
    assert len(document["rows"]) == 4
    assert [row[1] for row in document["rows"]] == pytest.approx([1.0] * 4)


def test_expand_csv(tmp_path):
    out = tmp_path / "coeffs.csv"
    assert run(["expand", "--nu", "0", "--function", "bump", "--count", "6", "--format", "csv", "--output", str(out)]) == EXIT_OK
    assert len(out.read_text(encoding="utf-8").splitlines()) == 8


def test_heat_dump(capsys):
    assert run(["heat", "--nu", "0", "--t", "0.1", "--grid", "3"]) == EXIT_OK
    document = json.loads(capsys.readouterr().out)
    assert document["kind"] == "heat"
    assert len(document["rows"]) == 9


def test_green_dump(capsys):
    assert run(["green", "--nu", "0", "--grid", "3"]) == EXIT_OK
    document = json.loads(capsys.readouterr().out)
    assert document["setting"] == "lebesgue"
    assert all(row[2] > 0 for row in document["rows"])


def test_potential_dump(capsys):
    assert run(["potential", "--nu", "0", "--sigma", "0.5", "--count", "8", "--grid", "3"]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["metadata"]["sigma"] == 0.5


def test_riesz_probe(capsys):
    assert run(["riesz", "--nu", "0", "--variant", "probabilistic", "--samples", "3", "--count", "4", "--seed", "2"]) == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert report["setting"] == "essential-prob"
    assert report["seed"] == 2


def test_sobolev_diagnostic(capsys):
    assert run(["sobolev", "--nu", "0", "--diagnostic", "bump"]) == EXIT_OK
    assert len(json.loads(capsys.readouterr().out)["entries"]) == 4


def test_config_file_supplies_run_values(tmp_path, capsys):
    path = tmp_path / "run.yaml"
    path.write_text("nu: 0.5\nformat: csv\n", encoding="utf-8")
    assert run(["zeros", "--config", str(path), "--count", "2"]) == EXIT_OK
    assert capsys.readouterr().out.splitlines()[1] == "n,zero,lower,upper"


def test_invalid_parameters_exit_two():
    assert run(["zeros", "--nu", "-2"]) == EXIT_CONFIG
    assert run(["zeros", "--config", "missing.yaml", "--nu", "0"]) == EXIT_CONFIG


def test_verify_writes_report(tmp_path, monkeypatch, capsys):
    fake_suite(monkeypatch, Status.PASS)
    out = tmp_path / "report.json"
    assert run(["verify", "--suite", "zeros", "--seed", "4", "--output", str(out)]) == EXIT_OK
    assert "seed: 4" in capsys.readouterr().out
    report = json.loads(out.read_text(encoding="utf-8"))
    assert report["seed"] == 4
    assert report["results"][0]["check_id"] == "zeros.fake"


def test_verify_failure_exit_code(monkeypatch):
    fake_suite(monkeypatch, Status.FAIL)
    assert run(["verify", "--suite", "zeros"]) == EXIT_FAILED


def test_verify_inconclusive_under_strict(monkeypatch):
    fake_suite(monkeypatch, Status.INCONCLUSIVE)
    assert run(["verify", "--suite", "zeros"]) == EXIT_OK
    assert run(["verify", "--suite", "zeros", "--strict"]) == EXIT_INCONCLUSIVE


def test_update_baselines(tmp_path, monkeypatch):
    fake_suite(monkeypatch, Status.PASS)
    path = tmp_path / "baselines.yaml"
    save_baselines(load_baselines(), str(path))
    assert run(["verify", "--suite", "zeros", "--baselines", str(path), "--update-baselines"]) == EXIT_OK
    assert load_baselines(str(path)) == load_baselines()


def test_non_mapping_config_exits_two(tmp_path):
    path = tmp_path / "list.yaml"
    path.write_text("- 1\n- 2\n", encoding="utf-8")
    assert run(["zeros", "--config", str(path), "--nu", "0"]) == EXIT_CONFIG


def test_certification_failure_exit_code(monkeypatch):
    def broken(*args, **kwargs):
        raise ZeroCertificationError("no sign change", index=3)

    monkeypatch.setattr(cli, "compute_zeros", broken)
    assert run(["zeros", "--nu", "0"]) == EXIT_FAILED
