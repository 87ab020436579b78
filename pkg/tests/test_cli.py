import json

import pytest

from condproc.cli import main
from condproc.config import ExperimentConfig, Report, load_config
from condproc.errors import ConfigError
from condproc.experiments import CRITERIA, SUITES, default_config


def test_registry_covers_every_criterion():
    assert sorted(CRITERIA) == list(range(1, 11))
    assert set(CRITERIA.values()) <= set(SUITES)
    assert len(SUITES) == 8


@pytest.mark.parametrize("field,value", [("alpha", -1.0), ("gamma", 0.5), ("n_paths", 0), ("lambdas", (0.1, 0.2)),
                                         ("escape_delta", 2.0)])
def test_config_validation(field, value):
    with pytest.raises(ConfigError) as exc:
        ExperimentConfig(**{field: value})
    assert exc.value.field == field


def test_load_config_rejects_unknown_key(tmp_path):
    p = tmp_path / "c.toml"
    p.write_text("bogus = 1\n")
    with pytest.raises(ConfigError):
        load_config(p)
    p.write_text("lambdas = [0.5, 0.1]\nn_paths = 10\n")
    assert load_config(p) == {"lambdas": (0.5, 0.1), "n_paths": 10}


def test_report_serialization():
    rep = Report("x", default_config("ou-h"))
    rep.add("a", 1.0, tolerance="< 2", passed=True, criterion=8)
    rep.add("b", 3.0)
    doc = json.loads(rep.to_json())
    assert doc["passed"] is True and doc["rows"][0]["criterion"] == 8
    assert rep.to_csv().splitlines()[0].startswith("experiment_id,statistic")


def test_cli_exit_codes(tmp_path, capsys):
    assert main(["bm-resolvent", "--quick", "--out", str(tmp_path / "r")]) == 0
    assert (tmp_path / "r" / "report.json").exists()
    bad = tmp_path / "bad.toml"
    bad.write_text("alpha = 3.0\n")
    assert main(["ctmc-verify", "--config", str(bad)]) == 2
    # the lambda -> 0 ladder misses its 0.01 target, so the suite exits 1
    assert main(["ctmc-verify", "--out", str(tmp_path / "c")]) == 1


def test_cli_is_deterministic(tmp_path):
    for d in ("a", "b"):
        main(["ou-h", "--paths", "500", "--seed", "3", "--out", str(tmp_path / d)])
    a = json.loads((tmp_path / "a" / "report.json").read_text())
    b = json.loads((tmp_path / "b" / "report.json").read_text())
    assert a["rows"] == b["rows"]
