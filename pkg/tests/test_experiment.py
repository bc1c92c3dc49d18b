import json

import pytest

from polyspace.asymptotics import run_experiment
from polyspace.errors import ConfigInvalid, IOFailure
from polyspace.experiment import (
    Check,
    ExperimentConfig,
    ExperimentResult,
    load_config,
    parse_config_text,
)
from polyspace.stochastic import UNIFORM01

CLT_TEXT = """\
# stopping-time CLT
experiment = clt_tau
model = uniform:0,1
n_grid = 100, 200 400
n_samples = 500
seed = 7
chunk_size = 256
tol.ks_max = 0.5
tol.var_rel = 0.5
"""


def test_parse_config():
    config = parse_config_text(CLT_TEXT)
    assert config.experiment == "clt_tau"
    assert config.model == UNIFORM01
    assert config.n_grid == (100, 200, 400)
    assert config.tol("ks_max", 0.05) == 0.5
    assert config.tol("missing", 0.25) == 0.25


@pytest.mark.parametrize("text", [
    "experiment = clt_tau\nn_grid = 10\nn_samples = 10\n",
    "experiment = nonsense\nn_grid = 10\n",
    "experiment = clt_tau\nn_grid = 20, 10\n",
    "experiment = clt_tau\nn_grid = \n",
    "experiment = clt_tau\nn_grid = 2, 10\n",
    "experiment = clt_tau\nn_grid = 10\nbogus = 1\n",
    "experiment = clt_tau\nn_grid = 10\nn_samples = many\n",
    "experiment = clt_tau\nn_grid = 10\nmodel = gamma:2\n",
    "experiment = clt_tau\nn_grid = 10\nkind = hyperbolic\n",
    "n_grid = 10\n",
    "experiment clt_tau\n",
])
def test_invalid_configs(text):
    with pytest.raises(ConfigInvalid):
        parse_config_text(text)


def test_missing_file(tmp_path):
    with pytest.raises(IOFailure):
        load_config(tmp_path / "absent.cfg")


def test_snapshot_round_trip():
    config = parse_config_text(CLT_TEXT)
    assert ExperimentConfig.from_snapshot(config.snapshot()) == config


def test_check_evaluation():
    assert Check.evaluate("a", 0.01, "<", 0.05).passed
    assert not Check.evaluate("a", 0.05, "<", 0.05).passed
    assert Check.evaluate("a", 0.05, "<=", 0.05).passed
    assert not Check.evaluate("a", float("nan"), "<", 1).passed


def test_result_json_round_trip(tmp_path):
    result = run_experiment(parse_config_text(CLT_TEXT))
    text = result.to_json()
    back = ExperimentResult.from_json(text)
    assert back.to_json() == text
    assert back.payload() == result.payload()
    data = json.loads(text)
    assert data["schema_version"] == 1
    assert set(data) >= {"schema_version", "invocation", "seed", "results", "diagnostics", "pass"}


def test_result_schema_version_checked():
    result = run_experiment(parse_config_text(CLT_TEXT))
    data = json.loads(result.to_json())
    data["schema_version"] = 99
    with pytest.raises(ConfigInvalid):
        ExperimentResult.from_json(json.dumps(data))


def test_write_outputs(tmp_path):
    result = run_experiment(parse_config_text(CLT_TEXT))
    json_path, csv_path = result.write(tmp_path / "out" / "clt")
    assert json_path.name == "clt.json" and csv_path.name == "clt.csv"
    lines = csv_path.read_text().splitlines()
    assert lines[0] == "n,statistic,value,std_error"
    assert len(lines) == len(result.rows) + 1


def test_write_failure(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    result = run_experiment(parse_config_text(CLT_TEXT))
    with pytest.raises(IOFailure):
        result.write(blocker / "sub" / "clt")
