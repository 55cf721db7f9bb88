import json

import numpy as np
import pytest
from click.testing import CliRunner
from fastapi.testclient import TestClient

from aifml.bridge import create_app
from aifml.cli import main
from aifml.dataio import save_dataset, demo_dataset, demo_system
from aifml.fml import parse_fml, serialize_fml
from aifml.inference import infer
from aifml.pso import PsoConfig, fitness_mse, pso_train

from test_fml import MINIMAL


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def demo_paths(tmp_path):
    system_path = tmp_path / "demo.fml"
    system_path.write_text(serialize_fml(demo_system()))
    data_path = tmp_path / "train.csv"
    data_path.write_text(save_dataset(demo_dataset()))
    return str(system_path), str(data_path)


def test_validate_ok(runner, demo_paths):
    result = runner.invoke(main, ["validate", "--system", demo_paths[0]])
    assert result.exit_code == 0
    assert result.output.strip() == "OK"


def test_validate_unordered_params(runner, tmp_path):
    bad = MINIMAL.replace('param1="20" param2="30" param3="40"',
                          'param1="30" param2="20" param3="40"')
    path = tmp_path / "bad.fml"
    path.write_text(bad)
    result = runner.invoke(main, ["validate", "--system", str(path)])
    assert result.exit_code == 1
    assert "a ≤ b ≤ c" in result.output


def test_validate_missing_file(runner):
    result = runner.invoke(main, ["validate", "--system", "/nonexistent.fml"])
    assert result.exit_code == 3


def test_infer_prints_output(runner, demo_paths, demo_sys):
    result = runner.invoke(main, ["infer", "--system", demo_paths[0],
                                  "--input", "temp=35", "--input", "humidity=80"])
    assert result.exit_code == 0
    expected = infer(demo_sys, {"temp": 35.0, "humidity": 80.0}).outputs["ac_level"]
    assert f"ac_level = {expected!r}" in result.output


def test_infer_json_matches_api(runner, demo_paths, demo_sys):
    result = runner.invoke(main, ["infer", "--system", demo_paths[0], "--json",
                                  "--input", "temp=35", "--input", "humidity=80"])
    assert result.exit_code == 0
    with TestClient(create_app(demo_sys)) as client:
        api = client.post("/infer", json={"temp": 35.0, "humidity": 80.0}).json()
    assert json.loads(result.output) == api


def test_infer_defaulted_flag(runner, tmp_path):
    path = tmp_path / "mini.fml"
    path.write_text(MINIMAL)
    result = runner.invoke(main, ["infer", "--system", str(path), "--input", "temp=0"])
    assert result.exit_code == 0
    assert "defaulted=true" in result.output
    assert "fan = 5.0" in result.output  # midpoint fallback


def test_infer_unknown_variable_usage_error(runner, demo_paths):
    result = runner.invoke(main, ["infer", "--system", demo_paths[0],
                                  "--input", "pressure=3"])
    assert result.exit_code == 2


def test_infer_missing_input_usage_error(runner, demo_paths):
    result = runner.invoke(main, ["infer", "--system", demo_paths[0],
                                  "--input", "temp=35"])
    assert result.exit_code == 2
    assert "humidity" in result.output


def test_train_writes_system_and_history(runner, demo_paths, tmp_path, demo_sys, demo_data):
    out = tmp_path / "trained.fml"
    history = tmp_path / "history.csv"
    result = runner.invoke(main, ["train", "--system", demo_paths[0],
                                  "--data", demo_paths[1],
                                  "--particles", "6", "--evals", "60", "--seed", "5",
                                  "--out", str(out), "--history", str(history)])
    assert result.exit_code == 0
    trained = parse_fml(out.read_text())
    assert fitness_mse(trained, demo_data) <= fitness_mse(demo_sys, demo_data)
    lines = history.read_text().splitlines()
    assert lines[0] == "evaluation,best_fitness"
    assert len(lines) == 61


def test_train_anchored_at_initialization_budget(runner, demo_paths, tmp_path, demo_sys, demo_data):
    out = tmp_path / "trained.fml"
    result = runner.invoke(main, ["train", "--system", demo_paths[0],
                                  "--data", demo_paths[1],
                                  "--particles", "8", "--evals", "8", "--seed", "0",
                                  "--out", str(out)])
    assert result.exit_code == 0
    trained = parse_fml(out.read_text())
    assert fitness_mse(trained, demo_data) <= fitness_mse(demo_sys, demo_data)


def test_train_byte_identical_reruns(runner, demo_paths, tmp_path):
    outputs = []
    for name in ("a.fml", "b.fml"):
        out = tmp_path / name
        result = runner.invoke(main, ["train", "--system", demo_paths[0],
                                      "--data", demo_paths[1],
                                      "--particles", "5", "--evals", "30", "--seed", "3",
                                      "--out", str(out)])
        assert result.exit_code == 0
        outputs.append(out.read_bytes())
    assert outputs[0] == outputs[1]


def test_sweep_single_cell(runner, demo_paths, tmp_path, demo_sys, demo_data):
    out = tmp_path / "sweep.csv"
    result = runner.invoke(main, ["sweep", "--system", demo_paths[0],
                                  "--data", demo_paths[1],
                                  "--particles-list", "5", "--evals-list", "30",
                                  "--seeds", "1", "--out", str(out)])
    assert result.exit_code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "particles,budget,seed,final_mse"
    particles, budget, seed, final = lines[1].split(",")
    _, history = pso_train(demo_sys, demo_data,
                           PsoConfig(swarm_size=5, max_evaluations=30, seed=0))
    assert (int(particles), int(budget), int(seed)) == (5, 30, 0)
    assert float(final) == history.best_fitness[-1]


def test_sweep_usage_error(runner, demo_paths, tmp_path):
    result = runner.invoke(main, ["sweep", "--system", demo_paths[0],
                                  "--data", demo_paths[1],
                                  "--particles-list", "five", "--out",
                                  str(tmp_path / "s.csv")])
    assert result.exit_code == 2
