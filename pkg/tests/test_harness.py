import math

import numpy as np
import pytest

from smallbackups.envs import generate_circle
from smallbackups.harness import (CurvePoint, ExperimentConfig, Grid, emit_csv, format_csv, load_config,
                                  read_csv, trial_rngs)
from smallbackups.harness.cli import main
from smallbackups.harness.complexity import fit_r2, measure_cycle_cost
from smallbackups.harness.config import parse_config_text
from smallbackups.harness.experiments import (discounted_return, run_control_suite, run_prediction_suite,
                                              simulate_chain, small_backup_normalized_error,
                                              td0_normalized_errors)
from smallbackups.model import exact_value_solve
from smallbackups.planners import SmallBackupPredictor, TD0Predictor


@pytest.fixture(scope="module")
def trajectory():
    task = generate_circle(0, "task1")
    env_rng, _ = trial_rngs(0, 0)
    states, rewards = simulate_chain(task.mdp, 2000, env_rng)
    return task, exact_value_solve(task.mdp), states, rewards


def _scalar_metric(agent, states, rewards, v_true):
    n = len(v_true)
    rms0 = math.sqrt(sum(x * x for x in v_true) / n)
    total = 0.0
    for t, r in enumerate(rewards):
        agent.observe(states[t], r, states[t + 1])
        err = np.asarray(agent.V) - v_true
        total += math.sqrt(float(err @ err) / n) / rms0
    return total / len(rewards)


def test_td_alpha_zero_is_exactly_one(trajectory):
    task, v, states, rewards = trajectory
    assert td0_normalized_errors(states, rewards, v, task.gamma, alphas=[0.0])[0] == 1.0


def test_decay_zero_equals_alpha_one(trajectory):
    task, v, states, rewards = trajectory
    a = td0_normalized_errors(states, rewards, v, task.gamma, alphas=[1.0])
    d = td0_normalized_errors(states, rewards, v, task.gamma, decays=[0.0])
    assert a[0] == d[0]


@pytest.mark.parametrize("kind, value", [("alpha", 0.1), ("alpha", 0.6), ("decay", 0.3), ("decay", 1.0)])
def test_vectorised_td_matches_scalar_predictor(trajectory, kind, value):
    task, v, states, rewards = trajectory
    if kind == "alpha":
        fast = td0_normalized_errors(states, rewards, v, task.gamma, alphas=[value])[0]
        agent = TD0Predictor(10, task.gamma, alpha=value)
    else:
        fast = td0_normalized_errors(states, rewards, v, task.gamma, decays=[value])[0]
        agent = TD0Predictor(10, task.gamma, decay=value)
    assert fast == pytest.approx(_scalar_metric(agent, states, rewards, v), abs=1e-12)


def test_small_backup_metric_matches_direct_computation(trajectory):
    task, v, states, rewards = trajectory
    fast = small_backup_normalized_error(states, rewards, v, task.gamma)
    assert fast == pytest.approx(_scalar_metric(SmallBackupPredictor(10, task.gamma), states, rewards, v),
                                 abs=1e-12)


def test_prediction_suite_shapes_and_flat_small_backup():
    cfg = ExperimentConfig(env="circle-task1", runs=3, transitions=300, alpha_grid=Grid(0, 1, 0.25),
                           d_grid=Grid(0, 1, 0.5))
    out = run_prediction_suite(cfg)
    assert [p.x for p in out["td-const"]] == [0.0, 0.25, 0.5, 0.75, 1.0]
    assert [p.x for p in out["td-decay"]] == [0.0, 0.5, 1.0]
    assert out["td-const"][0].mean == 1.0 and out["td-const"][0].stderr == 0.0
    flat = {(p.mean, p.stderr) for p in out["small-backup"]}
    assert len(flat) == 1
    assert all(p.runs == 3 for pts in out.values() for p in pts)


def test_prediction_suite_rejects_unknown():
    with pytest.raises(ValueError):
        run_prediction_suite(ExperimentConfig(env="circle-task1", agents=["td-lambda"]))
    with pytest.raises(ValueError):
        run_prediction_suite(ExperimentConfig(env="maze"))


def test_discounted_return_geometric():
    for length in (1, 7, 50):
        g = discounted_return([-1.0] * length, 0.99)
        assert g == pytest.approx(-(1 - 0.99 ** length) / 0.01, abs=1e-12)


def test_control_suite_small_run(tmp_path):
    maze = tmp_path / "m.txt"
    maze.write_text("#######\n#S....#\n#.##..#\n#....G#\n#######\n")
    cfg = ExperimentConfig(maze_path=str(maze), runs=2, episodes=3, cycles=[1, 2], step_cap=500)
    out = run_control_suite(cfg)
    assert set(out) == {"peng-williams", "moore-atkeson", "ps-small", "value-iteration"}
    for pts in out.values():
        assert [p.x for p in pts] == [1.0, 2.0]
        assert all(p.mean < 0 for p in pts)
    assert out["value-iteration"][0] == CurvePoint(1.0, out["value-iteration"][1].mean,
                                                   out["value-iteration"][1].stderr, 2)


def test_control_step_cap_truncates(tmp_path, caplog):
    maze = tmp_path / "m.txt"
    maze.write_text("#########\n#S......#\n#######G#\n#########\n")
    cfg = ExperimentConfig(maze_path=str(maze), runs=1, episodes=2, cycles=[1], step_cap=2,
                           agents=["ps-small"])
    out = run_control_suite(cfg)
    assert out["ps-small"][0].mean == pytest.approx(-1.99)
    assert "hit the 2-step cap" in caplog.text


# ----------------------------------------------------------------------- rng

def test_trial_rngs_are_order_independent():
    a1, b1 = trial_rngs(5, 3)
    _ = trial_rngs(5, 0)
    a2, b2 = trial_rngs(5, 3)
    assert a1.random() == a2.random() and b1.random() == b2.random()
    e, g = trial_rngs(5, 3)
    assert e.random() != g.random()
    assert trial_rngs(5, 3)[0].random() != trial_rngs(5, 4)[0].random()


# ----------------------------------------------------------------------- csv

def test_curve_point_stderr():
    p = CurvePoint.from_samples(0.5, [1.0, 2.0, 3.0, 4.0])
    assert p.mean == 2.5 and p.runs == 4
    assert p.stderr == pytest.approx(np.std([1, 2, 3, 4], ddof=1) / 2)
    assert CurvePoint.from_samples(0, [7.0]).stderr == 0.0


def test_csv_empty_and_round_trip(tmp_path):
    assert format_csv([]) == "x,mean,stderr,runs\n"
    pts = [CurvePoint(0.02, -1 / 3, 0.001234567890123, 20), CurvePoint(1.0, 123456.789, 0.0, 20)]
    path = emit_csv(pts, tmp_path / "c.csv")
    back = read_csv(path)
    assert back[0].mean == float(format(-1 / 3, ".12g"))
    assert back[1] == pts[1]
    assert path.read_text().splitlines()[1] == "0.02,-0.333333333333,0.00123456789012,20"


def test_csv_bad_header(tmp_path):
    path = tmp_path / "c.csv"
    path.write_text("a,b\n")
    with pytest.raises(ValueError):
        read_csv(path)


# -------------------------------------------------------------------- config

def test_grid_parse_and_values():
    g = Grid.parse("0:1:0.02")
    vals = g.values()
    assert len(vals) == 51 and vals[0] == 0.0 and vals[-1] == 1.0 and vals[1] == 0.02
    assert str(g) == "0:1:0.02"
    for bad in ("0:1", "1:0:0.1", "0:1:0", "a:b:c"):
        with pytest.raises(ValueError):
            Grid.parse(bad)


def test_config_file_and_overrides(tmp_path):
    path = tmp_path / "exp.cfg"
    path.write_text("# desk preset\nenv = circle-task2\nruns = 20\nalpha-grid = 0:0.5:0.1\n"
                    "agents = td-const, small-backup\noptimism_in_backups = false\ncycles = 1,5\n")
    cfg = load_config(path, runs=7)
    assert cfg.env == "circle-task2" and cfg.runs == 7
    assert cfg.alpha_grid == Grid(0, 0.5, 0.1)
    assert cfg.agents == ["td-const", "small-backup"] and cfg.cycles == [1, 5]
    assert cfg.optimism_in_backups is False
    assert cfg.planner_config(5, 0.9).update_cycles == 5


@pytest.mark.parametrize("text", ["runs 5", "colour = red", "runs = many", "optimism_in_backups = maybe"])
def test_config_errors(text):
    with pytest.raises(ValueError, match="line 1"):
        parse_config_text(text)


def test_config_invariants():
    with pytest.raises(ValueError):
        ExperimentConfig(runs=0)
    with pytest.raises(ValueError):
        ExperimentConfig(cycles=[])


# ------------------------------------------------------------------ counters

def test_cycle_cost_small_backup_independent_of_states():
    a = measure_cycle_cost("ps-small", 20, 4)
    b = measure_cycle_cost("ps-small", 120, 4)
    assert a.top_element == b.top_element == 4


def test_fit_r2_exact_line():
    x = np.arange(10.0)
    coef, r2 = fit_r2(x, 3 * x + 2)
    np.testing.assert_allclose(coef, [2, 3], atol=1e-12)
    assert r2 == pytest.approx(1.0)


# ----------------------------------------------------------------------- cli

def test_cli_solve_circle(capsys):
    assert main(["solve", "--env", "circle-task2"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "state,p_ccw,value" and len(lines) == 11
    assert all(float(l.split(",")[2]) == pytest.approx(20.0) for l in lines[1:])


def test_cli_validate_maze(tmp_path, capsys):
    good = tmp_path / "good.txt"
    good.write_text("#####\n#S.G#\n#####\n")
    assert main(["validate-maze", str(good)]) == 0
    bad = tmp_path / "bad.txt"
    bad.write_text("#####\n#S.G#\n####\n")
    assert main(["validate-maze", str(bad)]) == 1
    assert "line 3" in capsys.readouterr().err


def test_cli_bad_grid_exits_with_usage_error():
    with pytest.raises(SystemExit):
        main(["predict-sweep", "--alpha-grid", "nonsense"])


def test_cli_unknown_agent(capsys):
    assert main(["predict-sweep", "--agent", "nope", "--runs", "1", "--transitions", "10"]) == 2
    assert "unknown" in capsys.readouterr().err


def test_cli_predict_sweep_writes_per_agent_files(tmp_path):
    out = tmp_path / "pred.csv"
    argv = ["predict-sweep", "--runs", "2", "--transitions", "200", "--alpha-grid", "0:1:0.5",
            "--d-grid", "0:1:0.5", "--out", str(out)]
    assert main(argv) == 0
    names = sorted(p.name for p in tmp_path.iterdir())
    assert names == ["pred-small-backup.csv", "pred-td-const.csv", "pred-td-decay.csv"]


def test_cli_counters(capsys):
    assert main(["counters", "--states", "10,20", "--actions", "2", "--cycles", "5"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("planner,states,actions") and len(lines) == 1 + 3 * 2


def test_cli_runs_are_byte_identical(tmp_path):
    outs = []
    for k in range(2):
        out = tmp_path / f"run{k}.csv"
        main(["predict-sweep", "--seed", "42", "--runs", "2", "--transitions", "300", "--agent", "td-decay",
              "--d-grid", "0:1:0.25", "--out", str(out)])
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]
