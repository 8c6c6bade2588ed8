"""Command-line entry point: ``smallbackups <subcommand> [flags]``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from ..envs import MazeError, load_maze, maze_kernel
from ..envs.maze import FORWARD, KERNEL_SIZE
from ..model import exact_value_solve
from ..planners.vi import SuccessorArrays
from .complexity import DEFAULT_ACTIONS, DEFAULT_STATES, complexity_report
from .config import ExperimentConfig, Grid, load_config
from .csvio import emit_csv, format_csv
from .experiments import (CONTROL_AGENTS, PREDICTION_AGENTS, PREDICTION_ENVS, make_circle, make_maze,
                          run_control_suite, run_prediction_suite)


def _int_list(text: str) -> list[int]:
    return [int(t) for t in text.split(",") if t.strip()]


def _name_list(text: str) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="flat key = value config file")
    p.add_argument("--seed", type=int, help="master seed (unsigned 64-bit)")
    p.add_argument("--env", help="environment name")
    p.add_argument("--env-seed", type=int, help="seed used to generate the environment")
    p.add_argument("--maze", dest="maze_path", help="maze file (control environments)")
    p.add_argument("--runs", type=int)
    p.add_argument("--agent", dest="agents", type=_name_list, help="comma-separated agent names")
    p.add_argument("--workers", type=int, help="size of the trial worker pool")
    p.add_argument("--out", help="CSV path; with several agents, one file per agent named PATH_STEM-AGENT.csv")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="smallbackups", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("predict-sweep", help="TD(0) step-size sweeps vs the small-backup predictor")
    _common(p)
    p.add_argument("--alpha-grid", type=Grid.parse, help="LO:HI:STEP")
    p.add_argument("--d-grid", type=Grid.parse, help="LO:HI:STEP")
    p.add_argument("--transitions", type=int)

    p = sub.add_parser("control-sweep", help="prioritized-sweeping agents on the maze")
    _common(p)
    p.add_argument("--cycles", type=_int_list, help="comma-separated update-cycle budgets")
    p.add_argument("--episodes", type=int)
    p.add_argument("--step-cap", type=int)

    p = sub.add_parser("solve", help="print exact values for an environment")
    p.add_argument("--env", default="maze")
    p.add_argument("--env-seed", type=int, default=0)
    p.add_argument("--maze", dest="maze_path")

    p = sub.add_parser("validate-maze", help="parse a maze file and check its kernel")
    p.add_argument("path", type=Path)

    p = sub.add_parser("counters", help="per-cycle operation counts of the PS agents")
    p.add_argument("--states", type=_int_list, default=list(DEFAULT_STATES))
    p.add_argument("--actions", type=_int_list, default=list(DEFAULT_ACTIONS))
    p.add_argument("--cycles", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    return parser


def _config(args, default_env: str, default_agents) -> ExperimentConfig:
    keys = ("seed", "env", "env_seed", "maze_path", "runs", "agents", "workers", "out", "alpha_grid",
            "d_grid", "transitions", "cycles", "episodes", "step_cap")
    overrides = {k: getattr(args, k, None) for k in keys}
    config = load_config(args.config, **overrides)
    if args.env is None and (args.config is None or config.env == ExperimentConfig().env):
        config = config.with_overrides(env=default_env)
    if not config.agents:
        config = config.with_overrides(agents=list(default_agents))
    return config


def _write(result: dict, out) -> None:
    if out is None:
        for name, points in result.items():
            print(f"# {name}")
            sys.stdout.write(format_csv(points))
        return
    out = Path(out)
    if len(result) == 1:
        emit_csv(next(iter(result.values())), out)
        print(out)
        return
    for name, points in result.items():
        path = out.with_name(f"{out.stem}-{name}{out.suffix or '.csv'}")
        emit_csv(points, path)
        print(path)


def _solve(args) -> None:
    config = ExperimentConfig(env=args.env, env_seed=args.env_seed, maze_path=args.maze_path)
    if args.env in PREDICTION_ENVS:
        task = make_circle(config)
        values = exact_value_solve(task.mdp)
        print("state,p_ccw,value")
        for s, (p, v) in enumerate(zip(task.p_ccw, values)):
            print(f"{s},{p:.12g},{v:.12g}")
        return
    maze = make_maze(config)
    arrays = SuccessorArrays.from_mdp(maze.mdp)
    _, values, _ = arrays.solve(np.zeros(maze.mdp.num_states), maze.mdp.gamma, 1e-12, None)
    print("row,col,value")
    for (r, c), v in zip(maze.cells, values):
        print(f"{r},{c},{v:.12g}")


def _validate(path: Path) -> int:
    try:
        maze = load_maze(path.read_text(encoding="utf-8"))
    except MazeError as exc:
        print(f"{path}: {exc}", file=sys.stderr)
        return 1
    n_goal = sum(maze.is_goal(c) for c in maze.cells)
    for cell in maze.cells:
        if maze.is_goal(cell):
            continue
        for a in range(len(FORWARD)):
            if sum(o.count for o in maze_kernel(maze, cell, a)) != KERNEL_SIZE:
                print(f"{path}: kernel at {cell} does not sum to 1", file=sys.stderr)
                return 1
    print(f"{path}: ok, {maze.height}x{maze.width}, {len(maze.cells)} open cells, {n_goal} goal(s)")
    return 0


def _counters(args) -> None:
    print("planner,states,actions,cycles,top_element,predecessors,mean_fan_in")
    for c in complexity_report(args.states, args.actions, args.seed, args.cycles):
        print(f"{c.planner},{c.num_states},{c.num_actions},{c.cycles},{c.top_element:.6g},"
              f"{c.predecessors:.6g},{c.mean_fan_in:.6g}")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "predict-sweep":
            _write(run_prediction_suite(_config(args, "circle-task1", PREDICTION_AGENTS)), args.out)
        elif args.command == "control-sweep":
            _write(run_control_suite(_config(args, "maze", CONTROL_AGENTS)), args.out)
        elif args.command == "solve":
            _solve(args)
        elif args.command == "validate-maze":
            return _validate(args.path)
        elif args.command == "counters":
            _counters(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
