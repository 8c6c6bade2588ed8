"""Seeded prediction and control experiment suites."""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from functools import lru_cache
from pathlib import Path
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from ..envs import CircleTask, MazeSpec, default_maze, env_step, generate_circle, load_maze
from ..model import TrueMDP, exact_value_solve
from ..planners import AGENTS, SmallBackupPredictor
from .config import ExperimentConfig
from .csvio import CurvePoint
from .rng import trial_rngs

log = logging.getLogger(__name__)

PREDICTION_ENVS = {"circle-task1": "task1", "circle-task2": "task2"}
PREDICTION_AGENTS = ("td-const", "td-decay", "small-backup")
CONTROL_ENVS = ("maze",)
CONTROL_AGENTS = ("peng-williams", "moore-atkeson", "ps-small", "value-iteration")


def make_circle(config: ExperimentConfig) -> CircleTask:
    if config.env not in PREDICTION_ENVS:
        raise ValueError(f"unknown prediction environment {config.env!r}; expected one of {sorted(PREDICTION_ENVS)}")
    return generate_circle(config.env_seed, PREDICTION_ENVS[config.env])


@lru_cache(maxsize=8)
def _maze(path: Optional[str]) -> MazeSpec:
    if path is None:
        return default_maze()
    return load_maze(Path(path).read_text(encoding="utf-8"))


def make_maze(config: ExperimentConfig) -> MazeSpec:
    if config.env not in CONTROL_ENVS:
        raise ValueError(f"unknown control environment {config.env!r}; expected one of {list(CONTROL_ENVS)}")
    return _maze(config.maze_path)


def _pool_map(fn: Callable, items: Sequence, workers: int) -> list:
    """Map in a bounded process pool; results come back in item order."""
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------- prediction

def simulate_chain(mdp: TrueMDP, transitions: int, rng: np.random.Generator) -> tuple[list[int], list[float]]:
    """States ``s_0..s_T`` and rewards ``r_1..r_T`` of one trajectory from a uniform start."""
    s = min(int(rng.random() * mdp.num_states), mdp.num_states - 1)
    states, rewards = [s], []
    for _ in range(transitions):
        r, s, _ = env_step(mdp, s, None, rng)
        states.append(s)
        rewards.append(r)
    return states, rewards


def td0_normalized_errors(states: Sequence[int], rewards: Sequence[float], v_true: np.ndarray, gamma: float,
                          alphas: Optional[Sequence[float]] = None,
                          decays: Optional[Sequence[float]] = None) -> np.ndarray:
    """Average normalized RMS error of TD(0) for a whole grid of step-size settings at once.

    Row ``g`` of the state table follows TD(0) with constant ``alphas[g]`` or
    with the decaying schedule ``decays[g]``.  The RMS error after every
    backup is divided by the error of the all-zero start, then averaged.
    """
    if (alphas is None) == (decays is None):
        raise ValueError("give exactly one of alphas or decays")
    grid = np.asarray(alphas if alphas is not None else decays, dtype=float)
    n = len(v_true)
    V = np.zeros((len(grid), n))
    sq = (V - v_true) ** 2
    rms0 = np.sqrt(sq.sum(axis=1) / n)
    visits = np.zeros(n, dtype=np.int64)
    total = np.zeros(len(grid))
    for t, r in enumerate(rewards):
        s, s2 = states[t], states[t + 1]
        visits[s] += 1
        alpha = grid if decays is None else 1.0 / (grid * (visits[s] - 1) + 1.0)
        col = V[:, s]
        col += alpha * (r + gamma * V[:, s2] - col)
        sq[:, s] = (col - v_true[s]) ** 2
        total += np.sqrt(sq.sum(axis=1) / n) / rms0
    return total / len(rewards)


def small_backup_normalized_error(states: Sequence[int], rewards: Sequence[float], v_true: np.ndarray,
                                  gamma: float) -> float:
    """Same metric for the one-small-backup-per-step predictor."""
    n = len(v_true)
    agent = SmallBackupPredictor(n, gamma, iterations=1)
    vt = [float(x) for x in v_true]
    sq = [(0.0 - x) ** 2 for x in vt]
    rms0 = math.sqrt(sum(sq) / n)
    total = 0.0
    for t, r in enumerate(rewards):
        s = states[t]
        agent.observe(s, r, states[t + 1])
        sq[s] = (agent.V[s] - vt[s]) ** 2
        total += math.sqrt(sum(sq) / n) / rms0
    return total / len(rewards)


def prediction_trial(config: ExperimentConfig, run: int) -> dict[str, object]:
    """Per-run metrics: an array over the grid for the TD agents, a scalar for the small-backup agent."""
    task = make_circle(config)
    mdp = task.mdp
    v_true = exact_value_solve(mdp)
    env_rng, _ = trial_rngs(config.seed, run)
    states, rewards = simulate_chain(mdp, config.transitions, env_rng)
    out: dict[str, object] = {}
    agents = config.agents or PREDICTION_AGENTS
    if "td-const" in agents:
        out["td-const"] = td0_normalized_errors(states, rewards, v_true, mdp.gamma,
                                                alphas=config.alpha_grid.values())
    if "td-decay" in agents:
        out["td-decay"] = td0_normalized_errors(states, rewards, v_true, mdp.gamma,
                                                decays=config.d_grid.values())
    if "small-backup" in agents:
        out["small-backup"] = small_backup_normalized_error(states, rewards, v_true, mdp.gamma)
    return out


def _prediction_item(item: tuple[ExperimentConfig, int]) -> dict[str, object]:
    return prediction_trial(*item)


def run_prediction_suite(config: ExperimentConfig) -> dict[str, list[CurvePoint]]:
    """Normalized average RMS error per step-size setting, averaged over runs.

    Every agent sees the same trajectory within a run.  The small-backup
    predictor has no step size, so its curve is flat over the alpha grid.
    """
    agents = config.agents or list(PREDICTION_AGENTS)
    unknown = set(agents) - set(PREDICTION_AGENTS)
    if unknown:
        raise ValueError(f"unknown prediction agents {sorted(unknown)}")
    make_circle(config)
    trials = _pool_map(_prediction_item, [(config, i) for i in range(config.runs)], config.workers)
    result: dict[str, list[CurvePoint]] = {}
    for name in agents:
        if name == "small-backup":
            xs = config.alpha_grid.values()
            samples = [float(t[name]) for t in trials]
            result[name] = [CurvePoint.from_samples(x, samples) for x in xs]
            continue
        xs = config.alpha_grid.values() if name == "td-const" else config.d_grid.values()
        table = np.array([t[name] for t in trials])
        result[name] = [CurvePoint.from_samples(x, [float(v) for v in table[:, g]]) for g, x in enumerate(xs)]
    return result


# ------------------------------------------------------------------- control

def discounted_return(rewards: Iterable[float], gamma: float) -> float:
    g, disc = 0.0, 1.0
    for r in rewards:
        g += disc * r
        disc *= gamma
    return g


def run_episodes(agent, mdp: TrueMDP, start: int, episodes: int, step_cap: int,
                 env_rng: np.random.Generator) -> tuple[list[float], int]:
    """Run ``episodes`` episodes; returns per-episode discounted returns and the number truncated."""
    gamma = mdp.gamma
    returns, truncated = [], 0
    for _ in range(episodes):
        s, g, disc = start, 0.0, 1.0
        for _ in range(step_cap):
            a = agent.act(s)
            r, s2, done = env_step(mdp, s, a, env_rng)
            agent.observe(s, a, r, s2)
            g += disc * r
            disc *= gamma
            s = s2
            if done:
                break
        else:
            truncated += 1
        returns.append(g)
    return returns, truncated


def control_trial(config: ExperimentConfig, name: str, cycles: int, run: int) -> tuple[float, int]:
    """Mean discounted return of one run and the number of episodes that hit the step cap."""
    maze = make_maze(config)
    mdp = maze.mdp
    env_rng, agent_rng = trial_rngs(config.seed, run)
    agent = AGENTS[name](mdp.num_states, mdp.num_actions, config.planner_config(cycles, mdp.gamma),
                         mdp.terminal, agent_rng)
    returns, truncated = run_episodes(agent, mdp, maze.start, config.episodes, config.step_cap, env_rng)
    return math.fsum(returns) / len(returns), truncated


def _control_item(item: tuple[ExperimentConfig, str, int, int]) -> tuple[float, int]:
    return control_trial(*item)


def run_control_suite(config: ExperimentConfig) -> dict[str, list[CurvePoint]]:
    """Mean discounted return over the episodes of each run, per agent and cycle budget.

    Run ``i`` uses the same environment and agent seeds for every agent.
    Value iteration ignores the cycle budget and is run once per seed.
    """
    agents = config.agents or list(CONTROL_AGENTS)
    unknown = set(agents) - set(CONTROL_AGENTS)
    if unknown:
        raise ValueError(f"unknown control agents {sorted(unknown)}")
    make_maze(config)
    items, keys = [], []
    for name in agents:
        budgets = [0] if name == "value-iteration" else config.cycles
        for c in budgets:
            for run in range(config.runs):
                items.append((config, name, c, run))
                keys.append((name, c))
    outcomes = _pool_map(_control_item, items, config.workers)
    by_key: dict[tuple[str, int], list[float]] = {}
    for key, (mean_return, truncated) in zip(keys, outcomes):
        if truncated:
            log.warning("%s cycles=%d: %d episode(s) hit the %d-step cap", key[0], key[1], truncated,
                        config.step_cap)
        by_key.setdefault(key, []).append(mean_return)
    result = {}
    for name in agents:
        if name == "value-iteration":
            samples = by_key[(name, 0)]
            result[name] = [CurvePoint.from_samples(c, samples) for c in config.cycles]
        else:
            result[name] = [CurvePoint.from_samples(c, by_key[(name, c)]) for c in config.cycles]
    return result
