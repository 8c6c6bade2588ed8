"""Per-update-cycle cost measurement for the three prioritized-sweeping agents.

Random models are built with a fan-out proportional to the number of states,
fed to each agent, and a batch of update cycles is timed in abstract
operations: successor reads plus action reads for the top-element backup, and
predecessor visits for the rest of the cycle.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..planners import MooreAtkeson, PengWilliams, PlannerConfig, PSSmallBackups

PLANNERS = {cls.name: cls for cls in (MooreAtkeson, PengWilliams, PSSmallBackups)}
DEFAULT_STATES = (10, 25, 50, 100, 200)
DEFAULT_ACTIONS = (2, 4, 8, 16)


@dataclass(frozen=True)
class CycleCost:
    planner: str
    num_states: int
    num_actions: int
    cycles: int
    top_element: float     # mean successor + action reads per cycle
    predecessors: float    # mean predecessor visits per cycle
    mean_fan_in: float     # mean predecessor-list length of popped states


def random_transitions(num_states: int, num_actions: int, rng: np.random.Generator, fan_fraction: float = 0.2):
    """One observation of each successor of each pair; fan-out ~ fan_fraction * num_states."""
    base = max(1, int(round(fan_fraction * num_states)))
    for s in range(num_states):
        for a in range(num_actions):
            k = int(rng.integers(max(1, base // 2), min(num_states, base + base // 2) + 1))
            for s2 in rng.choice(num_states, size=k, replace=False):
                yield s, a, float(-1.0 - rng.random()), int(s2)


def measure_cycle_cost(planner: str, num_states: int, num_actions: int, seed: int = 0,
                       cycles: int = 50, fan_fraction: float = 0.2) -> CycleCost:
    rng = np.random.default_rng([seed, num_states, num_actions])
    config = PlannerConfig(update_cycles=0, gamma=0.9, epsilon=0.0, optimism_threshold=0, queue_cutoff=0.0)
    agent = PLANNERS[planner](num_states, num_actions, config, rng=np.random.default_rng(seed))
    for s, a, r, s2 in random_transitions(num_states, num_actions, rng, fan_fraction):
        agent.update_model(s, a, r, s2)
    before = agent.counters.snapshot()
    done, fan_in = 0, 0
    preds = agent.model.predecessors
    m = num_actions
    for _ in range(cycles):
        top = agent.queue.peek()
        if top is None:
            break
        key = top[0]
        popped_state = key if planner != PengWilliams.name else key[0] // m
        fan_in += len(preds[popped_state])
        agent.update_cycle()
        done += 1
    after = agent.counters.snapshot()
    done = max(done, 1)
    top_cost = ((after[0] - before[0]) + (after[1] - before[1])) / done
    return CycleCost(planner, num_states, num_actions, done, top_cost, (after[2] - before[2]) / done,
                     fan_in / done)


def complexity_report(states=DEFAULT_STATES, actions=DEFAULT_ACTIONS, seed: int = 0,
                      cycles: int = 50) -> list[CycleCost]:
    return [measure_cycle_cost(p, n, m, seed, cycles) for p in PLANNERS for n in states for m in actions]


def fit_r2(features: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, float]:
    """Least-squares fit with intercept; returns coefficients and R^2."""
    X = np.column_stack([np.ones(len(y)), features])
    coef, *_ = np.linalg.lstsq(X, y, rcond=None)
    resid = y - X @ coef
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(resid @ resid) / ss_tot if ss_tot > 0 else 1.0
    return coef, r2
