"""Experiment environments and a shared sampler for :class:`TrueMDP` dynamics."""

from __future__ import annotations

from typing import Optional

import numpy as np

from ..model import ContractViolation, TrueMDP
from .circle import CircleTask, generate_circle
from .maze import KernelOutcome, MazeError, MazeSpec, default_maze, load_maze, maze_kernel, save_maze

__all__ = [
    "CircleTask", "KernelOutcome", "MazeError", "MazeSpec", "default_maze", "env_step",
    "generate_circle", "load_maze", "maze_kernel", "save_maze",
]


def env_step(mdp: TrueMDP, s: int, a: Optional[int], rng: np.random.Generator) -> tuple[float, int, bool]:
    """Sample ``(reward, next_state, next_is_terminal)`` from the true kernel."""
    if mdp.terminal[s]:
        raise ContractViolation(f"cannot step from terminal state {s}")
    if a is None:
        if mdp.num_actions != 1:
            raise ContractViolation("an action is required for multi-action MDPs")
        a = 0
    cdf, succ, rewards = mdp.cumulative[s][a]
    u = rng.random()
    last = len(cdf) - 1
    i = 0
    # the final entry absorbs any rounding shortfall in the running sum
    while i < last and u >= cdf[i]:
        i += 1
    s2 = succ[i]
    return rewards[i], s2, mdp.terminal[s2]
