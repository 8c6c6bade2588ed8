"""Ring-shaped Markov reward processes used for the prediction experiments."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from ..model import TrueMDP

SCHEMES = {
    # (counter-clockwise reward, clockwise reward)
    "task1": (1.0, -1.0),
    "task2": (1.0, 1.0),
}


@dataclass(frozen=True)
class CircleTask:
    """States 0..n-1 on a ring; state s moves counter-clockwise to s+1 or clockwise to s-1."""

    p_ccw: tuple[float, ...]
    scheme: str = "task1"
    gamma: float = 0.95

    @property
    def num_states(self) -> int:
        return len(self.p_ccw)

    @cached_property
    def mdp(self) -> TrueMDP:
        n = self.num_states
        r_ccw, r_cw = SCHEMES[self.scheme]
        outcomes = []
        for s, p in enumerate(self.p_ccw):
            ccw, cw = (s + 1) % n, (s - 1) % n
            outcomes.append([[(ccw, p, r_ccw), (cw, 1.0 - p, r_cw)]])
        return TrueMDP(n, 1, outcomes, self.gamma)


def generate_circle(seed: int, scheme: str = "task1", num_states: int = 10, gamma: float = 0.95) -> CircleTask:
    """Draw one uniform weight per neighbour and normalise each pair to sum to 1."""
    if scheme not in SCHEMES:
        raise ValueError(f"unknown circle scheme {scheme!r}; expected one of {sorted(SCHEMES)}")
    rng = np.random.default_rng(seed)
    # 1 - U[0,1) lies in (0, 1], so both weights are strictly positive
    w = 1.0 - rng.random((num_states, 2))
    p_ccw = w[:, 0] / w.sum(axis=1)
    return CircleTask(tuple(float(p) for p in p_ccw), scheme, gamma)
