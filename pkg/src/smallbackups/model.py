"""Tabular MDPs, the count-based model estimate and the successor snapshot table.

Values live in plain Python lists indexed by *owner*.  An owner is a state
for prediction models and a flattened state-action pair ``s * A + a`` for
control models, so the same backup code serves both keyings.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Sequence

import numpy as np


class ContractViolation(ValueError):
    """Raised when an operation is called outside its precondition."""


Outcome = tuple[int, float, float]  # (next state, probability, reward)


@dataclass
class TrueMDP:
    """A fully specified finite MDP.

    ``outcomes[s][a]`` lists ``(s2, prob, reward)`` triples; the reward may
    depend on the successor, which is how the circle tasks are defined.
    Terminal states have empty outcome lists for every action.
    """

    num_states: int
    num_actions: int
    outcomes: list[list[list[Outcome]]]
    gamma: float
    terminal: tuple[bool, ...] = field(default=())

    def __post_init__(self):
        if not self.terminal:
            self.terminal = tuple(False for _ in range(self.num_states))
        if len(self.terminal) != self.num_states or len(self.outcomes) != self.num_states:
            raise ContractViolation("outcome table does not match num_states")
        if not 0.0 <= self.gamma < 1.0:
            raise ContractViolation(f"gamma must be in [0, 1), got {self.gamma}")
        for s, rows in enumerate(self.outcomes):
            if len(rows) != self.num_actions:
                raise ContractViolation(f"state {s} has {len(rows)} actions, expected {self.num_actions}")
            for a, row in enumerate(rows):
                if self.terminal[s]:
                    if row:
                        raise ContractViolation(f"terminal state {s} has outgoing transitions")
                    continue
                total = 0.0
                for s2, p, _ in row:
                    if not 0 <= s2 < self.num_states:
                        raise ContractViolation(f"successor {s2} out of range")
                    if p <= 0.0:
                        raise ContractViolation(f"non-positive probability at ({s}, {a})")
                    total += p
                if abs(total - 1.0) > 1e-12:
                    raise ContractViolation(f"probabilities of ({s}, {a}) sum to {total!r}")

    @cached_property
    def cumulative(self) -> list[list[tuple[list[float], list[int], list[float]]]]:
        """Per-(s, a) running probability sums used for sampling."""
        table = []
        for rows in self.outcomes:
            per_state = []
            for row in rows:
                acc, cdf = 0.0, []
                for _, p, _ in row:
                    acc += p
                    cdf.append(acc)
                per_state.append((cdf, [o[0] for o in row], [o[2] for o in row]))
            table.append(per_state)
        return table

    def expected_reward(self, s: int, a: int) -> float:
        return sum(p * r for _, p, r in self.outcomes[s][a])

    def transition_matrix(self, policy: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Return ``(P_pi, R_pi)`` for a per-state action distribution."""
        n = self.num_states
        P = np.zeros((n, n))
        R = np.zeros(n)
        for s in range(n):
            if self.terminal[s]:
                continue
            for a in range(self.num_actions):
                w = policy[s, a]
                if w == 0.0:
                    continue
                for s2, p, r in self.outcomes[s][a]:
                    P[s, s2] += w * p
                    R[s] += w * p * r
        return P, R


def exact_value_solve(mdp: TrueMDP, policy: Optional[np.ndarray] = None) -> np.ndarray:
    """Solve ``(I - gamma P_pi) V = R_pi`` directly.

    ``policy`` has shape ``(num_states, num_actions)``; ``None`` means uniform.
    Terminal states get value 0.
    """
    n, m = mdp.num_states, mdp.num_actions
    if policy is None:
        policy = np.full((n, m), 1.0 / m)
    policy = np.asarray(policy, dtype=float)
    if policy.shape != (n, m):
        raise ContractViolation(f"policy shape {policy.shape} != {(n, m)}")
    if np.any(policy < 0) or np.any(np.abs(policy.sum(axis=1) - 1.0) > 1e-12):
        raise ContractViolation("policy rows must be probability distributions")
    P, R = mdp.transition_matrix(policy)
    A = np.eye(n) - mdp.gamma * P
    V = np.linalg.solve(A, R)
    # one round of iterative refinement keeps the residual near machine precision
    V += np.linalg.solve(A, R - A @ V)
    return V


class ModelEstimate:
    """Visit counts, successor counts and reward sums per owner.

    Pass ``num_actions=None`` for a state-keyed (prediction) model.  A reverse
    index ``predecessors[s2]`` lists every owner with a positive count into
    ``s2``, in order of first observation.
    """

    def __init__(self, num_states: int, num_actions: Optional[int] = None,
                 terminal: Optional[Sequence[bool]] = None):
        self.num_states = num_states
        self.keyed_by_action = num_actions is not None
        self.num_actions = num_actions if num_actions is not None else 1
        n_owners = num_states * self.num_actions
        self.visits: list[int] = [0] * n_owners
        self.successors: list[dict[int, int]] = [{} for _ in range(n_owners)]
        self.reward_sum: list[float] = [0.0] * n_owners
        self.predecessors: list[list[int]] = [[] for _ in range(num_states)]
        self.terminal: list[bool] = list(terminal) if terminal is not None else [False] * num_states
        if len(self.terminal) != num_states:
            raise ContractViolation("terminal flags do not match num_states")

    @property
    def num_owners(self) -> int:
        return len(self.visits)

    def owner(self, s: int, a: Optional[int] = None) -> int:
        if not 0 <= s < self.num_states:
            raise ContractViolation(f"state {s} out of range")
        if self.keyed_by_action:
            if a is None or not 0 <= a < self.num_actions:
                raise ContractViolation(f"action {a!r} invalid for an action-keyed model")
            return s * self.num_actions + a
        if a is not None:
            raise ContractViolation("state-keyed model takes no action")
        return s

    def state_of(self, owner: int) -> int:
        return owner // self.num_actions

    def record_transition(self, s: int, a: Optional[int], r: float, s2: int) -> int:
        """Count one observed transition and return its owner index."""
        o = self.owner(s, a)
        if not 0 <= s2 < self.num_states:
            raise ContractViolation(f"successor {s2} out of range")
        if self.terminal[s]:
            raise ContractViolation(f"transition out of terminal state {s}")
        self.visits[o] += 1
        succ = self.successors[o]
        c = succ.get(s2, 0)
        if c == 0:
            self.predecessors[s2].append(o)
        succ[s2] = c + 1
        self.reward_sum[o] += r
        return o

    def phat(self, s: int, a: Optional[int], s2: int) -> float:
        o = self.owner(s, a)
        n = self.visits[o]
        if n == 0:
            raise ContractViolation(f"P-hat queried for unvisited owner ({s}, {a})")
        return self.successors[o].get(s2, 0) / n

    def rhat(self, s: int, a: Optional[int] = None) -> float:
        o = self.owner(s, a)
        n = self.visits[o]
        if n == 0:
            raise ContractViolation(f"R-hat queried for unvisited owner ({s}, {a})")
        return self.reward_sum[o] / n

    def check_counts(self) -> bool:
        """Count conservation across every owner."""
        return all(sum(succ.values()) == n for succ, n in zip(self.successors, self.visits))


class UTable:
    """Per-owner snapshots of the successor values composing the owner's value."""

    def __init__(self, num_owners: int):
        self.rows: list[dict[int, float]] = [{} for _ in range(num_owners)]

    def get(self, owner: int, s2: int) -> float:
        return self.rows[owner][s2]

    def set(self, owner: int, s2: int, value: float) -> None:
        self.rows[owner][s2] = value

    def ensure(self, owner: int, s2: int, default: float) -> float:
        """Return the entry, creating it with ``default`` on first observation."""
        return self.rows[owner].setdefault(s2, default)

    def __contains__(self, key: tuple[int, int]) -> bool:
        owner, s2 = key
        return s2 in self.rows[owner]
