"""Value iteration on the model estimate, and the agent that reruns it every step."""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np
from numba import njit

from ..model import ContractViolation, ModelEstimate, TrueMDP
from .config import PlannerConfig
from .control import ControlAgent

MAX_SWEEPS = 1_000_000


class SuccessorArrays:
    """Padded ``(owner, slot)`` arrays mirroring a model's successor counts.

    Grown in place as new successors appear so that a value-iteration sweep
    is a single compiled pass over them.
    """

    def __init__(self, num_states: int, num_actions: int, terminal: Sequence[bool], width: int = 4):
        n = num_states * num_actions
        self.num_states, self.num_actions = num_states, num_actions
        self.idx = np.zeros((n, width), dtype=np.intp)
        self.cnt = np.zeros((n, width))
        self.nslot = np.zeros(n, dtype=np.intp)
        self.visits = np.zeros(n)
        self.rsum = np.zeros(n)
        self.terminal = np.asarray(terminal, dtype=bool)
        self._slot: list[dict[int, int]] = [{} for _ in range(n)]

    @classmethod
    def from_model(cls, model: ModelEstimate) -> "SuccessorArrays":
        arr = cls(model.num_states, model.num_actions, model.terminal,
                  width=max([len(s) for s in model.successors] + [1]))
        for o, succ in enumerate(model.successors):
            for s2, c in succ.items():
                arr._add(o, s2, c)
            arr.visits[o] = model.visits[o]
            arr.rsum[o] = model.reward_sum[o]
        return arr

    @classmethod
    def from_mdp(cls, mdp: TrueMDP) -> "SuccessorArrays":
        """Arrays whose count ratios are the true probabilities (one pseudo-visit per pair)."""
        arr = cls(mdp.num_states, mdp.num_actions, mdp.terminal,
                  width=max([len(row) for rows in mdp.outcomes for row in rows] + [1]))
        for s, rows in enumerate(mdp.outcomes):
            for a, row in enumerate(rows):
                if not row:
                    continue
                o = s * mdp.num_actions + a
                for s2, p, _ in row:
                    arr._add(o, s2, p)
                arr.visits[o] = 1.0
                arr.rsum[o] = mdp.expected_reward(s, a)
        return arr

    def _add(self, o: int, s2: int, count: float) -> None:
        slots = self._slot[o]
        k = slots.get(s2)
        if k is None:
            k = len(slots)
            if k == self.idx.shape[1]:
                grow = self.idx.shape[1]
                self.idx = np.hstack([self.idx, np.zeros((self.idx.shape[0], grow), dtype=np.intp)])
                self.cnt = np.hstack([self.cnt, np.zeros((self.cnt.shape[0], grow))])
            slots[s2] = k
            self.nslot[o] = k + 1
            self.idx[o, k] = s2
        self.cnt[o, k] += count

    def record(self, o: int, r: float, s2: int) -> None:
        self._add(o, s2, 1)
        self.visits[o] += 1
        self.rsum[o] += r

    def model_q(self, V: np.ndarray, gamma: float) -> np.ndarray:
        """Full backups of every pair from ``V``; NaN for unvisited pairs."""
        seen = self.visits > 0
        n = np.where(seen, self.visits, 1.0)
        q = (self.rsum + gamma * np.einsum("ij,ij->i", self.cnt, V[self.idx])) / n
        q[~seen] = np.nan
        return q

    def solve(self, V: np.ndarray, gamma: float, tolerance: float,
              optimism: Optional[tuple[int, float]]) -> tuple[np.ndarray, np.ndarray, int]:
        """In-place (symmetric Gauss-Seidel) Bellman-optimality sweeps until the max value change is below ``tolerance``.

        Pairs visited fewer than M times count as the optimistic constant
        when ``optimism`` is given; otherwise unvisited pairs are skipped and
        states without a visited action keep their value.  Because every
        value read in the final sweep moved by less than ``tolerance``, the
        Bellman residual of the result is below ``gamma * tolerance``.
        Returns ``(Q, V, sweeps)``.
        """
        V = np.array(V, dtype=float)
        V[self.terminal] = 0.0
        threshold, value = (max(optimism[0], 1), float(optimism[1])) if optimism is not None else (0, 0.0)
        sweeps = _gauss_seidel(self.idx, self.cnt, self.nslot, self.visits, self.rsum, self.terminal, V,
                               gamma, tolerance, threshold, value, MAX_SWEEPS)
        if sweeps < 0:
            raise RuntimeError("value iteration did not converge")
        return self.model_q(V, gamma), V, sweeps


@njit(cache=True)
def _gauss_seidel(idx, cnt, nslot, visits, rsum, terminal, V, gamma, tol, threshold, optimistic, max_sweeps):
    S = V.shape[0]
    A = visits.shape[0] // S
    for sweep in range(1, max_sweeps + 1):
        delta = 0.0
        # alternate the sweep direction so changes travel both ways through the state order
        for i in range(S):
            s = i if sweep % 2 else S - 1 - i
            if terminal[s]:
                continue
            best = -np.inf
            for o in range(s * A, s * A + A):
                n = visits[o]
                if n < threshold:
                    q = optimistic
                elif n == 0:
                    continue
                else:
                    acc = 0.0
                    for k in range(nslot[o]):
                        acc += cnt[o, k] * V[idx[o, k]]
                    q = (rsum[o] + gamma * acc) / n
                if q > best:
                    best = q
            if best > -np.inf:
                d = abs(best - V[s])
                if d > delta:
                    delta = d
                V[s] = best
        if delta < tol:
            return sweep
    return -1


def value_iteration(model: ModelEstimate, gamma: float, tolerance: float = 1e-10,
                    optimism: Optional[tuple[int, float]] = None,
                    initial_values: Optional[np.ndarray] = None) -> tuple[np.ndarray, np.ndarray]:
    """Sweep full backups over the visited pairs until the max value change is below ``tolerance``.

    Returns ``(Q, V)`` with ``Q`` shaped ``(num_states, num_actions)``; entries
    of unvisited pairs are NaN.  The returned ``V`` is the last sweep's output,
    so its Bellman residual is at most ``gamma * tolerance``.
    """
    if not 0.0 <= gamma < 1.0:
        raise ContractViolation(f"value iteration needs gamma < 1, got {gamma}")
    if not any(model.visits):
        raise ContractViolation("value iteration needs at least one visited pair")
    arrays = SuccessorArrays.from_model(model)
    V = np.zeros(model.num_states) if initial_values is None else np.array(initial_values, dtype=float)
    q, V, _ = arrays.solve(V, gamma, tolerance, optimism)
    return q.reshape(model.num_states, model.num_actions), V


def bellman_residual(model: ModelEstimate, V: np.ndarray, gamma: float,
                     optimism: Optional[tuple[int, float]] = None) -> float:
    """Max-norm violation of the optimality equation by ``V`` under the model."""
    V = np.asarray(V, dtype=float)
    arrays = SuccessorArrays.from_model(model)
    q = arrays.model_q(V, gamma)
    if optimism is not None:
        eff = np.where(arrays.visits < optimism[0], optimism[1], q)
    else:
        eff = np.where(np.isnan(q), -np.inf, q)
    v = eff.reshape(model.num_states, model.num_actions).max(axis=1)
    check = np.isfinite(v) & ~arrays.terminal
    return float(np.max(np.abs(v[check] - V[check]), initial=0.0))


class ValueIterationAgent(ControlAgent):
    """Reruns value iteration to convergence on the current model after every transition.

    Each solve is warm-started from the previous step's values; the fixed
    point does not depend on the starting point.
    """

    name = "value-iteration"

    def __init__(self, num_states, num_actions, config: PlannerConfig, terminal=None, rng=None):
        super().__init__(num_states, num_actions, config, terminal, rng)
        self.arrays = SuccessorArrays(num_states, num_actions, self.model.terminal)
        self.Q = np.array(self.Q)
        self.V = np.array(self.V)
        self.sweeps = 0

    def observe(self, s, a, r, s2):
        o = self.model.record_transition(s, a, r, s2)
        self.arrays.record(o, r, s2)
        q, self.V, sweeps = self.arrays.solve(self.V, self.gamma, self.config.vi_tolerance, self.optimism)
        self.sweeps += sweeps
        seen = ~np.isnan(q)
        self.Q[seen] = q[seen]
