"""Prioritized-sweeping control agents.

All agents share the count-based model, epsilon-greedy action selection over
optimistic values, and the update-cycle budget.  They differ in what sits on
the queue and in the backup applied to the top element:

* ``PSSmallBackups``: states; top state gets V <- max_b Q, then every
  predecessor pair receives a small backup.
* ``MooreAtkeson``: states; top state gets a full backup of all its actions.
* ``PengWilliams``: (pair, successor) triples; top triple gets a backup with
  the effect of one small action-value backup, at full-backup cost.
"""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np

from ..backups import (BackupCounters, action_value_correction, effective_value, full_state_backup,
                       state_max)
from ..model import ModelEstimate, UTable
from ..pqueue import IndexedPQueue
from .config import PlannerConfig


def select_action(Q: Sequence[float], model: ModelEstimate, s: int, config: PlannerConfig,
                  rng: np.random.Generator) -> int:
    """Epsilon-greedy over effective values; ties go to the lowest action index."""
    m = model.num_actions
    if rng.random() < config.epsilon:
        return min(int(rng.random() * m), m - 1)
    threshold, optimistic = config.optimism_threshold, config.optimistic_value
    visits = model.visits
    base = s * m
    best_a, best_q = 0, None
    for a in range(m):
        o = base + a
        q = optimistic if visits[o] < threshold else Q[o]
        if best_q is None or q > best_q:
            best_a, best_q = a, q
    return best_a


class ControlAgent:
    name = "base"

    def __init__(self, num_states: int, num_actions: int, config: PlannerConfig,
                 terminal: Optional[Sequence[bool]] = None, rng: Optional[np.random.Generator] = None):
        self.config = config
        self.gamma = config.gamma
        self.num_actions = num_actions
        self.model = ModelEstimate(num_states, num_actions, terminal)
        init = config.initial_value
        self.Q = [init] * (num_states * num_actions)
        self.V = [0.0 if t else init for t in self.model.terminal]
        self.counters = BackupCounters()
        self.queue = IndexedPQueue(config.queue_cutoff)
        self.rng = rng if rng is not None else np.random.default_rng()
        self.optimism = config.backup_optimism

    def act(self, s: int) -> int:
        return select_action(self.Q, self.model, s, self.config, self.rng)

    def observe(self, s: int, a: int, r: float, s2: int) -> None:
        self.update_model(s, a, r, s2)
        for _ in range(self.config.update_cycles):
            if not self.update_cycle():
                break

    def update_model(self, s: int, a: int, r: float, s2: int) -> None:
        raise NotImplementedError

    def update_cycle(self) -> bool:
        """Run one pop-and-backup round; False when the queue was empty."""
        raise NotImplementedError

    def greedy_policy(self) -> list[int]:
        m = self.num_actions
        policy = []
        for s in range(self.model.num_states):
            row = [effective_value(self.Q, self.model, s * m + a, self.optimism) for a in range(m)]
            policy.append(int(np.argmax(row)))
        return policy


class PSSmallBackups(ControlAgent):
    """Prioritized sweeping where each cycle small-backs-up every predecessor.

    No U table is kept: the backup order guarantees every pair's snapshot of
    a successor equals that successor's current V.  ``Q_prev`` records the
    effective values at the time of the last V backup of a state; a state's
    priority is the largest drift of an action value since then.
    """

    name = "ps-small"

    def __init__(self, num_states, num_actions, config, terminal=None, rng=None):
        super().__init__(num_states, num_actions, config, terminal, rng)
        self.Q_prev = list(self.Q)

    def _eff(self, o: int) -> float:
        opt = self.optimism
        if opt is not None and self.model.visits[o] < opt[0]:
            return opt[1]
        return self.Q[o]

    def update_model(self, s, a, r, s2):
        model = self.model
        o = model.record_transition(s, a, r, s2)
        n = model.visits[o]
        self.Q[o] = (self.Q[o] * (n - 1) + r + self.gamma * self.V[s2]) / n
        self.queue.promote(s, abs(self._eff(o) - self.Q_prev[o]))

    def update_cycle(self):
        top = self.queue.pop_max()
        if top is None:
            return False
        s1 = top[0]
        model, Q, Q_prev, V = self.model, self.Q, self.Q_prev, self.V
        visits = model.visits
        opt = self.optimism
        m = self.num_actions
        best = None
        for o in range(s1 * m, s1 * m + m):
            if opt is not None and visits[o] < opt[0]:
                q = opt[1]
            elif opt is None and visits[o] == 0:
                continue
            else:
                q = Q[o]
            Q_prev[o] = q
            if best is None or q > best:
                best = q
        counters = self.counters
        counters.action_reads += m
        dv = best - V[s1]
        V[s1] = best
        if dv == 0.0:
            return True
        preds = model.predecessors[s1]
        counters.predecessor_visits += len(preds)
        successors = model.successors
        gdv = self.gamma * dv
        promote = self.queue.promote
        for o in preds:
            n = visits[o]
            q = Q[o] + gdv * successors[o][s1] / n
            Q[o] = q
            if opt is not None and n < opt[0]:
                q = opt[1]
            promote(o // m, abs(q - Q_prev[o]))
        return True


class MooreAtkeson(ControlAgent):
    """States on the queue; full backups of the popped state."""

    name = "moore-atkeson"

    def update_model(self, s, a, r, s2):
        model = self.model
        o = model.record_transition(s, a, r, s2)
        n = model.visits[o]
        succ = model.successors[o]
        V = self.V
        self.Q[o] = model.reward_sum[o] / n + self.gamma * sum(c * V[x] for x, c in succ.items()) / n
        v = state_max(self.Q, model, s, self.optimism)
        self.queue.promote(s, abs(v - V[s]))

    def update_cycle(self):
        top = self.queue.pop_max()
        if top is None:
            return False
        s1 = top[0]
        V = self.V
        old = V[s1]
        dv = abs(full_state_backup(self.Q, V, self.model, s1, self.gamma, self.counters, self.optimism) - old)
        if dv == 0.0:
            return True
        model = self.model
        preds = model.predecessors[s1]
        self.counters.predecessor_visits += len(preds)
        visits, successors = model.visits, model.successors
        promote = self.queue.promote
        m = self.num_actions
        for o in preds:
            promote(o // m, successors[o][s1] / visits[o] * dv)
        return True


class PengWilliams(ControlAgent):
    """(pair, successor) triples on the queue.

    The popped triple's pair is recomputed from its successor snapshots with
    the popped successor's snapshot refreshed, which changes Q exactly as a
    single small backup would while reading every successor.
    """

    name = "peng-williams"

    def __init__(self, num_states, num_actions, config, terminal=None, rng=None):
        super().__init__(num_states, num_actions, config, terminal, rng)
        self.U = UTable(len(self.Q))

    def update_model(self, s, a, r, s2):
        model = self.model
        o = model.record_transition(s, a, r, s2)
        action_value_correction(self.Q, self.U, self.V, model, s, a, r, s2, self.gamma)
        # seed with the change in V(s) that backing up this triple would cause
        pending = self.gamma * model.successors[o][s2] / model.visits[o] * (self.V[s2] - self.U.rows[o][s2])
        q = self.Q[o]
        self.Q[o] = q + pending
        v = state_max(self.Q, model, s, self.optimism)
        self.Q[o] = q
        self.queue.promote((o, s2), abs(v - self.V[s]))

    def triple_backup(self, o: int, s2: int) -> float:
        """Back up pair ``o`` towards the current V of ``s2``; returns the new Q."""
        model = self.model
        row = self.U.rows[o]
        V = self.V
        row[s2] = V[s2]
        n = model.visits[o]
        succ = model.successors[o]
        self.counters.successor_reads += len(succ)
        q = model.reward_sum[o] / n + self.gamma * sum(c * row[x] for x, c in succ.items()) / n
        self.Q[o] = q
        return q

    def update_cycle(self):
        top = self.queue.pop_max()
        if top is None:
            return False
        (o, s2), _ = top
        model = self.model
        m = self.num_actions
        s1 = o // m
        self.triple_backup(o, s2)
        V = self.V
        new = state_max(self.Q, model, s1, self.optimism, self.counters)
        dv = abs(new - V[s1])
        V[s1] = new
        if dv == 0.0:
            return True
        preds = model.predecessors[s1]
        self.counters.predecessor_visits += len(preds)
        visits, successors = model.visits, model.successors
        promote = self.queue.promote
        g = self.gamma * dv
        for p in preds:
            promote((p, s1), g * successors[p][s1] / visits[p])
        return True
