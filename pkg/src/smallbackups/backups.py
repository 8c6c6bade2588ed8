"""Backup primitives over caller-owned value tables.

Every function mutates the table it backs up and returns the new value.
``counters`` is optional instrumentation; when given, successor reads,
action reads and predecessor visits are tallied so per-cycle costs can be
measured directly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import MutableSequence, Optional, Sequence

from .model import ContractViolation, ModelEstimate, UTable

Optimism = Optional[tuple[int, float]]  # (visit threshold M, optimistic value)


@dataclass
class BackupCounters:
    successor_reads: int = 0
    action_reads: int = 0
    predecessor_visits: int = 0

    @property
    def top_element(self) -> int:
        return self.successor_reads + self.action_reads

    def snapshot(self) -> tuple[int, int, int]:
        return self.successor_reads, self.action_reads, self.predecessor_visits


def _visited(model: ModelEstimate, o: int) -> int:
    n = model.visits[o]
    if n == 0:
        raise ContractViolation(f"backup of unvisited owner {o}")
    return n


def _expected_successor_value(model, o, n, values, counters) -> float:
    succ = model.successors[o]
    if counters is not None:
        counters.successor_reads += len(succ)
    return sum(c * values[s2] for s2, c in succ.items()) / n


def full_value_backup(V: MutableSequence[float], model: ModelEstimate, s: int, gamma: float,
                      counters: Optional[BackupCounters] = None) -> float:
    """V(s) <- R-hat_s + gamma * sum_s' P-hat_s^s' V(s') on a state-keyed model."""
    o = model.owner(s)
    n = _visited(model, o)
    v = model.reward_sum[o] / n + gamma * _expected_successor_value(model, o, n, V, counters)
    V[s] = v
    return v


def small_value_backup(V: MutableSequence[float], U: UTable, model: ModelEstimate, s: int, s2: int,
                       gamma: float, counters: Optional[BackupCounters] = None) -> float:
    """Replace the stale snapshot of ``s2`` inside ``V(s)`` by its current value.

    The successor value is read before ``V(s)`` changes, so a self-loop
    stores the pre-backup value.
    """
    o = model.owner(s)
    c = model.successors[o].get(s2, 0)
    if c == 0:
        raise ContractViolation(f"small backup on unobserved pair ({s}, {s2})")
    tmp = V[s2]
    V[s] += gamma * c / model.visits[o] * (tmp - U.rows[o][s2])
    U.rows[o][s2] = tmp
    if counters is not None:
        counters.successor_reads += 1
    return V[s]


def value_correction(V: MutableSequence[float], U: UTable, model: ModelEstimate, s: int, r: float,
                     s2: int, gamma: float) -> float:
    """Restore the V/U relation after ``(s, r, s2)`` has been counted."""
    o = model.owner(s)
    n = model.visits[o]
    if n == 0 or model.successors[o].get(s2, 0) == 0:
        raise ContractViolation("value correction before the transition was recorded")
    u = U.ensure(o, s2, V[s2])
    v = (V[s] * (n - 1) + r + gamma * u) / n
    V[s] = v
    return v


def effective_value(Q: Sequence[float], model: ModelEstimate, o: int, optimism: Optimism) -> float:
    if optimism is not None and model.visits[o] < optimism[0]:
        return optimism[1]
    return Q[o]


def state_max(Q: Sequence[float], model: ModelEstimate, s: int, optimism: Optimism = None,
              counters: Optional[BackupCounters] = None) -> Optional[float]:
    """max_b Q(s, b) over effective values.

    Without optimism, unvisited actions are skipped; returns ``None`` when no
    action qualifies.
    """
    m = model.num_actions
    base = s * m
    if counters is not None:
        counters.action_reads += m
    best = None
    visits = model.visits
    for o in range(base, base + m):
        if optimism is not None:
            q = optimism[1] if visits[o] < optimism[0] else Q[o]
        elif visits[o] == 0:
            continue
        else:
            q = Q[o]
        if best is None or q > best:
            best = q
    return best


def full_action_value_backup_pair(Q: MutableSequence[float], V: MutableSequence[float], model: ModelEstimate,
                                  s: int, a: int, gamma: float, counters: Optional[BackupCounters] = None,
                                  optimism: Optimism = None) -> tuple[float, float]:
    """Q(s,a) <- R-hat + gamma * sum P-hat V(s'), then V(s) <- max_b Q(s,b)."""
    o = model.owner(s, a)
    n = _visited(model, o)
    Q[o] = model.reward_sum[o] / n + gamma * _expected_successor_value(model, o, n, V, counters)
    V[s] = state_max(Q, model, s, optimism, counters)
    return Q[o], V[s]


def full_state_backup(Q: MutableSequence[float], V: MutableSequence[float], model: ModelEstimate, s: int,
                      gamma: float, counters: Optional[BackupCounters] = None,
                      optimism: Optimism = None) -> float:
    """Back up every visited action of ``s`` from ``V``, then take the max once."""
    m = model.num_actions
    for o in range(s * m, s * m + m):
        n = model.visits[o]
        if n:
            Q[o] = model.reward_sum[o] / n + gamma * _expected_successor_value(model, o, n, V, counters)
    v = state_max(Q, model, s, optimism, counters)
    if v is not None:
        V[s] = v
    return V[s]


def small_action_value_backup(Q: MutableSequence[float], U: UTable, V: Sequence[float], model: ModelEstimate,
                              s: int, a: int, s2: int, gamma: float,
                              counters: Optional[BackupCounters] = None) -> float:
    o = model.owner(s, a)
    c = model.successors[o].get(s2, 0)
    if c == 0:
        raise ContractViolation(f"small backup on unobserved triple ({s}, {a}, {s2})")
    v2 = V[s2]
    Q[o] += gamma * c / model.visits[o] * (v2 - U.rows[o][s2])
    U.rows[o][s2] = v2
    if counters is not None:
        counters.successor_reads += 1
    return Q[o]


def action_value_correction(Q: MutableSequence[float], U: UTable, V: Sequence[float], model: ModelEstimate,
                            s: int, a: int, r: float, s2: int, gamma: float) -> float:
    """Weighted-average correction of Q(s,a) after ``(s, a, r, s2)`` was counted.

    A snapshot for a first-seen successor is created from ``V(s2)``.
    """
    o = model.owner(s, a)
    n = model.visits[o]
    if n == 0 or model.successors[o].get(s2, 0) == 0:
        raise ContractViolation("action-value correction before the transition was recorded")
    u = U.ensure(o, s2, V[s2])
    q = (Q[o] * (n - 1) + r + gamma * u) / n
    Q[o] = q
    return q


def td0_sample_backup(V: MutableSequence[float], s: int, r: float, s2: int, alpha: float, gamma: float) -> float:
    if not 0.0 <= alpha <= 1.0:
        raise ContractViolation(f"step size {alpha} outside [0, 1]")
    V[s] += alpha * (r + gamma * V[s2] - V[s])
    return V[s]


def decayed_step_size(visits: int, decay: float) -> float:
    """State-dependent step size 1 / (d (N_s - 1) + 1)."""
    if visits < 1:
        raise ContractViolation("step size needs at least one visit")
    return 1.0 / (decay * (visits - 1) + 1.0)


def relation_residual(values: Sequence[float], U: UTable, model: ModelEstimate, owner: int,
                      gamma: float) -> float:
    n = _visited(model, owner)
    rhs = model.reward_sum[owner] / n + gamma * sum(
        c * U.rows[owner][s2] for s2, c in model.successors[owner].items()) / n
    return abs(values[owner] - rhs)


def verify_relation(values: Sequence[float], U: UTable, model: ModelEstimate, owner: int, gamma: float,
                    tol: float = 1e-9) -> tuple[bool, float]:
    """Check value(owner) == R-hat + gamma * sum P-hat U(owner, .) to ``tol``.

    ``owner`` is a state for prediction models and ``s * A + a`` for control
    models.  A missing snapshot for an observed successor counts as a failure.
    """
    try:
        res = relation_residual(values, U, model, owner, gamma)
    except KeyError:
        return False, float("inf")
    return res < tol, res
