"""Policy-evaluation agents: one-small-backup-per-step prediction and TD(0)."""

from __future__ import annotations

from typing import Callable, Optional

from ..backups import (BackupCounters, decayed_step_size, small_value_backup, td0_sample_backup,
                       value_correction)
from ..model import ModelEstimate, UTable

Transition = tuple[int, float, int]
Selector = Callable[["SmallBackupPredictor", Transition], tuple[int, int]]


def most_recent_pair(agent: "SmallBackupPredictor", transition: Transition) -> tuple[int, int]:
    s, _, s2 = transition
    return s, s2


class SmallBackupPredictor:
    """Model-based value prediction that plans only with small backups.

    Each observed transition is counted, the owner's value is corrected for
    the model change, and then ``iterations`` small backups are applied to
    pairs chosen by ``selector``.
    """

    def __init__(self, num_states: int, gamma: float, iterations: int = 1,
                 selector: Optional[Selector] = None, initial_value: float = 0.0):
        self.gamma = gamma
        self.iterations = iterations
        self.selector = selector or most_recent_pair
        self.model = ModelEstimate(num_states)
        self.V = [initial_value] * num_states
        self.U = UTable(num_states)
        self.counters = BackupCounters()

    def observe(self, s: int, r: float, s2: int) -> None:
        prediction_small_backups_step(self, (s, r, s2), self.selector, self.iterations)


def prediction_small_backups_step(agent: SmallBackupPredictor, transition: Transition,
                                  selector: Selector, iterations: int) -> None:
    s, r, s2 = transition
    agent.model.record_transition(s, None, r, s2)
    value_correction(agent.V, agent.U, agent.model, s, r, s2, agent.gamma)
    for _ in range(iterations):
        sb, sb2 = selector(agent, transition)
        small_value_backup(agent.V, agent.U, agent.model, sb, sb2, agent.gamma, agent.counters)


class TD0Predictor:
    """TD(0) with either a constant step size or the decaying 1/(d(N_s-1)+1) schedule."""

    def __init__(self, num_states: int, gamma: float, alpha: Optional[float] = None,
                 decay: Optional[float] = None, initial_value: float = 0.0):
        if (alpha is None) == (decay is None):
            raise ValueError("give exactly one of alpha or decay")
        self.gamma = gamma
        self.alpha = alpha
        self.decay = decay
        self.V = [initial_value] * num_states
        self.visits = [0] * num_states

    def observe(self, s: int, r: float, s2: int) -> None:
        self.visits[s] += 1
        alpha = self.alpha if self.alpha is not None else decayed_step_size(self.visits[s], self.decay)
        td0_sample_backup(self.V, s, r, s2, alpha, self.gamma)
