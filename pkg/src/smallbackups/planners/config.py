from __future__ import annotations

from dataclasses import dataclass
from typing import Optional


@dataclass
class PlannerConfig:
    """Settings shared by the control agents.

    ``optimism_threshold`` is the visit count M below which a state-action
    pair is valued at ``optimistic_value``.  ``optimism_in_backups=False``
    keeps optimism in action selection only.
    """

    update_cycles: int = 1
    gamma: float = 0.99
    epsilon: float = 0.05
    optimism_threshold: int = 4
    optimistic_value: float = 0.0
    optimism_in_backups: bool = True
    queue_cutoff: float = 1e-8
    vi_tolerance: float = 1e-6
    initial_value: float = 0.0

    def __post_init__(self):
        if self.update_cycles < 0:
            raise ValueError("update_cycles must be >= 0")
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError("epsilon must lie in [0, 1]")
        if self.optimism_threshold < 0:
            raise ValueError("optimism_threshold must be >= 0")
        if not 0.0 <= self.gamma < 1.0:
            raise ValueError("gamma must lie in [0, 1)")

    @property
    def selection_optimism(self) -> Optional[tuple[int, float]]:
        if self.optimism_threshold == 0:
            return None
        return self.optimism_threshold, self.optimistic_value

    @property
    def backup_optimism(self) -> Optional[tuple[int, float]]:
        return self.selection_optimism if self.optimism_in_backups else None
