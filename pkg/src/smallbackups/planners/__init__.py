from .config import PlannerConfig
from .control import ControlAgent, MooreAtkeson, PengWilliams, PSSmallBackups, select_action
from .prediction import SmallBackupPredictor, TD0Predictor, most_recent_pair, prediction_small_backups_step
from .vi import SuccessorArrays, ValueIterationAgent, bellman_residual, value_iteration

AGENTS = {cls.name: cls for cls in (PSSmallBackups, MooreAtkeson, PengWilliams, ValueIterationAgent)}

__all__ = [
    "AGENTS", "ControlAgent", "MooreAtkeson", "PengWilliams", "PSSmallBackups", "PlannerConfig",
    "SmallBackupPredictor", "SuccessorArrays", "TD0Predictor", "ValueIterationAgent", "bellman_residual",
    "most_recent_pair", "prediction_small_backups_step", "select_action", "value_iteration",
]
