from .config import ExperimentConfig, Grid, load_config
from .csvio import CurvePoint, emit_csv, format_csv, read_csv
from .experiments import run_control_suite, run_prediction_suite
from .rng import trial_rngs

__all__ = [
    "CurvePoint", "ExperimentConfig", "Grid", "emit_csv", "format_csv", "load_config", "read_csv",
    "run_control_suite", "run_prediction_suite", "trial_rngs",
]
