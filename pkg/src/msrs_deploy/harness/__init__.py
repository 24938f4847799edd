"""Experiment configuration, seeded runs, result files and comparison."""

from .config import ConfigFieldError, ExperimentConfig, load_config
from .experiment import ExperimentResult, RunResult, compare, load_result, run_experiment
from .io import FrontRow, read_front

__all__ = [
    "ConfigFieldError",
    "ExperimentConfig",
    "ExperimentResult",
    "FrontRow",
    "RunResult",
    "compare",
    "load_config",
    "load_result",
    "read_front",
    "run_experiment",
]
