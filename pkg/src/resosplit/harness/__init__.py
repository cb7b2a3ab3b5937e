"""Config-driven experiments, output files and the verification report."""

from .checks import verify_suite
from .config import ConfigError, ExperimentConfig, load_config
from .report import Check, VerificationReport
from .runner import fit_drift_slope, run_experiment, run_sweep

__all__ = [
    "Check",
    "ConfigError",
    "ExperimentConfig",
    "VerificationReport",
    "fit_drift_slope",
    "load_config",
    "run_experiment",
    "run_sweep",
    "verify_suite",
]
