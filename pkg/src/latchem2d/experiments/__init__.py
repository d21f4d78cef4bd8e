"""Experiment drivers, fitting utilities and the command-line interface."""
from .config import ExperimentConfig, parse_config_text, parse_value
from .fitting import FitResult, fit_power_law
from .references import ContinuumReference, rescale_energy, rydberg
from .runners import DEFAULTS, RUNNERS, ExperimentResult, make_config

__all__ = ["ExperimentConfig", "parse_config_text", "parse_value", "FitResult", "fit_power_law",
           "ContinuumReference", "rescale_energy", "rydberg", "DEFAULTS", "RUNNERS", "ExperimentResult",
           "make_config"]
