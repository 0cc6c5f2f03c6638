"""Scenario runner, property sweeps and the ``slag-lab`` command line."""

from .config import Param, ScenarioConfig, load_config
from .report import Check, ExperimentReport
from .scenarios import (
    run_counterexample_annulus,
    run_expcos_example,
    run_maximality_test,
    run_property_sweeps,
    run_transform,
)
from .sweeps import SUITES, run_suite

__all__ = [
    "Param",
    "ScenarioConfig",
    "load_config",
    "Check",
    "ExperimentReport",
    "run_counterexample_annulus",
    "run_expcos_example",
    "run_maximality_test",
    "run_property_sweeps",
    "run_transform",
    "SUITES",
    "run_suite",
]
