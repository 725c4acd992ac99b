"""Empirical-Bayes shrinkage tests for the coefficients of parallel AR(1) series."""

__version__ = "0.1.0"

from .bootstrap import BootstrapConfig, TestResult, critical_value, run_tests
from .estimators import SeriesStats, fit_series, ljs_moments, shrink_variances
from .hyperparams import HyperParams, estimate_one_sided, estimate_two_sided
from .panel import HypothesisSpec, Panel, Side, TestKind, validate_panel
from .simulation import DgpConfig, PhiPrior, PowerPoint, SigmaPrior, evaluate, power_curve

__all__ = [
    "BootstrapConfig",
    "DgpConfig",
    "HyperParams",
    "HypothesisSpec",
    "Panel",
    "PhiPrior",
    "PowerPoint",
    "SeriesStats",
    "Side",
    "SigmaPrior",
    "TestKind",
    "TestResult",
    "critical_value",
    "estimate_one_sided",
    "estimate_two_sided",
    "evaluate",
    "fit_series",
    "ljs_moments",
    "power_curve",
    "run_tests",
    "shrink_variances",
    "validate_panel",
]
