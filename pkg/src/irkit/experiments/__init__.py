"""Reproducible evaluation harnesses built on the core modules."""

from irkit.experiments.occlusion import SweepConfig, occlusion_sweep  # noqa: F401
from irkit.experiments.ols_report import OlsScenario, ols_sensitivity_report  # noqa: F401
from irkit.experiments.purity import PurityBenchConfig, purity_benchmark  # noqa: F401
