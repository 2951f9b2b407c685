"""Benchmark harness for the synthetic and real-pair experiments."""

from .config import ExperimentConfig, load_config
from .harness import run_accuracy, run_decision_rate_curve, run_threshold_study, run_timing
from .realpairs import discretize_column, run_real_pairs
from .report import ExperimentReport

__all__ = [
    "ExperimentConfig", "load_config", "ExperimentReport",
    "run_accuracy", "run_timing", "run_threshold_study", "run_decision_rate_curve",
    "run_real_pairs", "discretize_column",
]
