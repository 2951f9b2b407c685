"""Causal direction inference for pairs of discrete variables."""

__version__ = "0.1.0"

from .distance import ObservationSet, dcor, dcov, dvar, center_distances
from .discrete import Direction, JointPMF, PairedSample, estimate_joint, factorize
from .errors import ConfigError, ConsistencyError, DataError, DCCauseError
from .infer import DecisionResult, DependencePair, Verdict, decide, dependence_measures, infer
from .regression import dr_decide, fit_regression, independence_test

__all__ = [
    "ObservationSet", "dcor", "dcov", "dvar", "center_distances",
    "Direction", "JointPMF", "PairedSample", "estimate_joint", "factorize",
    "ConfigError", "ConsistencyError", "DataError", "DCCauseError",
    "DecisionResult", "DependencePair", "Verdict", "decide", "dependence_measures", "infer",
    "dr_decide", "fit_regression", "independence_test",
]
