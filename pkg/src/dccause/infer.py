"""Causal direction from the dependence between marginals and conditionals.

Each support value ``x`` contributes one observation ``(P(x), P(Y|x))``. If X
causes Y, the marginal of the cause carries no information about the
mechanism, so the distance correlation of the ``X -> Y`` factorization should
be the smaller of the two.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum

from .distance import ObservationSet, dcor
from .discrete import Direction, JointPMF, PairedSample, estimate_joint, factorize
from .errors import ConfigError, DataError

__all__ = [
    "Verdict",
    "DependencePair",
    "DecisionResult",
    "DEFAULT_EPSILON",
    "dependence_measures",
    "decide",
    "infer",
]

# Threshold suggested for applied use; benchmarks run forced choice (0).
DEFAULT_EPSILON = 0.05


class Verdict(str, Enum):
    X_CAUSES_Y = "x_causes_y"
    Y_CAUSES_X = "y_causes_x"
    UNDECIDED = "undecided"

    def mirrored(self) -> "Verdict":
        if self is Verdict.X_CAUSES_Y:
            return Verdict.Y_CAUSES_X
        if self is Verdict.Y_CAUSES_X:
            return Verdict.X_CAUSES_Y
        return self


@dataclass(frozen=True)
class DependencePair:
    d_xy: float
    d_yx: float

    def mirrored(self) -> "DependencePair":
        return DependencePair(self.d_yx, self.d_xy)


@dataclass(frozen=True)
class DecisionResult:
    measures: DependencePair
    epsilon: float
    verdict: Verdict
    n: int | None = None
    m: int | None = None
    l: int | None = None

    @property
    def delta(self) -> float:
        return self.measures.d_yx - self.measures.d_xy

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "l": self.l,
            "d_xy": self.measures.d_xy,
            "d_yx": self.measures.d_yx,
            "delta": self.delta,
            "epsilon": self.epsilon,
            "verdict": self.verdict.value,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _direction_dcor(joint: JointPMF, direction: Direction) -> float:
    view = factorize(joint, direction)
    return dcor(ObservationSet(view.marginal, view.conditional))


def dependence_measures(joint: JointPMF) -> DependencePair:
    """Distance correlations of both factorizations of ``joint``.

    Raises
    ------
    DataError
        If either support has fewer than two values.
    """
    m, l = joint.shape
    if m < 2 or l < 2:
        raise DataError(f"degenerate support: |X|={m}, |Y|={l} (need at least 2 each)")
    return DependencePair(
        d_xy=_direction_dcor(joint, Direction.X_TO_Y),
        d_yx=_direction_dcor(joint, Direction.Y_TO_X),
    )


def decide(measures: DependencePair, epsilon: float = 0.0) -> DecisionResult:
    """Apply the threshold rule. Ties at exactly ``epsilon`` stay undecided."""
    if not epsilon >= 0:
        raise ConfigError(f"epsilon must be nonnegative, got {epsilon!r}")
    delta = measures.d_yx - measures.d_xy
    if delta > epsilon:
        verdict = Verdict.X_CAUSES_Y
    elif -delta > epsilon:
        verdict = Verdict.Y_CAUSES_X
    else:
        verdict = Verdict.UNDECIDED
    return DecisionResult(measures, float(epsilon), verdict)


def infer(sample: PairedSample, epsilon: float = DEFAULT_EPSILON) -> DecisionResult:
    joint = estimate_joint(sample)
    result = decide(dependence_measures(joint), epsilon)
    m, l = joint.shape
    return DecisionResult(result.measures, result.epsilon, result.verdict,
                          n=sample.n, m=m, l=l)
