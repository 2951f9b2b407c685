"""Empirical distance covariance, variance and correlation.

Observations pair a scalar ``alpha_i`` with a vector ``beta_i``. Pairwise
distances are absolute differences on the scalar side and Euclidean norms on
the vector side; both tables are double centered and combined with the
V-statistic estimator

    dcov = (1/n) * sqrt(sum_ij A_ij * B_ij)

Cost is O(n^2) time and memory, which is negligible here because ``n`` is a
support size rather than a sample size.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from .errors import ConsistencyError, DataError

__all__ = [
    "ObservationSet",
    "CenteredDistanceMatrices",
    "pairwise_distances",
    "double_center",
    "center_distances",
    "dcov",
    "dvar",
    "dcor",
]

# A side whose pairwise distances are all within this fraction of its largest
# observation norm is treated as constant (zero distance variance).
CONSTANT_RTOL = 1e-12
# sum(A*B) below -NEGATIVE_ATOL * n**2 is a bug, not round-off.
NEGATIVE_ATOL = 1e-9


@dataclass(frozen=True)
class ObservationSet:
    alpha: np.ndarray
    beta: np.ndarray

    def __post_init__(self):
        alpha = np.asarray(self.alpha, dtype=np.float64)
        beta = np.asarray(self.beta, dtype=np.float64)
        # alpha is normally scalar; vector-valued alpha is accepted so the
        # estimator can be evaluated with the sides swapped
        if alpha.ndim not in (1, 2):
            raise DataError("alpha must be a sequence of scalars or vectors")
        if beta.ndim == 1:
            beta = beta[:, None]
        if beta.ndim != 2:
            raise DataError("beta must be a sequence of equal-length vectors")
        if alpha.shape[0] != beta.shape[0]:
            raise DataError(
                f"alpha has {alpha.shape[0]} observations, beta has {beta.shape[0]}")
        if beta.shape[0] and beta.shape[1] < 1:
            raise DataError("beta vectors must have dimension >= 1")
        if not (np.all(np.isfinite(alpha)) and np.all(np.isfinite(beta))):
            raise DataError("observations must be finite")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", beta)

    @property
    def n(self) -> int:
        return int(self.alpha.shape[0])

    @property
    def d(self) -> int:
        return int(self.beta.shape[1])


@dataclass(frozen=True)
class CenteredDistanceMatrices:
    A: np.ndarray
    B: np.ndarray
    alpha_constant: bool = False
    beta_constant: bool = False

    @property
    def n(self) -> int:
        return int(self.A.shape[0])


def pairwise_distances(values: np.ndarray) -> np.ndarray:
    """Euclidean distance table of the rows of ``values`` (1-D input is scalar)."""
    values = np.asarray(values, dtype=np.float64)
    if values.ndim == 1:
        return np.abs(values[:, None] - values[None, :])
    return cdist(values, values)


def double_center(a: np.ndarray) -> np.ndarray:
    """Subtract row and column means and add back the grand mean."""
    row = a.mean(axis=1, keepdims=True)
    col = a.mean(axis=0, keepdims=True)
    return a - row - col + a.mean()


def _is_constant(dist: np.ndarray, values: np.ndarray) -> bool:
    scale = float(np.max(np.abs(values))) if values.size else 0.0
    return float(dist.max()) <= CONSTANT_RTOL * scale


def center_distances(obs: ObservationSet) -> CenteredDistanceMatrices:
    if obs.n < 2:
        raise DataError("need at least two observations")
    a = pairwise_distances(obs.alpha)
    b = pairwise_distances(obs.beta)
    alpha_constant = _is_constant(a, obs.alpha)
    beta_constant = _is_constant(b, obs.beta)
    A = np.zeros_like(a) if alpha_constant else double_center(a)
    B = np.zeros_like(b) if beta_constant else double_center(b)
    return CenteredDistanceMatrices(A, B, alpha_constant, beta_constant)


def _product_sum(A: np.ndarray, B: np.ndarray) -> float:
    n = A.shape[0]
    total = math.fsum((A * B).ravel())
    if total < -NEGATIVE_ATOL * n * n:
        raise ConsistencyError(
            f"negative distance covariance sum {total!r} exceeds round-off budget")
    return max(0.0, total)


def dcov(cd: CenteredDistanceMatrices) -> float:
    return math.sqrt(_product_sum(cd.A, cd.B)) / cd.n


def dvar(side) -> float:
    """Distance variance of one side: scalars (1-D) or row vectors (2-D)."""
    side = np.asarray(side, dtype=np.float64)
    if side.shape[0] < 2:
        raise DataError("need at least two observations")
    dist = pairwise_distances(side)
    if _is_constant(dist, side):
        return 0.0
    C = double_center(dist)
    return math.sqrt(_product_sum(C, C)) / C.shape[0]


def dcor(obs: ObservationSet) -> float:
    """Distance correlation in [0, 1]; exactly 0 when either side is constant."""
    cd = center_distances(obs)
    if cd.alpha_constant or cd.beta_constant:
        return 0.0
    ab = _product_sum(cd.A, cd.B)
    aa = _product_sum(cd.A, cd.A)
    bb = _product_sum(cd.B, cd.B)
    if aa == 0.0 or bb == 0.0:
        return 0.0
    # dcov / sqrt(dvar_a * dvar_b); the 1/n factors cancel
    r = math.sqrt(ab) / math.sqrt(math.sqrt(aa) * math.sqrt(bb))
    return min(1.0, max(0.0, r))
