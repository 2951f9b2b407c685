"""Joint, marginal and conditional distributions of a pair of discrete variables.

Probabilities are plain frequency estimates. Support values that were never
observed are not represented, so every marginal entry is strictly positive and
every conditional row is well defined.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DataError

__all__ = [
    "Direction",
    "PairedSample",
    "JointPMF",
    "FactorizedView",
    "estimate_joint",
    "factorize",
]

# Dense bincount encoding is used when the code range is at most this many
# times the sample size; otherwise fall back to sorting.
_DENSE_RANGE_FACTOR = 4


class Direction(str, Enum):
    X_TO_Y = "x_to_y"
    Y_TO_X = "y_to_x"


@dataclass(frozen=True)
class PairedSample:
    """Paired integer observations ``(x_k, y_k)``."""

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x)
        y = np.asarray(self.y)
        if x.ndim != 1 or y.ndim != 1:
            raise DataError("sample columns must be one-dimensional")
        if x.shape != y.shape:
            raise DataError(
                f"column length mismatch: {x.shape[0]} x values, {y.shape[0]} y values")
        x = _as_int_codes(x, "x")
        y = _as_int_codes(y, "y")
        x.flags.writeable = False
        y.flags.writeable = False
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @classmethod
    def from_records(cls, records) -> "PairedSample":
        records = list(records)
        if not records:
            return cls(np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64))
        arr = np.asarray(records)
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise DataError("records must be (x, y) pairs")
        return cls(arr[:, 0], arr[:, 1])

    @property
    def n(self) -> int:
        return int(self.x.shape[0])

    def swapped(self) -> "PairedSample":
        return PairedSample(self.y, self.x)

    def records(self) -> list[tuple[int, int]]:
        return list(zip(self.x.tolist(), self.y.tolist()))


def _as_int_codes(values: np.ndarray, name: str) -> np.ndarray:
    if values.size == 0:
        return values.astype(np.int64)
    if np.issubdtype(values.dtype, np.integer):
        return values.astype(np.int64, copy=True)
    if np.issubdtype(values.dtype, np.bool_):
        return values.astype(np.int64)
    try:
        as_float = values.astype(np.float64)
    except (TypeError, ValueError) as exc:
        raise DataError(f"{name} column is not numeric") from exc
    if not np.all(np.isfinite(as_float)):
        raise DataError(f"{name} column contains non-finite values")
    as_int = np.rint(as_float)
    if not np.array_equal(as_int, as_float):
        raise DataError(f"{name} column contains non-integer values")
    return as_int.astype(np.int64)


@dataclass(frozen=True)
class JointPMF:
    """Dense ``M x L`` probability table over the observed supports.

    ``counts`` keeps the integer frequency table the probabilities came from
    (``None`` when the table was built directly from probabilities).
    """

    x_support: np.ndarray
    y_support: np.ndarray
    p: np.ndarray
    counts: np.ndarray | None = None

    def __post_init__(self):
        p = np.asarray(self.p, dtype=np.float64)
        xs = np.asarray(self.x_support)
        ys = np.asarray(self.y_support)
        if p.ndim != 2 or p.shape != (xs.shape[0], ys.shape[0]):
            raise DataError(
                f"table shape {p.shape} does not match supports "
                f"({xs.shape[0]}, {ys.shape[0]})")
        if p.size == 0:
            raise DataError("empty joint table")
        if np.any(p < 0) or not np.all(np.isfinite(p)):
            raise DataError("joint table entries must be finite and nonnegative")
        if abs(p.sum() - 1.0) > 1e-12:
            raise DataError(f"joint table sums to {p.sum()!r}, not 1")
        if np.any(p.sum(axis=1) <= 0) or np.any(p.sum(axis=0) <= 0):
            raise DataError("joint table has a zero-mass row or column")
        for arr in (p, xs, ys):
            arr.flags.writeable = False
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "x_support", xs)
        object.__setattr__(self, "y_support", ys)

    @property
    def shape(self) -> tuple[int, int]:
        return self.p.shape

    def transpose(self) -> "JointPMF":
        counts = None if self.counts is None else self.counts.T
        return JointPMF(self.y_support, self.x_support, self.p.T.copy(), counts)


@dataclass(frozen=True)
class FactorizedView:
    """Marginal of the conditioning variable and one conditional row per value."""

    marginal: np.ndarray
    conditional: np.ndarray


def encode_values(values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Map integer codes to dense indices; returns (sorted support, indices)."""
    lo = int(values.min())
    hi = int(values.max())
    span = hi - lo + 1
    if span <= _DENSE_RANGE_FACTOR * values.shape[0] + 16:
        shifted = values - lo
        present = np.bincount(shifted, minlength=span) > 0
        lookup = np.cumsum(present) - 1
        support = np.flatnonzero(present) + lo
        return support.astype(np.int64), lookup[shifted]
    support, index = np.unique(values, return_inverse=True)
    return support.astype(np.int64), index.reshape(-1)


def estimate_joint(sample: PairedSample) -> JointPMF:
    """Maximum-likelihood frequency table of ``sample``.

    Runs in time linear in the sample size when the integer codes span a
    range comparable to ``n``.

    Raises
    ------
    DataError
        If the sample is empty.
    """
    if sample.n == 0:
        raise DataError("empty sample")
    x_support, xi = encode_values(sample.x)
    y_support, yi = encode_values(sample.y)
    m, l = x_support.shape[0], y_support.shape[0]
    counts = np.bincount(xi * l + yi, minlength=m * l).reshape(m, l)
    p = counts / float(sample.n)
    # renormalize so the sum is exactly representable as 1 within 1e-12
    p = p / p.sum()
    counts.flags.writeable = False
    return JointPMF(x_support, y_support, p, counts)


def factorize(joint: JointPMF, direction: Direction | str = Direction.X_TO_Y) -> FactorizedView:
    """Split ``joint`` into a marginal and the opposite conditional.

    For ``x_to_y`` the marginal is ``P(X)`` and row ``i`` of the conditional is
    ``P(Y | x_i)``; ``y_to_x`` is the same computation on the transposed table,
    so a symmetric table gives bitwise-identical views.
    """
    direction = Direction(direction)
    table = joint.p if direction is Direction.X_TO_Y else joint.p.T
    if joint.counts is not None:
        # integer arithmetic keeps conditionals exact up to one rounding
        c = joint.counts if direction is Direction.X_TO_Y else joint.counts.T
        row_totals = c.sum(axis=1)
        marginal = row_totals / float(row_totals.sum())
        conditional = c / row_totals[:, None].astype(np.float64)
    else:
        marginal = table.sum(axis=1)
        conditional = table / marginal[:, None]
        marginal = marginal / marginal.sum()
    return FactorizedView(marginal, conditional)
