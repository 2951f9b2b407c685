"""Synthetic model families and seeded sampling.

Two families are provided:

* ``anm``: ``Y = f(X) + N`` with ``f`` a random map ``{1..|X|} -> {1..|Y0|}``
  and ``N`` independent of ``X`` on a small integer domain.
* ``reference_set``: every conditional row ``P(Y|x)`` is an independent
  uniform pick from a small pool of random PMFs over ``{1..|Y|}``.

Random PMFs draw integer weights uniformly from ``{1, ..., max(1, size // 4)}``
and normalize them. In both families X is the cause.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass

import numpy as np

from .discrete import PairedSample
from .errors import ConfigError, DataError

__all__ = [
    "STANDARD_NOISE_DOMAINS",
    "STANDARD_REFERENCE_SIZES",
    "DiscreteModel",
    "make_rng",
    "gen_random_pmf",
    "gen_anm",
    "gen_reference_set_model",
    "sample_model",
    "parse_noise_domain",
    "sample_to_csv",
]

STANDARD_NOISE_DOMAINS = (
    (0, 1),
    (-1, 0, 1),
    (-2, -1, 0, 1, 2),
    (-3, -2, -1, 0, 1, 2, 3),
)
STANDARD_REFERENCE_SIZES = ((12, 12), (15, 15), (18, 18), (20, 20))


def make_rng(*key: int) -> np.random.Generator:
    """Generator for an integer key path, e.g. ``make_rng(master_seed, setting, model)``."""
    return np.random.default_rng(np.random.SeedSequence([int(k) for k in key]))


def gen_random_pmf(size: int, rng: np.random.Generator, upper: int | None = None) -> np.ndarray:
    """Random PMF with integer weights in ``{1, ..., upper}``.

    ``upper`` defaults to ``max(1, size // 4)``.
    """
    if size < 1:
        raise ConfigError(f"PMF size must be >= 1, got {size}")
    if upper is None:
        upper = max(1, size // 4)
    weights = rng.integers(1, upper + 1, size=size).astype(np.float64)
    return weights / weights.sum()


@dataclass(frozen=True)
class DiscreteModel:
    """Generative pair model with ground truth ``X -> Y``.

    ``conditional`` is always materialized (``M x L`` over ``y_support``); the
    ``anm`` fields ``f``, ``noise_support`` and ``noise_pmf`` and the
    ``reference_set`` fields ``references`` and ``assignment`` are set for
    their family only.
    """

    kind: str
    x_support: np.ndarray
    y_support: np.ndarray
    px: np.ndarray
    conditional: np.ndarray
    f: np.ndarray | None = None
    noise_support: np.ndarray | None = None
    noise_pmf: np.ndarray | None = None
    references: np.ndarray | None = None
    assignment: np.ndarray | None = None

    def joint(self) -> np.ndarray:
        return self.px[:, None] * self.conditional

    def to_dict(self) -> dict:
        doc = {
            "kind": self.kind,
            "truth": "x_causes_y",
            "x_support": self.x_support.tolist(),
            "y_support": self.y_support.tolist(),
            "px": self.px.tolist(),
        }
        if self.kind == "anm":
            doc["f"] = self.f.tolist()
            doc["noise_support"] = self.noise_support.tolist()
            doc["noise_pmf"] = self.noise_pmf.tolist()
        else:
            doc["references"] = self.references.tolist()
            doc["assignment"] = self.assignment.tolist()
        return doc

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, doc: dict) -> "DiscreteModel":
        kind = doc["kind"]
        xs = np.asarray(doc["x_support"], dtype=np.int64)
        px = np.asarray(doc["px"], dtype=np.float64)
        if kind == "anm":
            return _anm_model(xs, px, np.asarray(doc["f"], dtype=np.int64),
                              np.asarray(doc["noise_support"], dtype=np.int64),
                              np.asarray(doc["noise_pmf"], dtype=np.float64))
        if kind == "reference_set":
            ys = np.asarray(doc["y_support"], dtype=np.int64)
            refs = np.asarray(doc["references"], dtype=np.float64)
            assignment = np.asarray(doc["assignment"], dtype=np.int64)
            return cls("reference_set", xs, ys, px, refs[assignment],
                       references=refs, assignment=assignment)
        raise DataError(f"unknown model kind {kind!r}")

    @classmethod
    def from_json(cls, text: str) -> "DiscreteModel":
        return cls.from_dict(json.loads(text))


def _anm_model(xs, px, f, noise_support, noise_pmf) -> DiscreteModel:
    ys = np.unique((f[:, None] + noise_support[None, :]).ravel())
    cond = np.zeros((xs.shape[0], ys.shape[0]))
    cols = np.searchsorted(ys, f[:, None] + noise_support[None, :])
    np.add.at(cond, (np.repeat(np.arange(xs.shape[0]), noise_support.shape[0]), cols.ravel()),
              np.tile(noise_pmf, xs.shape[0]))
    return DiscreteModel("anm", xs, ys, px, cond, f=f,
                         noise_support=noise_support, noise_pmf=noise_pmf)


def parse_noise_domain(domain) -> tuple[int, ...]:
    """Parse ``"-2..2"``, ``"0,1"`` or a sequence of ints into a contiguous domain."""
    try:
        if isinstance(domain, str):
            text = domain.strip()
            if ".." in text:
                lo, hi = text.split("..", 1)
                values = tuple(range(int(lo), int(hi) + 1))
            else:
                values = tuple(int(v) for v in text.replace(" ", "").split(",") if v)
        else:
            values = tuple(int(v) for v in domain)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"cannot parse noise domain {domain!r}") from exc
    if not values:
        raise ConfigError("empty noise domain")
    values = tuple(sorted(set(values)))
    if values != tuple(range(values[0], values[-1] + 1)):
        raise ConfigError(f"noise domain must be a contiguous integer set, got {values}")
    return values


def gen_anm(rng: np.random.Generator, x_size: int = 30, y0_size: int = 30,
            noise_domain=STANDARD_NOISE_DOMAINS[0]) -> DiscreteModel:
    noise = np.asarray(parse_noise_domain(noise_domain), dtype=np.int64)
    if x_size < 1 or y0_size < 1:
        raise ConfigError("x_size and y0_size must be positive")
    xs = np.arange(1, x_size + 1, dtype=np.int64)
    f = rng.integers(1, y0_size + 1, size=x_size).astype(np.int64)
    px = gen_random_pmf(x_size, rng)
    noise_pmf = gen_random_pmf(noise.shape[0], rng)
    return _anm_model(xs, px, f, noise, noise_pmf)


def gen_reference_set_model(rng: np.random.Generator, x_size: int = 15, y_size: int = 15,
                            n_references: int | None = None) -> DiscreteModel:
    """Random ``P(X)`` with conditional rows drawn from a pool of random PMFs.

    The pool has ``max(1, y_size // 4)`` members unless ``n_references`` is given.
    """
    if x_size < 4 or y_size < 4:
        raise ConfigError(f"reference-set sizes must be >= 4, got ({x_size}, {y_size})")
    if n_references is None:
        n_references = max(1, y_size // 4)
    if n_references < 1:
        raise ConfigError("n_references must be >= 1")
    xs = np.arange(1, x_size + 1, dtype=np.int64)
    ys = np.arange(1, y_size + 1, dtype=np.int64)
    px = gen_random_pmf(x_size, rng)
    refs = np.stack([gen_random_pmf(y_size, rng) for _ in range(n_references)])
    assignment = rng.integers(0, n_references, size=x_size).astype(np.int64)
    return DiscreteModel("reference_set", xs, ys, px, refs[assignment],
                         references=refs, assignment=assignment)


def _draw(pmf: np.ndarray, size, rng: np.random.Generator) -> np.ndarray:
    cdf = np.cumsum(pmf)
    idx = np.searchsorted(cdf, rng.random(size) * cdf[-1], side="right")
    return np.minimum(idx, pmf.shape[0] - 1)


def sample_model(model: DiscreteModel, n: int, rng: np.random.Generator) -> PairedSample:
    """Draw ``n`` i.i.d. records from ``model``."""
    if n < 1:
        raise ConfigError(f"sample size must be >= 1, got {n}")
    xi = _draw(model.px, n, rng)
    if model.kind == "anm":
        y = model.f[xi] + model.noise_support[_draw(model.noise_pmf, n, rng)]
    else:
        cdf = np.cumsum(model.conditional, axis=1)
        u = rng.random(n) * cdf[xi, -1]
        yi = np.minimum((u[:, None] >= cdf[xi]).sum(axis=1), model.y_support.shape[0] - 1)
        y = model.y_support[yi]
    return PairedSample(model.x_support[xi], y)


def sample_to_csv(sample: PairedSample, header: bool = True) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if header:
        writer.writerow(["x", "y"])
    writer.writerows(sample.records())
    return buf.getvalue()
