"""Discretization and resampling protocol for real cause-effect pair files.

Pair files are whitespace-separated numeric tables named ``pairNNNN.txt``.
The metadata file is either the benchmark's ``pairmeta.txt`` (columns: id,
first and last cause column, first and last effect column, weight) or a
two-column ``id direction`` table with ``x_causes_y`` / ``y_causes_x``.
"""

from __future__ import annotations

import logging
import math
from pathlib import Path

import numpy as np

from ..discrete import PairedSample
from ..errors import ConfigError, DataError, DCCauseError
from ..infer import Verdict, dependence_measures
from ..discrete import estimate_joint
from ..synth import make_rng
from .config import ExperimentConfig
from .harness import decide_delta, tally
from .report import ExperimentReport, provenance

log = logging.getLogger(__name__)

_DIRECTION_ALIASES = {
    "x_causes_y": Verdict.X_CAUSES_Y, "x->y": Verdict.X_CAUSES_Y, "->": Verdict.X_CAUSES_Y,
    "y_causes_x": Verdict.Y_CAUSES_X, "y->x": Verdict.Y_CAUSES_X, "<-": Verdict.Y_CAUSES_X,
}


def parse_rule(rule) -> float | None:
    """``"auto"`` -> None; ``"scale:<k>"`` or a number -> k."""
    if rule is None or rule == "auto":
        return None
    if isinstance(rule, (int, float)):
        k = float(rule)
    elif isinstance(rule, str) and rule.startswith("scale:"):
        try:
            k = float(rule.split(":", 1)[1])
        except ValueError as exc:
            raise ConfigError(f"bad discretization rule {rule!r}") from exc
    else:
        raise ConfigError(f"discretization rule must be 'auto' or 'scale:<k>', got {rule!r}")
    if not math.isfinite(k) or k <= 0:
        raise ConfigError("scale factor must be a positive finite number")
    return k


def round_half_away(values: np.ndarray) -> np.ndarray:
    return (np.sign(values) * np.floor(np.abs(values) + 0.5)).astype(np.int64)


def discretize_column(values, rule="auto") -> np.ndarray:
    """Integer codes for a real-valued column.

    ``auto`` rounds ``20 * v`` when every ``|v| < 1`` and ``v`` otherwise;
    ``scale:k`` rounds ``k * v``. Halves round away from zero.
    """
    values = np.asarray(values, dtype=np.float64).reshape(-1)
    if values.size == 0:
        raise DataError("cannot discretize an empty column")
    if not np.all(np.isfinite(values)):
        raise DataError("column contains non-finite values")
    k = parse_rule(rule)
    if k is None:
        k = 20.0 if np.max(np.abs(values)) < 1 else 1.0
    return round_half_away(k * values)


def read_pair_file(path: str | Path, cols=(0, 1)) -> tuple[np.ndarray, np.ndarray]:
    path = Path(path)
    try:
        table = np.loadtxt(path, ndmin=2)
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    except ValueError as exc:
        raise DataError(f"{path} is not a numeric table: {exc}") from exc
    i, j = cols
    if table.shape[1] <= max(i, j):
        raise DataError(f"{path} has {table.shape[1]} columns, need column {max(i, j)}")
    return table[:, i], table[:, j]


def read_metadata(path: str | Path) -> dict[int, Verdict]:
    """Map pair id to its ground-truth direction."""
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read pair metadata {path}: {exc}") from exc
    truth = {}
    for lineno, line in enumerate(lines, 1):
        parts = line.split()
        if not parts or parts[0].startswith("#"):
            continue
        try:
            pair_id = int(parts[0])
            if len(parts) >= 5:
                cause_first = int(float(parts[1]))
                effect_first = int(float(parts[3]))
                truth[pair_id] = (Verdict.X_CAUSES_Y if cause_first < effect_first
                                  else Verdict.Y_CAUSES_X)
            elif len(parts) == 2:
                truth[pair_id] = _DIRECTION_ALIASES[parts[1].lower()]
            else:
                raise ValueError(line)
        except (ValueError, KeyError) as exc:
            raise ConfigError(f"{path}:{lineno}: cannot parse metadata line {line!r}") from exc
    return truth


def _pair_path(data_dir: Path, pair_id: int) -> Path:
    return data_dir / f"pair{pair_id:04d}.txt"


def resample(n: int, rng: np.random.Generator, scheme: str, fraction: float) -> np.ndarray:
    if scheme == "bootstrap":
        return rng.integers(0, n, size=n)
    size = max(2, int(round(fraction * n)))
    return rng.choice(n, size=min(n, size), replace=False)


def evaluate_pair(config: ExperimentConfig, pair_id: int, x_raw, y_raw,
                  truth: Verdict) -> dict:
    rule = config.scaled_pairs.get(pair_id, "auto")
    x = discretize_column(x_raw, rule)
    y = discretize_column(y_raw, rule)
    full = estimate_joint(PairedSample(x, y))
    m, l = full.shape
    if m < 2 or l < 2:
        raise DataError(f"degenerate support after discretization: |X|={m}, |Y|={l}")
    if max(m, l) > config.max_support:
        raise DataError(f"support too large after discretization: |X|={m}, |Y|={l}")
    outcomes = []
    for rep in range(config.replicates):
        rng = make_rng(config.master_seed, pair_id, rep)
        idx = resample(x.shape[0], rng, config.resampling, config.subsample_fraction)
        try:
            meas = dependence_measures(estimate_joint(PairedSample(x[idx], y[idx])))
            verdict = decide_delta(meas.d_yx - meas.d_xy, 0.0)
        except DataError:
            verdict = Verdict.UNDECIDED
        if verdict is Verdict.UNDECIDED:
            outcomes.append("undecided")
        else:
            outcomes.append("correct" if verdict is truth else "wrong")
    row = {"pair": pair_id, "truth": truth.value, "n": int(x.shape[0]), "m": m, "l": l}
    row.update(tally(outcomes))
    row["replicates"] = row.pop("models")
    return row


def run_real_pairs(config: ExperimentConfig) -> ExperimentReport:
    """Score DC on every retained pair with ``replicates`` resamples each.

    Per-pair failures (missing file, degenerate support) are recorded in the
    row's ``error`` field and left out of both aggregate accuracies.
    """
    if not config.data_dir:
        raise ConfigError("real_pairs needs data_dir")
    data_dir = Path(config.data_dir)
    meta_path = Path(config.metadata) if config.metadata else data_dir / "pairmeta.txt"
    truth = read_metadata(meta_path)
    excluded = set(int(p) for p in config.excluded_pairs)
    rows = []
    for pair_id in sorted(truth):
        if pair_id in excluded:
            continue
        try:
            x_raw, y_raw = read_pair_file(_pair_path(data_dir, pair_id), config.cols)
            row = evaluate_pair(config, pair_id, x_raw, y_raw, truth[pair_id])
            row["error"] = ""
        except DCCauseError as exc:
            log.warning("pair %d skipped: %s", pair_id, exc)
            row = {"pair": pair_id, "truth": truth[pair_id].value, "error": str(exc)}
        rows.append(row)

    scored = [r for r in rows if not r["error"]]
    correct = sum(r["correct"] for r in scored)
    decided = sum(r["correct"] + r["wrong"] for r in scored)
    summary = {
        "pairs_listed": len(truth),
        "pairs_excluded": len(excluded & set(truth)),
        "pairs_scored": len(scored),
        "pairs_failed": len(rows) - len(scored),
        "mean_pair_accuracy": float(np.mean([r["accuracy"] for r in scored])) if scored else None,
        "pooled_accuracy": correct / decided if decided else None,
    }
    return ExperimentReport(kind="real_pairs", rows=rows, config=config.echo(),
                            provenance=provenance(config, "real_pairs"), summary=summary)
