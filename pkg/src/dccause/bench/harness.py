"""Synthetic benchmark runs: accuracy, timing, threshold sweep, decision rate.

Every trial is a (setting, model) pair. Its model and samples come from
generators keyed by ``(master_seed, setting, model, ...)``, so results do not
depend on how trials are scheduled across workers.
"""

from __future__ import annotations

import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from ..discrete import PairedSample
from ..errors import DCCauseError
from ..infer import Verdict, infer
from ..regression import dr_decide
from ..synth import gen_anm, gen_reference_set_model, make_rng, sample_model
from .config import ExperimentConfig
from .report import ExperimentReport, provenance

log = logging.getLogger(__name__)

# key-path tags for the derived generators
_MODEL, _SAMPLE, _PERM = 0, 1, 2


def build_model(config: ExperimentConfig, setting_index: int, model_index: int):
    params = config.settings()[setting_index][1]
    rng = make_rng(config.master_seed, setting_index, model_index, _MODEL)
    if config.family == "anm":
        return gen_anm(rng, config.x_size, config.y0_size, params["noise_domain"])
    return gen_reference_set_model(rng, params["x_size"], params["y_size"], config.n_references)


def draw_sample(config: ExperimentConfig, model, setting_index: int, model_index: int,
                n: int) -> PairedSample:
    rng = make_rng(config.master_seed, setting_index, model_index, _SAMPLE, n)
    return sample_model(model, n, rng)


def permutation_seed(config: ExperimentConfig, setting_index: int, model_index: int, n: int) -> int:
    ss = np.random.SeedSequence([config.master_seed, setting_index, model_index, _PERM, n])
    return int(ss.generate_state(1)[0])


def _score(verdict: Verdict) -> str:
    # ground truth in both synthetic families is X -> Y
    if verdict is Verdict.X_CAUSES_Y:
        return "correct"
    if verdict is Verdict.Y_CAUSES_X:
        return "wrong"
    return "undecided"


def run_trial(config: ExperimentConfig, setting_index: int, model_index: int,
              sample_sizes=None, methods=None) -> list[dict]:
    """Evaluate the configured methods on one model at every sample size."""
    sample_sizes = sample_sizes or config.sample_sizes
    methods = methods or config.methods
    model = build_model(config, setting_index, model_index)
    records = []
    for n in sample_sizes:
        sample = draw_sample(config, model, setting_index, model_index, n)
        for method in methods:
            rec = {"setting": setting_index, "model": model_index, "n": n, "method": method}
            t0 = time.perf_counter()
            try:
                if method == "dc":
                    res = infer(sample, config.epsilon)
                    rec.update(d_xy=res.measures.d_xy, d_yx=res.measures.d_yx, delta=res.delta)
                else:
                    res = dr_decide(sample, config.alpha, config.dr_forced, config.n_permutations,
                                    permutation_seed(config, setting_index, model_index, n))
                    rec.update(p_xy=res.p_xy, p_yx=res.p_yx)
                rec["outcome"] = _score(res.verdict)
            except DCCauseError as exc:
                rec["outcome"] = "undecided"
                rec["error"] = str(exc)
            rec["time_s"] = time.perf_counter() - t0
            records.append(rec)
    return records


def _trial_job(args):
    return run_trial(*args)


def run_trials(config: ExperimentConfig, sample_sizes=None, methods=None) -> list[dict]:
    """All trials of all settings, in (setting, model) order."""
    jobs = [(config, s, k, sample_sizes, methods)
            for s in range(len(config.settings()))
            for k in range(config.models_per_setting)]
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            chunks = list(pool.map(_trial_job, jobs, chunksize=max(1, len(jobs) // (4 * config.workers))))
    else:
        chunks = [_trial_job(j) for j in jobs]
    return [rec for chunk in chunks for rec in chunk]


def tally(outcomes) -> dict:
    outcomes = list(outcomes)
    correct = outcomes.count("correct")
    wrong = outcomes.count("wrong")
    undecided = outcomes.count("undecided")
    return {
        "models": len(outcomes),
        "correct": correct,
        "wrong": wrong,
        "undecided": undecided,
        "accuracy": correct / max(1, correct + wrong),
    }


def _report(config, kind, rows, summary=None) -> ExperimentReport:
    return ExperimentReport(kind=kind, rows=rows, config=config.echo(),
                            provenance=provenance(config, kind), summary=summary or {})


def run_accuracy(config: ExperimentConfig) -> ExperimentReport:
    """Forced-choice accuracy per (method, setting, sample size)."""
    config = config.replace(epsilon=0.0, dr_forced=True)
    records = run_trials(config)
    labels = [label for label, _ in config.settings()]
    rows = []
    for method in config.methods:
        for s, label in enumerate(labels):
            for n in config.sample_sizes:
                sel = [r for r in records
                       if r["method"] == method and r["setting"] == s and r["n"] == n]
                row = {"method": method, "setting": label, "n": n}
                row.update(tally(r["outcome"] for r in sel))
                row["errors"] = sum("error" in r for r in sel)
                row["time_mean_s"] = float(np.mean([r["time_s"] for r in sel]))
                rows.append(row)
    return _report(config, "accuracy", rows)


def run_timing(config: ExperimentConfig) -> ExperimentReport:
    """Total wall time of each method over ``timing_repetitions`` samples per size.

    Both methods see the same samples; runs are single-process and one warm-up
    call per method is discarded.
    """
    rows = []
    for s, (label, _) in enumerate(config.settings()):
        for n in config.sample_sizes:
            samples = []
            for k in range(config.timing_repetitions):
                model = build_model(config, s, k)
                samples.append((k, draw_sample(config, model, s, k, n)))
            for method in config.methods:
                if method == "dc":
                    def call(k, smp):
                        return infer(smp, config.epsilon)
                else:
                    def call(k, smp):
                        return dr_decide(smp, config.alpha, config.dr_forced, config.n_permutations,
                                         permutation_seed(config, s, k, n))
                _safe(call, *samples[0])
                t0 = time.perf_counter()
                failures = sum(not _safe(call, k, smp) for k, smp in samples)
                total = time.perf_counter() - t0
                rows.append({
                    "method": method, "setting": label, "n": n,
                    "repetitions": len(samples), "errors": failures,
                    "time_total_s": total, "time_mean_s": total / len(samples),
                })
                log.info("timing %s %s n=%d: %.3fs", method, label, n, total)
    return _report(config, "timing", rows)


def _safe(call, k, sample) -> bool:
    try:
        call(k, sample)
        return True
    except DCCauseError:
        return False


def dc_deltas(config: ExperimentConfig, n: int) -> dict[int, np.ndarray]:
    """``D_{Y->X} - D_{X->Y}`` per model for each setting at sample size ``n``.

    Failed trials (degenerate supports) yield NaN and count as undecided.
    """
    records = run_trials(config.replace(methods=["dc"]), sample_sizes=[n], methods=["dc"])
    out: dict[int, list] = {}
    for r in records:
        out.setdefault(r["setting"], []).append(r.get("delta", math.nan))
    return {s: np.asarray(v, dtype=np.float64) for s, v in out.items()}


def threshold_counts(deltas: np.ndarray, epsilon: float) -> dict:
    """Outcome counts when thresholding fixed deltas at ``epsilon``."""
    outcomes = []
    for d in deltas:
        verdict = Verdict.UNDECIDED if math.isnan(d) else decide_delta(d, epsilon)
        outcomes.append(_score(verdict))
    return tally(outcomes)


def decide_delta(delta: float, epsilon: float) -> Verdict:
    if delta > epsilon:
        return Verdict.X_CAUSES_Y
    if -delta > epsilon:
        return Verdict.Y_CAUSES_X
    return Verdict.UNDECIDED


def run_threshold_study(config: ExperimentConfig, epsilons=None) -> ExperimentReport:
    """Correct / wrong / undecided proportions of DC over an epsilon grid.

    The same trial set is thresholded at every epsilon.
    """
    epsilons = list(epsilons if epsilons is not None else config.epsilons)
    n = config.threshold_n
    deltas = dc_deltas(config, n)
    rows = []
    for s, (label, _) in enumerate(config.settings()):
        for eps in epsilons:
            t = threshold_counts(deltas[s], eps)
            m = t["models"]
            rows.append({
                "method": "dc", "setting": label, "n": n, "epsilon": eps,
                **t,
                "prop_correct": t["correct"] / m,
                "prop_wrong": t["wrong"] / m,
                "prop_undecided": t["undecided"] / m,
            })
    return _report(config.replace(epsilons=epsilons), "threshold", rows)


def decision_rate_curve(deltas: np.ndarray, rates) -> list[dict]:
    """Correct percentage among the top ``rate`` fraction of trials by ``|delta|``.

    Equivalent to lowering epsilon from 1 to 0; ties in ``|delta|`` keep trial
    order.
    """
    deltas = np.asarray(deltas, dtype=np.float64)
    deltas = np.where(np.isnan(deltas), 0.0, deltas)
    order = np.argsort(-np.abs(deltas), kind="stable")
    ranked = deltas[order]
    total = ranked.shape[0]
    out = []
    for rate in rates:
        k = min(total, max(1, math.ceil(rate * total - 1e-9)))
        top = ranked[:k]
        correct = int(np.count_nonzero(top > 0))
        out.append({
            "decision_rate": float(rate),
            "decided": k,
            "correct": correct,
            "correct_pct": 100.0 * correct / k,
            "epsilon_equiv": float(abs(top[-1])),
        })
    return out


def run_decision_rate_curve(config: ExperimentConfig) -> ExperimentReport:
    n = config.decision_n
    deltas = dc_deltas(config, n)
    rows = []
    for s, (label, _) in enumerate(config.settings()):
        for point in decision_rate_curve(deltas[s], config.decision_rates):
            rows.append({"method": "dc", "setting": label, "n": n, **point})
    return _report(config, "decision_rate", rows)

