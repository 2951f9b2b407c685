"""Command-line interface.

Exit codes: 0 success, 1 usage or configuration error, 2 data error,
3 internal-consistency error.
"""

from __future__ import annotations

import json
import logging
import sys
from pathlib import Path

import click
import numpy as np

from . import __version__
from .bench.config import FULL_SCALE_MODELS, load_config
from .bench.harness import run_accuracy, run_decision_rate_curve, run_threshold_study, run_timing
from .bench.realpairs import discretize_column, run_real_pairs
from .distance import center_distances, dcor, dcov, dvar
from .errors import ConfigError, DCCauseError
from .infer import DEFAULT_EPSILON, infer
from .io import read_observation_table, read_sample_csv
from .regression import DEFAULT_ALPHA, DEFAULT_PERMUTATIONS, dr_decide
from .synth import gen_anm, gen_reference_set_model, make_rng, sample_model, sample_to_csv


@click.group()
@click.version_option(__version__, prog_name="dccause")
@click.option("-v", "--verbose", count=True, help="Log progress to stderr.")
def cli(verbose):
    """Infer causal direction between two discrete variables."""
    logging.basicConfig(level=logging.WARNING - 10 * min(verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")


@cli.command("infer")
@click.argument("input", type=click.File("r"), default="-")
@click.option("--method", type=click.Choice(["dc", "dr"]), default="dc", show_default=True)
@click.option("--epsilon", type=float, default=DEFAULT_EPSILON, show_default=True,
              help="Decision threshold for the dc method.")
@click.option("--alpha", type=float, default=DEFAULT_ALPHA, show_default=True,
              help="Significance level for the dr method.")
@click.option("--seed", type=int, default=0, show_default=True,
              help="Seed for dr permutation tests.")
@click.option("--permutations", type=int, default=DEFAULT_PERMUTATIONS, show_default=True)
@click.option("--forced/--no-forced", default=False, show_default=True,
              help="dr: always pick a direction.")
def infer_cmd(input, method, epsilon, alpha, seed, permutations, forced):
    """Read an x,y sample CSV and print the verdict as JSON."""
    sample = read_sample_csv(input)
    if method == "dc":
        result = infer(sample, epsilon).to_dict()
    else:
        result = dr_decide(sample, alpha, forced, permutations, seed).to_dict()
    click.echo(json.dumps(result))


@cli.command("dcor")
@click.argument("input", type=click.File("r"), default="-")
def dcor_cmd(input):
    """Distance correlation of a table with rows ``alpha, beta_1, ..., beta_d``."""
    obs = read_observation_table(input)
    result = {
        "n": obs.n,
        "d": obs.d,
        "dcov": dcov(center_distances(obs)),
        "dvar_alpha": dvar(obs.alpha),
        "dvar_beta": dvar(obs.beta),
        "dcor": dcor(obs),
    }
    click.echo(json.dumps(result))


@cli.command("synth")
@click.option("--family", type=click.Choice(["anm", "reference_set"]), default="anm",
              show_default=True)
@click.option("--x-size", type=int, default=None, help="|X| (default 30 for anm, 15 otherwise).")
@click.option("--y-size", type=int, default=None, help="|Y0| for anm, |Y| otherwise.")
@click.option("--noise-domain", default="0..1", show_default=True,
              help="anm noise support, e.g. '-2..2' or '0,1'.")
@click.option("--references", type=int, default=None, help="Reference-set pool size.")
@click.option("--n", "n", type=int, default=1000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--model-out", type=click.Path(dir_okay=False, writable=True), default=None,
              help="Write the model JSON here.")
@click.option("--sample-out", type=click.File("w"), default="-", show_default=True)
@click.option("--no-header", is_flag=True, help="Omit the x,y header line.")
def synth_cmd(family, x_size, y_size, noise_domain, references, n, seed, model_out,
              sample_out, no_header):
    """Generate a synthetic model and a sample from it."""
    model_rng = make_rng(seed, 0)
    if family == "anm":
        model = gen_anm(model_rng, x_size or 30, y_size or 30, noise_domain)
    else:
        model = gen_reference_set_model(model_rng, x_size or 15, y_size or 15, references)
    sample = sample_model(model, n, make_rng(seed, 1))
    if model_out:
        Path(model_out).write_text(model.to_json(indent=2) + "\n", encoding="utf-8")
    sample_out.write(sample_to_csv(sample, header=not no_header))


@cli.command("discretize")
@click.argument("input", type=click.File("r"), default="-")
@click.option("--rule", default="auto", show_default=True, help="'auto' or 'scale:<k>'.")
@click.option("--cols", default=None, help="Comma-separated 0-based columns to keep.")
def discretize_cmd(input, rule, cols):
    """Discretize each numeric column of a whitespace/comma table."""
    rows = [line.replace(",", " ").split() for line in input if line.strip()]
    try:
        table = np.asarray(rows, dtype=np.float64)
    except ValueError as exc:
        raise click.UsageError(f"input is not a rectangular numeric table: {exc}") from exc
    if table.ndim != 2 or table.size == 0:
        raise click.UsageError("input is empty")
    if cols:
        table = table[:, [int(c) for c in cols.split(",")]]
    out = np.column_stack([discretize_column(table[:, j], rule) for j in range(table.shape[1])])
    for row in out:
        click.echo(",".join(str(v) for v in row))


_BENCH_DEFAULTS = {
    "accuracy": {"family": "anm"},
    "timing": {"family": "reference_set", "sizes": [[15, 15], [20, 20]]},
    "threshold": {"family": "reference_set", "sizes": [[15, 15], [20, 20]], "methods": ["dc"]},
    "decision-rate": {"family": "reference_set", "sizes": [[15, 15]], "methods": ["dc"]},
    "real-pairs": {"family": "real_pairs", "methods": ["dc"]},
}
_RUNNERS = {
    "accuracy": run_accuracy,
    "timing": run_timing,
    "threshold": run_threshold_study,
    "decision-rate": run_decision_rate_curve,
    "real-pairs": run_real_pairs,
}


@cli.command("bench")
@click.argument("experiment", type=click.Choice(sorted(_RUNNERS)))
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
              default=None, help="JSON or YAML experiment config.")
@click.option("--out", type=click.Path(file_okay=False), default="results", show_default=True)
@click.option("--models", type=int, default=None, help="Models per setting.")
@click.option("--full-scale", is_flag=True, help=f"Use {FULL_SCALE_MODELS} models per setting.")
@click.option("--seed", type=int, default=None, help="Master seed.")
@click.option("--workers", type=int, default=None, help="Worker processes.")
@click.option("--data-dir", type=click.Path(file_okay=False), default=None,
              help="real-pairs: directory of pairNNNN.txt files.")
@click.option("--metadata", type=click.Path(dir_okay=False), default=None,
              help="real-pairs: ground-truth file (default DATA_DIR/pairmeta.txt).")
@click.option("--cols", default=None, help="real-pairs: two 0-based columns, e.g. '0,1'.")
def bench_cmd(experiment, config_path, out, models, full_scale, seed, workers, data_dir,
              metadata, cols):
    """Run a benchmark experiment and write CSV + JSON reports to --out."""
    if full_scale and models is not None:
        raise click.UsageError("--models and --full-scale are mutually exclusive")
    if full_scale:
        models = FULL_SCALE_MODELS
    if cols is not None:
        try:
            cols = [int(c) for c in cols.split(",")]
        except ValueError:
            raise click.UsageError("--cols takes two comma-separated integers") from None
        if len(cols) != 2:
            raise click.UsageError("--cols takes two comma-separated integers")
    config = load_config(
        config_path, defaults=_BENCH_DEFAULTS[experiment],
        models_per_setting=models, master_seed=seed, workers=workers,
        data_dir=data_dir, metadata=metadata, cols=cols, out=out,
    )
    report = _RUNNERS[experiment](config)
    csv_path, json_path = report.write(out, stem=report.kind)
    click.echo(f"wrote {csv_path}")
    click.echo(f"wrote {json_path}")
    if report.summary:
        click.echo(json.dumps(report.summary))


def main(argv=None) -> int:
    try:
        cli.main(args=argv, prog_name="dccause", standalone_mode=False)
    except click.exceptions.Abort:
        click.echo("aborted", err=True)
        return 1
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.ClickException as exc:
        exc.show()
        return 1
    except ConfigError as exc:
        click.echo(f"error: {exc}", err=True)
        return 1
    except DCCauseError as exc:
        click.echo(f"error: {exc}", err=True)
        return exc.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
