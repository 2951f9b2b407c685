"""Experiment configuration: loading, validation and hashing."""

from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from ..errors import ConfigError
from ..synth import STANDARD_NOISE_DOMAINS, STANDARD_REFERENCE_SIZES, parse_noise_domain

FAMILIES = ("anm", "reference_set", "real_pairs")
METHODS = ("dc", "dr")
STANDARD_SAMPLE_SIZES = (200, 300, 500, 1000, 2000, 4000)
STANDARD_EPSILONS = (0.01, 0.05, 0.1)
# pairs that are multivariate or too large to process
STANDARD_EXCLUDED_PAIRS = (17, 44, 45, 52, 53, 54, 55, 68, 71, 75)
# stock-return pairs are discretized with round(100 * x)
STANDARD_SCALED_PAIRS = {65: 100.0, 66: 100.0, 67: 100.0}
DESK_MODELS = 100
FULL_SCALE_MODELS = 500


def _default_rates():
    return [round(0.05 * k, 2) for k in range(1, 21)]


@dataclass
class ExperimentConfig:
    family: str = "anm"
    noise_domains: list = field(default_factory=lambda: [list(d) for d in STANDARD_NOISE_DOMAINS])
    sizes: list = field(default_factory=lambda: [list(s) for s in STANDARD_REFERENCE_SIZES])
    x_size: int = 30
    y0_size: int = 30
    n_references: int | None = None
    sample_sizes: list = field(default_factory=lambda: list(STANDARD_SAMPLE_SIZES))
    models_per_setting: int = DESK_MODELS
    epsilon: float = 0.0
    epsilons: list = field(default_factory=lambda: list(STANDARD_EPSILONS))
    threshold_n: int = 4000
    decision_n: int = 5000
    decision_rates: list = field(default_factory=_default_rates)
    methods: list = field(default_factory=lambda: list(METHODS))
    master_seed: int = 0
    alpha: float = 0.05
    n_permutations: int = 1000
    dr_forced: bool = True
    timing_repetitions: int = 100
    workers: int = 1
    # real-pair protocol
    data_dir: str | None = None
    metadata: str | None = None
    replicates: int = 50
    resampling: str = "bootstrap"
    subsample_fraction: float = 0.8
    excluded_pairs: list = field(default_factory=lambda: list(STANDARD_EXCLUDED_PAIRS))
    scaled_pairs: dict = field(default_factory=lambda: dict(STANDARD_SCALED_PAIRS))
    cols: list = field(default_factory=lambda: [0, 1])
    max_support: int = 1000
    out: str | None = None

    def __post_init__(self):
        self.validate()

    def validate(self):
        if self.family not in FAMILIES:
            raise ConfigError(f"family must be one of {FAMILIES}, got {self.family!r}")
        if not self.sample_sizes or any(int(n) < 1 for n in self.sample_sizes):
            raise ConfigError("sample_sizes must be a nonempty list of positive integers")
        if int(self.models_per_setting) < 1:
            raise ConfigError("models_per_setting must be >= 1")
        if not self.methods or any(m not in METHODS for m in self.methods):
            raise ConfigError(f"methods must be a nonempty subset of {METHODS}")
        if not self.epsilon >= 0 or any(not e >= 0 for e in self.epsilons):
            raise ConfigError("epsilon values must be nonnegative")
        if not 0 < self.alpha < 1:
            raise ConfigError("alpha must lie in (0, 1)")
        if self.resampling not in ("bootstrap", "subsample"):
            raise ConfigError("resampling must be 'bootstrap' or 'subsample'")
        if any(not 0 < r <= 1 for r in self.decision_rates):
            raise ConfigError("decision rates must lie in (0, 1]")
        if int(self.workers) < 1 or int(self.replicates) < 1 or int(self.timing_repetitions) < 1:
            raise ConfigError("workers, replicates and timing_repetitions must be >= 1")
        if self.family == "anm":
            self.noise_domains = [list(parse_noise_domain(d)) for d in self.noise_domains]
            if not self.noise_domains:
                raise ConfigError("anm family needs at least one noise domain")
        if self.family == "reference_set":
            if not self.sizes or any(len(s) != 2 or min(s) < 4 for s in self.sizes):
                raise ConfigError("sizes must be a nonempty list of [x_size, y_size] pairs >= 4")
        self.sample_sizes = [int(n) for n in self.sample_sizes]
        self.scaled_pairs = {int(k): float(v) for k, v in self.scaled_pairs.items()}

    def settings(self) -> list[tuple[str, dict]]:
        """(label, generator parameters) for every synthetic setting."""
        if self.family == "anm":
            return [(f"noise={d[0]}..{d[-1]}", {"noise_domain": tuple(d)})
                    for d in self.noise_domains]
        if self.family == "reference_set":
            return [(f"{x}x{y}", {"x_size": int(x), "y_size": int(y)}) for x, y in self.sizes]
        raise ConfigError("real_pairs has no synthetic settings")

    def to_dict(self) -> dict:
        doc = dataclasses.asdict(self)
        doc["scaled_pairs"] = {str(k): v for k, v in sorted(self.scaled_pairs.items())}
        return doc

    def echo(self) -> dict:
        """Result-relevant fields; output location and worker count cannot change results."""
        doc = self.to_dict()
        doc.pop("out", None)
        doc.pop("workers", None)
        return doc

    def digest(self) -> str:
        return hashlib.sha256(json.dumps(self.echo(), sort_keys=True).encode()).hexdigest()[:16]

    def replace(self, **changes) -> "ExperimentConfig":
        return dataclasses.replace(self, **changes)


def load_config(path: str | Path | None = None, defaults: dict | None = None,
                **overrides) -> ExperimentConfig:
    """Read a JSON or YAML config file.

    Precedence: ``overrides`` that are not None, then the file, then
    ``defaults``, then the dataclass defaults.
    """
    doc = {}
    if path is not None:
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        try:
            doc = yaml.safe_load(text) if path.suffix in (".yml", ".yaml") else json.loads(text)
        except (json.JSONDecodeError, yaml.YAMLError) as exc:
            raise ConfigError(f"cannot parse config {path}: {exc}") from exc
        if not isinstance(doc, dict):
            raise ConfigError("config file must hold a mapping")
    doc = {**(defaults or {}), **doc}
    doc.update({k: v for k, v in overrides.items() if v is not None})
    known = {f.name for f in dataclasses.fields(ExperimentConfig)}
    unknown = sorted(set(doc) - known)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    try:
        return ExperimentConfig(**doc)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc
