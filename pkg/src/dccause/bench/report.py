"""Experiment reports and their CSV / JSON serialization."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .. import __version__

# columns holding wall-clock measurements; excluded from determinism checks
TIMING_SUFFIX = "_s"


def is_timing_field(name: str) -> bool:
    return name.startswith("time_") and name.endswith(TIMING_SUFFIX)


@dataclass
class ExperimentReport:
    kind: str
    rows: list[dict]
    config: dict
    provenance: dict
    summary: dict = field(default_factory=dict)

    @property
    def columns(self) -> list[str]:
        cols: list[str] = []
        for row in self.rows:
            for key in row:
                if key not in cols:
                    cols.append(key)
        return cols

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "provenance": self.provenance,
            "config": self.config,
            "summary": self.summary,
            "rows": self.rows,
        }

    def to_json(self) -> str:
        return json.dumps(_plain(self.to_dict()), indent=2, sort_keys=False) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=self.columns, lineterminator="\n")
        writer.writeheader()
        for row in self.rows:
            writer.writerow({k: _csv_value(v) for k, v in row.items()})
        return buf.getvalue()

    def write(self, out_dir: str | Path, stem: str | None = None) -> tuple[Path, Path]:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        stem = stem or self.kind
        csv_path = out_dir / f"{stem}.csv"
        json_path = out_dir / f"{stem}.json"
        csv_path.write_text(self.to_csv(), encoding="utf-8")
        json_path.write_text(self.to_json(), encoding="utf-8")
        return csv_path, json_path


def provenance(config, kind: str) -> dict:
    return {
        "kind": kind,
        "master_seed": config.master_seed,
        "config_hash": config.digest(),
        "tool_version": __version__,
        "numpy_version": np.__version__,
    }


def _csv_value(v):
    if isinstance(v, float):
        return repr(v)
    if v is None:
        return ""
    return v


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    return obj


def strip_timing(doc):
    """Copy of a report document (dict/list) with timing fields removed."""
    if isinstance(doc, dict):
        return {k: strip_timing(v) for k, v in doc.items() if not is_timing_field(k)}
    if isinstance(doc, list):
        return [strip_timing(v) for v in doc]
    return doc


def strip_timing_csv(text: str) -> str:
    """CSV text with timing columns removed."""
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        return text
    keep = [i for i, name in enumerate(rows[0]) if not is_timing_field(name)]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    for row in rows:
        writer.writerow([row[i] for i in keep])
    return buf.getvalue()
