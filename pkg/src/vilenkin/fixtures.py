"""Frozen constants produced by calibration runs.

A fixture file ``<experiment>_m<pattern>.json`` holds a list of records
``{experiment_id, constant_name, value, oracle_version, ...}``. ``value`` is
the oracle-measured extremal constant times ``1 + margin``. The directory can
be redirected with the ``VILENKIN_FIXTURE_DIR`` environment variable.
"""

from __future__ import annotations

import json
import os
from pathlib import Path

from .group import GeneratorSequence

ORACLE_VERSION = "1"
DEFAULT_MARGIN = 0.10
ENV_VAR = "VILENKIN_FIXTURE_DIR"


class FixtureMissingError(LookupError):
    pass


def fixture_dir() -> Path:
    env = os.environ.get(ENV_VAR)
    return Path(env) if env else Path(__file__).parent / "fixtures"


def group_label(g: GeneratorSequence) -> str:
    """Shortest repeating pattern of the generator, e.g. ``"2"`` or ``"2-3"``."""
    m = g.m
    for period in range(1, len(m) + 1):
        if all(m[i] == m[i % period] for i in range(len(m))):
            return "-".join(str(v) for v in m[:period])
    return "-".join(str(v) for v in m)


def fixture_path(experiment_id: str, g: GeneratorSequence, directory: Path | None = None) -> Path:
    directory = fixture_dir() if directory is None else Path(directory)
    return directory / f"{experiment_id}_m{group_label(g)}.json"


def load_records(experiment_id: str, g: GeneratorSequence, directory: Path | None = None) -> list[dict]:
    path = fixture_path(experiment_id, g, directory)
    if not path.exists():
        raise FixtureMissingError(f"no fixture at {path}; run `vilenkin calibrate {experiment_id}` first")
    return json.loads(path.read_text())


def load_constant(experiment_id: str, constant_name: str, g: GeneratorSequence, directory: Path | None = None) -> float:
    for rec in load_records(experiment_id, g, directory):
        if rec["constant_name"] == constant_name:
            return float(rec["value"])
    raise FixtureMissingError(f"fixture {experiment_id} has no constant {constant_name!r}")


def try_constant(experiment_id: str, constant_name: str, g: GeneratorSequence, directory: Path | None = None):
    try:
        return load_constant(experiment_id, constant_name, g, directory)
    except FixtureMissingError:
        return None


def write_records(
    experiment_id: str,
    g: GeneratorSequence,
    measured: dict[str, float],
    config: dict,
    directory: Path | None = None,
    margin: float = DEFAULT_MARGIN,
) -> Path:
    """Freeze ``measured`` constants (with ``margin``) and write them atomically."""
    records = [
        {
            "experiment_id": experiment_id,
            "constant_name": name,
            "value": value * (1.0 + margin),
            "measured": value,
            "margin": margin,
            "group": group_label(g),
            "oracle_version": ORACLE_VERSION,
            "config": config,
        }
        for name, value in sorted(measured.items())
    ]
    path = fixture_path(experiment_id, g, directory)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(".json.tmp")
    tmp.write_text(json.dumps(records, indent=2, sort_keys=True) + "\n")
    os.replace(tmp, path)
    return path
