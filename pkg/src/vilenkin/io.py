"""CSV serialization of step functions and atoms.

A step function is written as ``<name>.csv`` with header
``cylinder_index,re,im`` and a JSON sidecar ``<name>.json`` holding
``{"m": [...], "N": rank}``. Atom files add ``p``, ``base_cylinder`` and
``seed`` to the sidecar.
"""

from __future__ import annotations

import csv
import json
import os
from pathlib import Path

import numpy as np

from .group import GeneratorSequence, Point, make_group
from .spaces import validate_atom
from .system import StepFunction

__all__ = ["save_step_function", "load_step_function", "save_atom", "load_atom"]


def _sidecar(path: Path) -> Path:
    return path.with_suffix(".json")


def _atomic_write(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    os.replace(tmp, path)


def save_step_function(f: StepFunction, path, extra: dict | None = None) -> Path:
    path = Path(path).with_suffix(".csv")
    path.parent.mkdir(parents=True, exist_ok=True)
    vals = f.values.astype(np.complex128)
    lines = ["cylinder_index,re,im"]
    lines += [f"{c},{v.real!r},{v.imag!r}" for c, v in enumerate(vals.tolist())]
    _atomic_write(path, "\r\n".join(lines) + "\r\n")
    meta = {"m": list(f.group.m[: max(f.rank, 1)]), "N": f.rank}
    meta.update(extra or {})
    _atomic_write(_sidecar(path), json.dumps(meta, indent=2, sort_keys=True) + "\n")
    return path


def load_step_function(path, g: GeneratorSequence | None = None) -> StepFunction:
    """Read a step function back; the group is rebuilt from the sidecar unless given."""
    path = Path(path).with_suffix(".csv")
    meta = json.loads(_sidecar(path).read_text())
    N = int(meta["N"])
    if g is None:
        g = make_group(meta["m"], max(N, 1))
    vals = np.zeros(g.M[N], dtype=np.complex128)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != ["cylinder_index", "re", "im"]:
            raise ValueError(f"unexpected header {reader.fieldnames}")
        for row in reader:
            vals[int(row["cylinder_index"])] = complex(float(row["re"]), float(row["im"]))
    if not np.any(vals.imag):
        vals = vals.real
    return StepFunction(g, N, vals)


def save_atom(a: StepFunction, base: Point, p: float, path, seed: int | None = None) -> Path:
    validate_atom(a, base, p)
    return save_step_function(a, path, {"p": p, "base_cylinder": list(base.digits), "seed": seed})


def load_atom(path, g: GeneratorSequence | None = None) -> tuple[StepFunction, Point, float]:
    path = Path(path).with_suffix(".csv")
    meta = json.loads(_sidecar(path).read_text())
    a = load_step_function(path, g)
    base = Point(tuple(meta["base_cylinder"]))
    p = float(meta["p"])
    validate_atom(a, base, p)
    return a, base, p
