"""Brute-force oracles that measure the unnamed constants and freeze them.

Kernels here come from running sums of the character table
(:func:`vilenkin.kernels.fejer_table`) and convolutions are explicit sums
over the group, so none of these routes goes through the fast transform used
by the verification drivers.
"""

from __future__ import annotations

import numpy as np

from . import fixtures
from .experiments import (
    BOTH,
    EQ4_NMAX,
    EQ5_NMAX,
    EQ5_RANK,
    LEMMA4_NS,
    THEOREM1_ATOMS,
    THEOREM1_EXTRA,
    THEOREM1_NS,
    THEOREM1_SEED,
    _ensure_rank,
    _ptag,
    lemma4_ns,
    theorem1_atoms,
)
from .group import GeneratorSequence, Point, complement_sets, cylinder_mask, digit_table, index_set_mask, index_to_digits
from .kernels import Convention, _min_constant, fejer_table, lemma4_bound

__all__ = [
    "measure_eq4",
    "measure_eq5",
    "measure_lemma4",
    "measure_theorem1",
    "calibrate",
    "CALIBRATORS",
]


def _sub_index(g: GeneratorSequence, rank: int, x: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Canonical indices of ``x - t`` for index arrays ``x`` (shape a) and ``t`` (shape b)."""
    D = digit_table(g, rank)
    m = np.asarray(g.m[:rank])
    diff = (D[x][:, None, :] - D[t][None, :, :]) % m
    return diff @ np.asarray(g.M[:rank])


def measure_eq4(g: GeneratorSequence, n_max: int = EQ4_NMAX) -> dict[str, float]:
    N = g.min_rank(n_max)
    g = _ensure_rank(g, N)
    out = {}
    for conv in BOTH:
        K = fejer_table(g, N, n_max, conv)[1:]
        out[f"eq4_sup_l1_{conv.value}"] = float(np.abs(K).mean(axis=1).max())
    return out


def measure_eq5(g: GeneratorSequence, n_max: int = EQ5_NMAX, N: int = EQ5_RANK) -> dict[str, float]:
    g = _ensure_rank(g, N)
    out = {}
    for conv in BOTH:
        K = np.abs(fejer_table(g, N, max(n_max, g.M[index_to_digits(g, n_max).order]), conv))
        worst = 0.0
        for n in range(1, n_max + 1):
            order = index_to_digits(g, n).order
            rhs = sum(g.M[A] * K[g.M[A]] for A in range(order + 1))
            worst = max(worst, _min_constant(n * K[n], rhs))
        out[f"eq5_c_{conv.value}"] = worst
    return out


def measure_lemma4(g: GeneratorSequence, N_list=LEMMA4_NS) -> dict[str, float]:
    """Explicit sum over ``t`` in ``I_N`` of ``|K_n(x - t)|`` for every ``x`` in every cell."""
    g = _ensure_rank(g, max(N_list) + 1)
    out = {}
    for conv in BOTH:
        worst = 0.0
        for N in N_list:
            ns = lemma4_ns(g, N)
            R = g.min_rank(max(ns))
            K = np.abs(fejer_table(g, R, max(ns), conv))
            t_idx = np.flatnonzero(cylinder_mask(g, Point.zero(N), R))
            for spec in complement_sets(N, 0):
                x_idx = np.flatnonzero(index_set_mask(g, spec, R))
                diff = _sub_index(g, R, x_idx, t_idx)
                bound = lemma4_bound(g, spec.k, spec.l, N)
                for n in ns:
                    vals = K[n][diff].sum(axis=1) / g.M[R]
                    worst = max(worst, float(vals.max()) / bound)
        out[f"lemma4_ratio_{conv.value}"] = worst
    return out


def measure_theorem1(
    g: GeneratorSequence,
    p_list=(1 / 3, 0.4),
    N_list=THEOREM1_NS,
    atoms_per_N: int = THEOREM1_ATOMS,
    extra: int = THEOREM1_EXTRA,
    seed: int = THEOREM1_SEED,
    convs=BOTH,
) -> dict[str, float]:
    """``sigma_n a(x) = (1/M_R) sum_t a(t) K_n(x - t)`` summed over the support of each atom."""
    g = _ensure_rank(g, max(N_list) + extra)
    out = {}
    for conv in convs:
        for p in p_list:
            worst = 0.0
            for N in N_list:
                R = N + extra
                n_max = g.M[R]
                K = fejer_table(g, R, n_max, conv)[1:]
                weights = (np.arange(1, n_max + 1) + 1.0) ** (1.0 / p - 2.0)
                outside = ~cylinder_mask(g, Point.zero(N), R)
                x_idx = np.arange(g.M[R])
                for a in theorem1_atoms(g, p, N, atoms_per_N, seed):
                    a = a.refine(R)
                    t_idx = np.flatnonzero(a.values)
                    diff = _sub_index(g, R, x_idx, t_idx)
                    sigma = np.einsum("nxt,t->nx", K[:, diff], a.values[t_idx]) / g.M[R]
                    sup = (np.abs(sigma) / weights[:, None]).max(axis=0)
                    worst = max(worst, float(np.sum(sup[outside] ** p)) / g.M[R])
            out[f"theorem1_J_{_ptag(p)}_{Convention(conv).value}"] = worst
    return out


CALIBRATORS = {
    "eq4": measure_eq4,
    "eq5": measure_eq5,
    "lemma4": measure_lemma4,
    "theorem1": measure_theorem1,
}


def calibrate(experiment_id: str, g: GeneratorSequence, directory=None, margin: float = fixtures.DEFAULT_MARGIN, **kwargs):
    """Run the oracle for ``experiment_id`` and write its fixture file."""
    measured = CALIBRATORS[experiment_id](g, **kwargs)
    config = {"m": fixtures.group_label(g), **{k: (list(v) if isinstance(v, (tuple, list)) else v) for k, v in kwargs.items()}}
    path = fixtures.write_records(experiment_id, g, measured, config, directory, margin)
    return path, measured
