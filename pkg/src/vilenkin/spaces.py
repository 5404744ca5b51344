"""Lebesgue and weak-Lebesgue quasinorms, martingales, H_p and p-atoms.

All quantities are exact finite sums over cylinders; the only error is
floating-point roundoff.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .group import DomainError, GeneratorSequence, Point, RankError, cylinder_mask
from .system import StepFunction

__all__ = [
    "lp_norm",
    "weak_lp_norm",
    "weak_lp_functional",
    "MartingaleSequence",
    "martingale_from",
    "maximal_function",
    "hp_norm",
    "AtomSpec",
    "AtomConditionError",
    "validate_atom",
    "make_atom",
    "random_atom",
]


def _check_p(p: float) -> None:
    if not p > 0:
        raise DomainError(f"exponent must be positive, got {p}")


def lp_norm(f: StepFunction, p: float) -> float:
    """``(int |f|^p dmu)^(1/p)``."""
    _check_p(p)
    return float(np.mean(np.abs(f.values) ** p) ** (1.0 / p))


def weak_lp_norm(f: StepFunction, p: float) -> float:
    """``sup_{lambda > 0} lambda mu(|f| > lambda)^(1/p)``.

    The supremum is approached as ``lambda`` rises to one of the finitely
    many values of ``|f|``, so it is the largest ``v mu(|f| >= v)^(1/p)`` over
    those values.
    """
    _check_p(p)
    v = np.sort(np.abs(f.values))[::-1]
    measure = np.arange(1, v.size + 1) / v.size
    return float(np.max(v * measure ** (1.0 / p)))


def weak_lp_functional(f: StepFunction, p: float) -> float:
    """``sup_lambda lambda^p mu(|f| > lambda)``, the p-th power of ``weak_lp_norm``."""
    return weak_lp_norm(f, p) ** p


@dataclass(frozen=True)
class MartingaleSequence:
    """Finite martingale ``f^(0), ..., f^(N)`` where level ``n`` has rank ``n``."""

    levels: tuple[StepFunction, ...]

    def __post_init__(self):
        if not self.levels:
            raise DomainError("a martingale needs at least one level")
        for n, lv in enumerate(self.levels):
            if lv.rank != n:
                raise RankError(f"level {n} has rank {lv.rank}")

    @property
    def group(self) -> GeneratorSequence:
        return self.levels[0].group

    @property
    def top(self) -> StepFunction:
        return self.levels[-1]

    def is_compatible(self, atol: float = 1e-12) -> bool:
        """Averaging level ``n+1`` over rank-``n`` cylinders gives level ``n``."""
        return all(
            self.levels[n + 1].coarsen(n).distance(self.levels[n]) <= atol * max(1.0, self.levels[n + 1].sup())
            for n in range(len(self.levels) - 1)
        )


def martingale_from(f: StepFunction) -> MartingaleSequence:
    """Levels ``n = 0, ..., rank``: the cylinder averages of ``f`` at rank ``n``."""
    return MartingaleSequence(tuple(f.coarsen(n) for n in range(f.rank + 1)))


def maximal_function(mart: MartingaleSequence) -> StepFunction:
    """``f* = max_n |f^(n)|`` on the top rank."""
    R = mart.top.rank
    stack = np.vstack([np.abs(lv.refine(R).values) for lv in mart.levels])
    return StepFunction(mart.group, R, stack.max(axis=0))


def hp_norm(mart: MartingaleSequence, p: float) -> float:
    return lp_norm(maximal_function(mart), p)


class AtomConditionError(DomainError):
    """A candidate fails condition ``a`` (mean zero), ``b`` (size) or ``c`` (support)."""

    def __init__(self, condition: str, detail: str):
        super().__init__(f"p-atom condition {condition}) fails: {detail}")
        self.condition = condition


@dataclass(frozen=True)
class AtomSpec:
    """Values of an atom on the sub-cylinders of ``base``.

    ``values[h]`` sits on the sub-cylinder whose digits above ``base.rank``
    have canonical index ``h``; the atom rank is fixed by ``len(values)``.
    """

    base: Point
    values: tuple[float, ...]


_REL = 1e-12


def validate_atom(a: StepFunction, base: Point, p: float) -> None:
    """Raise ``AtomConditionError`` unless ``a`` is a p-atom supported on ``I(base)``."""
    _check_p(p)
    g = a.group
    if base.rank > a.rank:
        raise RankError(f"atom rank {a.rank} below base cylinder rank {base.rank}")
    inside = cylinder_mask(g, base, a.rank)
    scale = max(float(np.max(np.abs(a.values), initial=0.0)), 1.0)
    if np.any(np.abs(a.values[~inside]) > 0):
        raise AtomConditionError("c", "nonzero values outside the base cylinder")
    mean = abs(np.sum(a.values[inside])) / a.size
    if mean > _REL * scale:
        raise AtomConditionError("a", f"integral over I is {mean:.3e}")
    cap = float(g.M[base.rank]) ** (1.0 / p)
    sup = float(np.max(np.abs(a.values)))
    if sup > cap * (1 + _REL):
        raise AtomConditionError("b", f"sup |a| = {sup:.6g} exceeds mu(I)^(-1/p) = {cap:.6g}")


def make_atom(g: GeneratorSequence, spec: AtomSpec, p: float) -> StepFunction:
    """Place ``spec.values`` inside ``I(spec.base)`` and validate the result."""
    N = spec.base.rank
    vals = np.asarray(spec.values)
    sub = vals.size
    R = N
    while g.M[R] // g.M[N] < sub:
        R += 1
        g.check_rank(R)
    if g.M[R] // g.M[N] != sub:
        raise RankError(f"{sub} values do not match any refinement of a rank-{N} cylinder")
    full = np.zeros(g.M[R], dtype=vals.dtype if vals.dtype.kind in "fc" else np.float64)
    low = spec.base.index(g)
    full[low + g.M[N] * np.arange(sub)] = vals
    a = StepFunction(g, R, full)
    validate_atom(a, spec.base, p)
    return a


def random_atom(
    g: GeneratorSequence,
    base: Point,
    p: float,
    rng: np.random.Generator,
    extra_rank: int = 1,
) -> AtomSpec:
    """Mean-zero random values on ``I(base)`` scaled so ``||a||_inf = mu(I)^(-1/p)``.

    Values are drawn on the refinement ``extra_rank`` levels below the base.
    """
    if extra_rank < 1:
        raise DomainError("an atom needs at least one level of refinement")
    N = base.rank
    sub = g.M[N + extra_rank] // g.M[N]
    v = rng.standard_normal(sub)
    v -= v.mean()
    v *= float(g.M[N]) ** (1.0 / p) / np.max(np.abs(v))
    return AtomSpec(base, tuple(v.tolist()))
