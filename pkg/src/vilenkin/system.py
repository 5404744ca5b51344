"""Characters, step functions and the Vilenkin-Fourier transform.

``psi_n(x) = exp(2 pi i sum_k n_k x_k / m_k)`` is evaluated through an
integer phase modulo ``L = lcm(m_0, ..., m_{N-1})`` and a lookup table of the
``L``-th roots of unity, so equal phases give bit-identical values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Union

import numpy as np

from .group import (
    CapacityError,
    DomainError,
    GeneratorSequence,
    IndexSetSpec,
    Point,
    RankError,
    cylinder_mask,
    digit_table,
    index_set_mask,
    index_to_digits,
)

__all__ = [
    "StepFunction",
    "Spectrum",
    "rademacher",
    "vilenkin",
    "character",
    "character_table",
    "forward",
    "forward_naive",
    "inverse",
    "integrate",
    "MAX_CYLINDERS",
]

# Dense tables beyond this many cylinders are refused.
MAX_CYLINDERS = 2**22


def _check_dense(g: GeneratorSequence, rank: int) -> None:
    g.check_rank(rank)
    if g.M[rank] > MAX_CYLINDERS:
        raise CapacityError(f"M_{rank} = {g.M[rank]} cylinders exceeds MAX_CYLINDERS")


@lru_cache(maxsize=32)
def _roots(L: int) -> np.ndarray:
    r = np.exp(2j * np.pi * np.arange(L) / L)
    # exact values where they exist
    for q in range(0, L, max(L // 4, 1)):
        if (4 * q) % L == 0:
            r[q] = (1, 1j, -1, -1j)[(4 * q) // L]
    r.flags.writeable = False
    return r


def _lcm(m: tuple[int, ...]) -> int:
    return math.lcm(*m) if m else 1


@dataclass(frozen=True, eq=False)
class StepFunction:
    """A function on ``G_m`` constant on the cylinders of rank ``rank``.

    ``values[c]`` is the value on the cylinder with canonical index ``c``.
    """

    group: GeneratorSequence
    rank: int
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        _check_dense(self.group, self.rank)
        v = np.array(self.values, copy=True)
        if v.dtype.kind not in "fc":
            v = v.astype(np.float64)
        if v.shape != (self.group.M[self.rank],):
            raise RankError(f"expected {self.group.M[self.rank]} values for rank {self.rank}, got shape {v.shape}")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    @classmethod
    def constant(cls, g: GeneratorSequence, c: complex, rank: int = 0) -> "StepFunction":
        dtype = np.complex128 if isinstance(c, complex) else np.float64
        return cls(g, rank, np.full(g.M[rank], c, dtype=dtype))

    @classmethod
    def indicator(cls, g: GeneratorSequence, base: Point, rank: int | None = None) -> "StepFunction":
        """Indicator of the cylinder ``I_{base.rank}(base)``."""
        rank = base.rank if rank is None else rank
        return cls(g, rank, cylinder_mask(g, base, rank).astype(np.float64))

    @property
    def size(self) -> int:
        return self.group.M[self.rank]

    def refine(self, rank: int) -> "StepFunction":
        """Same function viewed on the finer cylinders of ``rank``."""
        if rank < self.rank:
            raise RankError(f"cannot refine rank {self.rank} down to {rank}")
        if rank == self.rank:
            return self
        reps = self.group.M[rank] // self.size
        return StepFunction(self.group, rank, np.tile(self.values, reps))

    def coarsen(self, rank: int) -> "StepFunction":
        """Cylinder averages at a lower rank (conditional expectation)."""
        if rank > self.rank:
            raise RankError(f"cannot coarsen rank {self.rank} up to {rank}")
        Mr = self.group.M[rank]
        return StepFunction(self.group, rank, self.values.reshape(-1, Mr).mean(axis=0))

    def integral(self) -> complex:
        total = np.sum(self.values) / self.size
        return complex(total) if self.values.dtype.kind == "c" else float(total)

    def at(self, x: Point) -> complex:
        """Value at any point whose rank is at least ``self.rank``."""
        if x.rank < self.rank:
            raise RankError(f"point rank {x.rank} below function rank {self.rank}")
        return self.values[x.truncate(self.rank).index(self.group)]

    def sup(self) -> float:
        return float(np.max(np.abs(self.values)))

    def abs(self) -> "StepFunction":
        return StepFunction(self.group, self.rank, np.abs(self.values))

    def conj(self) -> "StepFunction":
        return StepFunction(self.group, self.rank, np.conj(self.values))

    def _aligned(self, other: "StepFunction"):
        r = max(self.rank, other.rank)
        if self.group.m[:r] != other.group.m[:r]:
            raise DomainError("step functions live on different groups")
        return self.refine(r).values, other.refine(r).values, r

    def _binary(self, other, op):
        if isinstance(other, StepFunction):
            a, b, r = self._aligned(other)
            return StepFunction(self.group, r, op(a, b))
        return StepFunction(self.group, self.rank, op(self.values, other))

    def __add__(self, other):
        return self._binary(other, np.add)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binary(other, np.subtract)

    def __rsub__(self, other):
        return StepFunction(self.group, self.rank, other - self.values)

    def __mul__(self, other):
        return self._binary(other, np.multiply)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self._binary(other, np.true_divide)

    def __neg__(self):
        return StepFunction(self.group, self.rank, -self.values)

    def allclose(self, other: "StepFunction", atol: float = 1e-10) -> bool:
        a, b, _ = self._aligned(other)
        return bool(np.max(np.abs(a - b), initial=0.0) <= atol)

    def distance(self, other: "StepFunction") -> float:
        """Sup-distance after aligning ranks."""
        a, b, _ = self._aligned(other)
        return float(np.max(np.abs(a - b), initial=0.0))


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Vilenkin-Fourier coefficients ``coeffs[n] = f^(n)``, ``n < M_rank``."""

    group: GeneratorSequence
    rank: int
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        _check_dense(self.group, self.rank)
        c = np.array(self.coeffs, dtype=np.complex128, copy=True)
        if c.shape != (self.group.M[self.rank],):
            raise RankError(f"expected {self.group.M[self.rank]} coefficients, got shape {c.shape}")
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)

    def energy(self) -> float:
        return float(np.sum(np.abs(self.coeffs) ** 2))

    def truncate(self, n: int) -> "Spectrum":
        """Keep the coefficients with index below ``n``."""
        c = np.array(self.coeffs)
        c[n:] = 0
        return Spectrum(self.group, self.rank, c)

    def __getitem__(self, n):
        return self.coeffs[n]


def rademacher(g: GeneratorSequence, k: int, x: Point) -> complex:
    """``r_k(x) = exp(2 pi i x_k / m_k)``."""
    if not 0 <= k < x.rank:
        raise RankError(f"r_{k} needs a point of rank > {k}, got rank {x.rank}")
    L = g.m[k]
    return complex(_roots(L)[x.digits[k] % L])


def vilenkin(g: GeneratorSequence, n: int, x: Point) -> complex:
    """``psi_n(x)``: the product of ``r_k(x)^{n_k}`` over the digits of ``n``."""
    nd = index_to_digits(g, n)
    if n and nd.order >= x.rank:
        raise RankError(f"psi_{n} needs a point of rank > {nd.order}, got rank {x.rank}")
    L = _lcm(g.m[: max(x.rank, 1)])
    phase = sum(d * xk * (L // g.m[k]) for k, (d, xk) in enumerate(zip(nd.digits, x.digits)))
    return complex(_roots(L)[phase % L])


def _phases(g: GeneratorSequence, rank: int, n_index: np.ndarray) -> tuple[np.ndarray, int]:
    """Integer phases of ``psi_n`` at every rank-``rank`` cylinder, mod ``L``."""
    L = _lcm(g.m[:rank])
    D = digit_table(g, rank)
    weights = np.array([L // g.m[k] for k in range(rank)], dtype=np.int64)
    nd = D[n_index]
    return (nd * weights) @ D.T % L, L


def character(g: GeneratorSequence, n: int, rank: int | None = None) -> StepFunction:
    """``psi_n`` as a step function; the default rank is the smallest exact one."""
    if rank is None:
        rank = g.min_rank(n + 1)
    if n >= g.M[rank]:
        raise RankError(f"psi_{n} is not constant on rank-{rank} cylinders")
    ph, L = _phases(g, rank, np.array([n]))
    return StepFunction(g, rank, _roots(L)[ph[0]])


def character_table(g: GeneratorSequence, rank: int, n_rows: int | None = None, start: int = 0) -> np.ndarray:
    """Dense table ``T[i, c] = psi_{start+i}(c)`` for ``start <= start+i < n_rows``.

    ``n_rows`` defaults to ``M_rank``.
    """
    _check_dense(g, rank)
    n_rows = g.M[rank] if n_rows is None else n_rows
    if n_rows > g.M[rank]:
        raise RankError(f"psi_n for n >= M_{rank} is not constant on rank-{rank} cylinders")
    ph, L = _phases(g, rank, np.arange(start, n_rows))
    return _roots(L)[ph]


@lru_cache(maxsize=32)
def _dft_matrix(mk: int, sign: int) -> np.ndarray:
    j = np.arange(mk)
    F = _roots(mk)[(sign * np.outer(j, j)) % mk]
    F.flags.writeable = False
    return F


def _separable(g: GeneratorSequence, rank: int, vec: np.ndarray, sign: int) -> np.ndarray:
    # C-order reshape puts digit 0 on the last axis.
    shape = tuple(reversed(g.m[:rank]))
    t = np.asarray(vec, dtype=np.complex128).reshape(shape) if rank else np.asarray(vec, dtype=np.complex128)
    for axis in range(rank):
        mk = shape[axis]
        t = np.moveaxis(np.tensordot(_dft_matrix(mk, sign), t, axes=([1], [axis])), 0, axis)
    return t.reshape(-1)


def forward(f: StepFunction) -> Spectrum:
    """Fast transform: one small DFT of size ``m_k`` along each digit axis.

    Cost is ``O(M_N sum_k m_k)``.
    """
    c = _separable(f.group, f.rank, f.values, -1) / f.size
    return Spectrum(f.group, f.rank, c)


def forward_naive(f: StepFunction) -> Spectrum:
    """Direct ``O(M_N^2)`` evaluation of ``(1/M_N) sum_c f(c) conj(psi_n(c))``."""
    T = character_table(f.group, f.rank)
    return Spectrum(f.group, f.rank, np.conj(T) @ f.values.astype(np.complex128) / f.size)


def inverse(s: Spectrum) -> StepFunction:
    """``f(c) = sum_n coeffs[n] psi_n(c)``."""
    return StepFunction(s.group, s.rank, _separable(s.group, s.rank, s.coeffs, +1))


Region = Union[None, IndexSetSpec, Point, np.ndarray]


def integrate(f: StepFunction, region: Region = None) -> complex:
    """Exact Haar integral of ``f`` over ``region`` (whole group by default).

    ``region`` may be an ``IndexSetSpec``, a cylinder given by its base
    ``Point``, or a boolean mask over the cylinders of ``f.rank``.
    """
    if region is None:
        return f.integral()
    if isinstance(region, IndexSetSpec):
        h = f.refine(max(f.rank, region.N))
        mask = index_set_mask(h.group, region, h.rank)
    elif isinstance(region, Point):
        h = f.refine(max(f.rank, region.rank))
        mask = cylinder_mask(h.group, region, h.rank)
    else:
        h = f
        mask = np.asarray(region, dtype=bool)
        if mask.shape != (f.size,):
            raise RankError("mask does not match the function rank")
    total = np.sum(h.values[mask]) / h.size
    return complex(total) if h.values.dtype.kind == "c" else float(total)
