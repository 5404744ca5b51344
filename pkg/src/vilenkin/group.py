"""Bounded Vilenkin groups truncated at a finite rank.

A point ``x`` of ``G_m`` is a digit sequence with ``x_k in Z_{m_k}``. At rank
``N`` the group is modelled by its ``M_N`` cylinders ``I_N(x)``; a cylinder is
stored at the canonical integer position ``sum_k x_k M_k`` so that digit 0 is
the least significant one. The same layout indexes characters, which keeps
value tables and spectra aligned.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "VilenkinError",
    "InvalidGeneratorError",
    "CapacityError",
    "RankError",
    "DomainError",
    "InvalidIndexSetError",
    "GeneratorSequence",
    "Point",
    "IndexDigits",
    "IndexSetSpec",
    "make_group",
    "walsh",
    "index_to_digits",
    "digits_to_index",
    "point_sub",
    "point_add",
    "digit_table",
    "rank_for_index",
    "cylinder_mask",
    "index_set_mask",
    "enumerate_index_set",
    "complement_sets",
    "partition_report",
    "sum_M_prefix",
]

# Index arithmetic is done in int64.
_INDEX_LIMIT = 2**62


class VilenkinError(Exception):
    """Base class for errors raised by this package."""


class InvalidGeneratorError(VilenkinError, ValueError):
    pass


class CapacityError(VilenkinError, ValueError):
    pass


class RankError(VilenkinError, ValueError):
    pass


class DomainError(VilenkinError, ValueError):
    pass


class InvalidIndexSetError(VilenkinError, ValueError):
    pass


@dataclass(frozen=True)
class GeneratorSequence:
    """Finite truncation ``(m_0, ..., m_{n_max-1})`` of a bounded generator.

    Attributes:
        m: generator entries, each at least 2.
        n_max: maximum supported rank.
        M: products ``M_0 = 1, M_{k+1} = m_k M_k`` for ``k <= n_max``.
    """

    m: tuple[int, ...]
    n_max: int
    M: tuple[int, ...]

    def __post_init__(self):
        if self.n_max < 1:
            raise InvalidGeneratorError(f"n_max must be >= 1, got {self.n_max}")
        if len(self.m) != self.n_max or len(self.M) != self.n_max + 1:
            raise InvalidGeneratorError("inconsistent generator tables; use make_group")

    @property
    def is_walsh(self) -> bool:
        return all(mk == 2 for mk in self.m)

    @property
    def bound(self) -> int:
        return max(self.m)

    def check_rank(self, rank: int) -> None:
        if not 0 <= rank <= self.n_max:
            raise RankError(f"rank {rank} outside [0, {self.n_max}]")

    def size(self, rank: int) -> int:
        """Number of rank-``rank`` cylinders, ``M_rank``."""
        self.check_rank(rank)
        return self.M[rank]

    def min_rank(self, n: int) -> int:
        """Smallest rank ``N`` with ``M_N >= n``."""
        return rank_for_index(self, n)

    def label(self) -> str:
        return ",".join(str(v) for v in self.m)


def make_group(m: Iterable[int], n_max: int) -> GeneratorSequence:
    """Build a truncated generator sequence.

    ``m`` is repeated cyclically when it is shorter than ``n_max`` so that a
    pattern such as ``(2, 3)`` describes ``(2, 3, 2, 3, ...)``; longer input is
    cut at ``n_max``.

    Raises:
        InvalidGeneratorError: an entry is below 2 or ``n_max < 1``.
        CapacityError: ``M_{n_max}`` does not fit the int64 index range.
    """
    pattern = [int(v) for v in m]
    if not pattern:
        raise InvalidGeneratorError("empty generator sequence")
    bad = [v for v in pattern if v < 2]
    if bad:
        raise InvalidGeneratorError(f"generator entries must be >= 2, got {bad}")
    if n_max < 1:
        raise InvalidGeneratorError(f"n_max must be >= 1, got {n_max}")
    entries = tuple(pattern[k % len(pattern)] for k in range(n_max))
    M = [1]
    for mk in entries:
        M.append(M[-1] * mk)
        if M[-1] > _INDEX_LIMIT:
            raise CapacityError(f"M_{len(M) - 1} = {M[-1]} exceeds index capacity")
    return GeneratorSequence(entries, n_max, tuple(M))


def walsh(n_max: int) -> GeneratorSequence:
    """The dyadic group, ``m_k = 2`` for every ``k``."""
    return make_group((2,), n_max)


@dataclass(frozen=True)
class Point:
    """Base digits ``(x_0, ..., x_{R-1})`` of the rank-``R`` cylinder ``I_R(x)``."""

    digits: tuple[int, ...]

    @property
    def rank(self) -> int:
        return len(self.digits)

    @classmethod
    def make(cls, g: GeneratorSequence, digits: Sequence[int]) -> "Point":
        g.check_rank(len(digits))
        for k, xk in enumerate(digits):
            if not 0 <= xk < g.m[k]:
                raise DomainError(f"digit x_{k} = {xk} outside Z_{g.m[k]}")
        return cls(tuple(int(v) for v in digits))

    @classmethod
    def zero(cls, rank: int) -> "Point":
        return cls((0,) * rank)

    @classmethod
    def from_index(cls, g: GeneratorSequence, index: int, rank: int) -> "Point":
        g.check_rank(rank)
        if not 0 <= index < g.M[rank]:
            raise CapacityError(f"cylinder index {index} outside [0, {g.M[rank]})")
        digits = []
        for k in range(rank):
            index, d = divmod(index, g.m[k])
            digits.append(d)
        return cls(tuple(digits))

    def index(self, g: GeneratorSequence) -> int:
        return sum(d * g.M[k] for k, d in enumerate(self.digits))

    def truncate(self, rank: int) -> "Point":
        if rank > self.rank:
            raise RankError(f"cannot truncate rank {self.rank} point to {rank}")
        return Point(self.digits[:rank])

    def extend(self, rank: int) -> "Point":
        """Pad with zero digits up to ``rank``."""
        return Point(self.digits + (0,) * (rank - self.rank))

    def in_cylinder(self, n: int) -> bool:
        """Whether the point lies in ``I_n = I_n(0)``."""
        return not any(self.digits[:n])


@dataclass(frozen=True)
class IndexDigits:
    """Digits of ``n`` in the generalized number system; ``order`` is ``|n|``."""

    n: int
    digits: tuple[int, ...]
    order: int


def index_to_digits(g: GeneratorSequence, n: int) -> IndexDigits:
    """Expand ``n = sum_j n_j M_j`` with ``0 <= n_j < m_j``.

    Only the digits up to ``|n|`` are kept; ``|0|`` is taken as 0.
    """
    if not 0 <= n < g.M[g.n_max]:
        raise CapacityError(f"index {n} outside [0, M_{g.n_max}) = [0, {g.M[g.n_max]})")
    digits = []
    rest = n
    k = 0
    while rest:
        rest, d = divmod(rest, g.m[k])
        digits.append(d)
        k += 1
    if not digits:
        digits = [0]
    return IndexDigits(n, tuple(digits), len(digits) - 1)


def digits_to_index(g: GeneratorSequence, digits: Sequence[int]) -> int:
    return sum(int(d) * g.M[k] for k, d in enumerate(digits))


def _check_same_rank(x: Point, t: Point) -> None:
    if x.rank != t.rank:
        raise RankError(f"rank mismatch: {x.rank} vs {t.rank}")


def point_sub(g: GeneratorSequence, x: Point, t: Point) -> Point:
    """Group difference ``x - t``, digitwise modulo ``m_k``."""
    _check_same_rank(x, t)
    return Point(tuple((a - b) % g.m[k] for k, (a, b) in enumerate(zip(x.digits, t.digits))))


def point_add(g: GeneratorSequence, x: Point, t: Point) -> Point:
    _check_same_rank(x, t)
    return Point(tuple((a + b) % g.m[k] for k, (a, b) in enumerate(zip(x.digits, t.digits))))


@lru_cache(maxsize=64)
def _digit_table(m: tuple[int, ...], rank: int) -> np.ndarray:
    M = math.prod(m[:rank])
    idx = np.arange(M, dtype=np.int64)
    out = np.empty((M, rank), dtype=np.int64)
    for k in range(rank):
        idx, out[:, k] = np.divmod(idx, m[k])
    out.flags.writeable = False
    return out


def digit_table(g: GeneratorSequence, rank: int) -> np.ndarray:
    """Read-only ``(M_rank, rank)`` array; row ``c`` holds the digits of cylinder ``c``."""
    g.check_rank(rank)
    return _digit_table(g.m, rank)


def rank_for_index(g: GeneratorSequence, n: int) -> int:
    """Smallest rank ``N`` with ``M_N >= n``."""
    for N, MN in enumerate(g.M):
        if MN >= n:
            return N
    raise CapacityError(f"index {n} exceeds M_{g.n_max} = {g.M[g.n_max]}")


def sum_M_prefix(g: GeneratorSequence, l: int) -> int:
    """``M_0 + M_1 + ... + M_l``."""
    g.check_rank(l)
    return sum(g.M[: l + 1])


@dataclass(frozen=True)
class IndexSetSpec:
    """The set ``I_N^{k,l}``, or ``I_N^{k,alpha,l,beta}`` when both values are fixed.

    For ``l < N`` a rank-``N`` point belongs when its first nonzero digit is at
    ``k`` and its second is at ``l``; the digits above ``l`` are free. For
    ``l = N`` the only nonzero digit below ``N`` is the one at ``k``.
    """

    N: int
    k: int
    l: int
    alpha: int | None = None
    beta: int | None = None

    def validate(self, g: GeneratorSequence) -> None:
        if not 0 <= self.k < self.l <= self.N:
            raise InvalidIndexSetError(f"need 0 <= k < l <= N, got k={self.k}, l={self.l}, N={self.N}")
        g.check_rank(self.N)
        if self.alpha is not None and not 0 < self.alpha < g.m[self.k]:
            raise InvalidIndexSetError(f"alpha={self.alpha} outside Z_{g.m[self.k]} minus 0")
        if self.beta is not None:
            if self.l == self.N:
                raise InvalidIndexSetError("beta is only defined for l < N")
            if not 0 < self.beta < g.m[self.l]:
                raise InvalidIndexSetError(f"beta={self.beta} outside Z_{g.m[self.l]} minus 0")

    def contains(self, digits: Sequence[int]) -> bool:
        N, k, l = self.N, self.k, self.l
        x = digits[:N]
        if any(x[:k]) or x[k] == 0:
            return False
        if self.alpha is not None and x[k] != self.alpha:
            return False
        if l == N:
            return not any(x[k + 1 : N])
        if any(x[k + 1 : l]) or x[l] == 0:
            return False
        return self.beta is None or x[l] == self.beta


def cylinder_mask(g: GeneratorSequence, base: Point, rank: int) -> np.ndarray:
    """Boolean mask over rank-``rank`` cylinders of ``I_{base.rank}(base)``."""
    if base.rank > rank:
        raise RankError(f"cylinder rank {base.rank} exceeds table rank {rank}")
    D = digit_table(g, rank)
    if base.rank == 0:
        return np.ones(g.M[rank], dtype=bool)
    return np.all(D[:, : base.rank] == np.asarray(base.digits), axis=1)


def index_set_mask(g: GeneratorSequence, spec: IndexSetSpec, rank: int | None = None) -> np.ndarray:
    """Vectorized membership of every rank-``rank`` cylinder in ``spec``.

    Membership only looks at the first ``spec.N`` digits.
    """
    spec.validate(g)
    rank = spec.N if rank is None else rank
    if rank < spec.N:
        raise RankError(f"table rank {rank} below set rank {spec.N}")
    D = digit_table(g, rank)
    N, k, l = spec.N, spec.k, spec.l
    mask = ~np.any(D[:, :k], axis=1) & (D[:, k] != 0)
    if spec.alpha is not None:
        mask &= D[:, k] == spec.alpha
    if l == N:
        mask &= ~np.any(D[:, k + 1 : N], axis=1)
    else:
        mask &= ~np.any(D[:, k + 1 : l], axis=1) & (D[:, l] != 0)
        if spec.beta is not None:
            mask &= D[:, l] == spec.beta
    return mask


def enumerate_index_set(g: GeneratorSequence, spec: IndexSetSpec) -> list[Point]:
    """All rank-``N`` base points of the set, in canonical index order."""
    mask = index_set_mask(g, spec)
    D = digit_table(g, spec.N)
    return [Point(tuple(int(v) for v in row)) for row in D[mask]]


def complement_sets(N: int, second_k_start: int = 0) -> list[IndexSetSpec]:
    """The pieces of the decomposition of ``G_m minus I_N``.

    The sets ``I_N^{k,l}`` for ``0 <= k <= N-2``, ``k < l <= N-1`` followed by
    ``I_N^{k,N}`` for ``second_k_start <= k <= N-1``.
    """
    specs = [IndexSetSpec(N, k, l) for k in range(N - 1) for l in range(k + 1, N)]
    specs += [IndexSetSpec(N, k, N) for k in range(second_k_start, N)]
    return specs


def partition_report(g: GeneratorSequence, N: int) -> dict:
    """Check the decompositions of ``I_N^{k,l}`` and of ``G_m minus I_N``.

    Every rank-``N`` cylinder is classified against every set. The union of the
    ``I_N^{k,l}`` must equal the complement of ``I_N`` with no overlaps, and each
    ``I_N^{k,l}`` with ``l < N`` must be the disjoint union of its
    ``I_N^{k,alpha,l,beta}`` pieces. Both ranges for the ``l = N`` family
    (``k`` from 0 and ``k`` from 1) are tested and reported.
    """
    g.check_rank(N)
    if N < 1:
        raise RankError("partition needs N >= 1")
    MN = g.M[N]
    complement = ~cylinder_mask(g, Point.zero(N), N)

    ranges = {}
    for start in (0, 1):
        specs = complement_sets(N, start)
        cover = np.zeros(MN, dtype=np.int64)
        for s in specs:
            cover += index_set_mask(g, s)
        missing = np.flatnonzero(complement & (cover == 0))
        ranges[f"k_from_{start}"] = {
            "disjoint": bool(np.all(cover <= 1)),
            "covers_complement": bool(missing.size == 0),
            "inside_complement": bool(not np.any(cover[~complement])),
            "measure": float(np.count_nonzero(cover)) / MN,
            "missing_points": [list(Point.from_index(g, int(c), N).digits) for c in missing],
        }
        ranges[f"k_from_{start}"]["exact"] = (
            ranges[f"k_from_{start}"]["disjoint"]
            and ranges[f"k_from_{start}"]["covers_complement"]
            and ranges[f"k_from_{start}"]["inside_complement"]
        )

    cells_ok = True
    for s in complement_sets(N, 0):
        if s.l == N:
            continue
        whole = index_set_mask(g, s)
        pieces = np.zeros(MN, dtype=np.int64)
        for a, b in itertools.product(range(1, g.m[s.k]), range(1, g.m[s.l])):
            pieces += index_set_mask(g, IndexSetSpec(N, s.k, s.l, a, b))
        cells_ok &= bool(np.array_equal(pieces, whole.astype(np.int64)))

    exact = [name for name, r in ranges.items() if r["exact"]]
    return {
        "N": N,
        "complement_measure": 1.0 - 1.0 / MN,
        "ranges": ranges,
        "cells_union_exact": cells_ok,
        "exact_ranges": exact,
        "passed": cells_ok and "k_from_0" in exact,
    }
