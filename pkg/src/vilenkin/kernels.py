"""Dirichlet and Fejér kernels and their closed forms.

Two averaging conventions are supported for the Fejér kernel:

* ``paper``: ``K_n = (1/n) sum_{k=0}^{n-1} D_k`` with ``D_0 = 0``;
* ``classical``: ``K_n = (1/n) sum_{k=1}^{n} D_k``.

They differ by exactly ``D_n / n``. Kernels are built spectrally with the fast
transform; the ``*_table`` helpers build whole families by cumulative sums of
the character table instead and serve as the independent route.
"""

from __future__ import annotations

import enum
import warnings
from typing import NamedTuple

import numpy as np

from .group import (
    DomainError,
    GeneratorSequence,
    IndexSetSpec,
    Point,
    RankError,
    index_to_digits,
)
from .system import StepFunction, Spectrum, character_table, inverse, rademacher

__all__ = [
    "Convention",
    "dirichlet",
    "dirichlet_MN_closed",
    "fejer_kernel",
    "fejer_multiplier",
    "dirichlet_table",
    "fejer_table",
    "fejer_MA_closed",
    "kernel_l1_norm",
    "eq5_constant",
    "Lemma4Value",
    "lemma4_bound",
    "lemma4_integral",
]


class Convention(str, enum.Enum):
    PAPER = "paper"
    CLASSICAL = "classical"


def _conv(conv) -> Convention:
    return Convention(conv)


def _rank(g: GeneratorSequence, n: int, N: int | None) -> int:
    if N is None:
        return g.min_rank(n)
    g.check_rank(N)
    if n > g.M[N]:
        raise RankError(f"kernel index {n} exceeds M_{N} = {g.M[N]}")
    return N


def fejer_multiplier(n: int, size: int, conv=Convention.PAPER) -> np.ndarray:
    """Weights ``w_j`` with ``sigma_n f = sum_j w_j f^(j) psi_j``.

    ``(n-1-j)/n`` under the paper convention and ``(n-j)/n`` under the
    classical one, for ``j < n``; zero beyond.
    """
    if n < 1:
        raise DomainError("Fejér means are defined for n >= 1")
    shift = 1 if _conv(conv) is Convention.PAPER else 0
    j = np.arange(size, dtype=np.float64)
    return np.clip(n - shift - j, 0, None) / n


def dirichlet(g: GeneratorSequence, n: int, N: int | None = None) -> StepFunction:
    """``D_n = psi_0 + ... + psi_{n-1}`` on the cylinders of rank ``N``."""
    N = _rank(g, n, N)
    if n == 0:
        warnings.warn("D_0 is the empty sum; returning the zero function", stacklevel=2)
    c = np.zeros(g.M[N])
    c[:n] = 1.0
    return inverse(Spectrum(g, N, c))


def dirichlet_MN_closed(g: GeneratorSequence, n: int, N: int | None = None) -> StepFunction:
    """``D_{M_n}`` as ``M_n`` times the indicator of ``I_n``."""
    N = n if N is None else N
    if n > N:
        raise RankError(f"D_(M_{n}) needs rank >= {n}")
    return StepFunction.indicator(g, Point.zero(n), N) * float(g.M[n])


def fejer_kernel(g: GeneratorSequence, n: int, N: int | None = None, conv=Convention.PAPER) -> StepFunction:
    N = _rank(g, n, N)
    return inverse(Spectrum(g, N, fejer_multiplier(n, g.M[N], conv)))


def dirichlet_table(g: GeneratorSequence, N: int, n_max: int) -> np.ndarray:
    """Rows ``D_0, ..., D_{n_max}`` at rank ``N``, by running sums of characters."""
    T = character_table(g, N, n_max)
    out = np.zeros((n_max + 1, g.M[N]), dtype=np.complex128)
    np.cumsum(T, axis=0, out=out[1:])
    return out


def fejer_table(g: GeneratorSequence, N: int, n_max: int, conv=Convention.PAPER) -> np.ndarray:
    """Rows ``K_0, ..., K_{n_max}`` at rank ``N`` (row 0 is left at zero)."""
    D = dirichlet_table(g, N, n_max)
    S = np.cumsum(D, axis=0)
    out = np.zeros_like(D)
    n = np.arange(1, n_max + 1)[:, None]
    if _conv(conv) is Convention.PAPER:
        out[1:] = S[:-1] / n
    else:
        out[1:] = S[1:] / n
    return out


def fejer_MA_closed(g: GeneratorSequence, A: int, z: Point) -> complex:
    """Closed form of ``K_{M_A}(z)`` for ``z`` outside ``I_A``.

    With ``t`` the position of the first nonzero digit of ``z`` (so ``t < A``),
    the value is 0 unless digits ``t+1, ..., A-1`` all vanish, in which case it
    is ``M_t / (1 - r_t(z))``.

    Raises:
        DomainError: ``z`` lies in ``I_A``.
    """
    if z.rank < A:
        raise RankError(f"need a point of rank >= {A}")
    nonzero = [k for k in range(A) if z.digits[k]]
    if not nonzero:
        raise DomainError(f"z lies in I_{A}; the closed form does not cover it")
    t = nonzero[0]
    if any(z.digits[t + 1 : A]):
        return 0j
    return g.M[t] / (1 - rademacher(g, t, z))


def kernel_l1_norm(g: GeneratorSequence, n: int, N: int | None = None, conv=Convention.PAPER) -> float:
    """``||K_n||_1`` as an exact finite sum."""
    K = fejer_kernel(g, n, N, conv)
    return float(np.mean(np.abs(K.values)))


_ZERO = 1e-12


def eq5_constant(g: GeneratorSequence, n: int, N: int | None = None, conv=Convention.PAPER) -> float:
    """Smallest ``c`` with ``n|K_n| <= c sum_{A<=|n|} M_A |K_{M_A}|`` at every cylinder.

    Points where both sides vanish are skipped. Returns ``inf`` when the right
    side vanishes somewhere the left side does not.
    """
    N = _rank(g, n, N)
    order = index_to_digits(g, n).order
    lhs = n * np.abs(fejer_kernel(g, n, N, conv).values)
    rhs = np.zeros(g.M[N])
    for A in range(order + 1):
        rhs += g.M[A] * np.abs(fejer_kernel(g, g.M[A], N, conv).values)
    return _min_constant(lhs, rhs)


def _min_constant(lhs: np.ndarray, rhs: np.ndarray) -> float:
    scale = max(float(np.max(rhs, initial=0.0)), 1.0)
    zero_rhs = rhs <= _ZERO * scale
    if np.any(zero_rhs & (lhs > _ZERO * scale)):
        return float("inf")
    live = ~zero_rhs
    if not np.any(live):
        return 0.0
    return float(np.max(lhs[live] / rhs[live]))


class Lemma4Value(NamedTuple):
    integral: float
    bound: float
    ratio: float


def lemma4_bound(g: GeneratorSequence, k: int, l: int, N: int) -> float:
    """``M_l M_k / M_N^2``; for ``l = N`` this is ``M_k / M_N``."""
    return g.M[l] * g.M[k] / g.M[N] ** 2


def lemma4_integral(
    g: GeneratorSequence,
    n: int,
    N: int,
    spec: IndexSetSpec,
    x: Point,
    conv=Convention.PAPER,
    kernel: StepFunction | None = None,
) -> Lemma4Value:
    """``int_{I_N} |K_n(x - t)| dmu(t)`` for ``x`` in ``I_N^{k,l}``.

    As ``t`` runs over ``I_N`` the difference ``x - t`` keeps the first ``N``
    digits of ``x`` and runs over every choice of the higher digits, so the
    integral is ``(1/M_R)`` times the sum of ``|K_n|`` over the rank-``R``
    cylinders sharing those ``N`` digits. A precomputed ``kernel`` may be
    passed to avoid rebuilding ``K_n``.
    """
    if spec.N != N:
        raise DomainError(f"index set rank {spec.N} differs from N = {N}")
    if n < g.M[N]:
        raise DomainError(f"need n >= M_N = {g.M[N]}, got {n}")
    if x.rank < N or not spec.contains(x.digits):
        raise DomainError(f"{x.digits} is not in I_{N}^({spec.k},{spec.l})")
    K = fejer_kernel(g, n, None, conv) if kernel is None else kernel
    R = max(K.rank, N)
    K = K.refine(R)
    low = x.truncate(N).index(g)
    vals = np.abs(K.values).reshape(-1, g.M[N])[:, low]
    value = float(np.sum(vals)) / g.M[R]
    bound = lemma4_bound(g, spec.k, spec.l, N)
    return Lemma4Value(value, bound, value / bound)
