"""Partial sums, Fejér means and weighted maximal operators."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterator, Sequence

import numpy as np

from .group import DomainError, RankError
from .kernels import Convention, _conv, fejer_multiplier
from .system import Spectrum, StepFunction, character_table, forward, inverse

__all__ = [
    "WeightSpec",
    "WeightHypothesisError",
    "partial_sum",
    "fejer_mean",
    "fejer_means",
    "convolve",
    "maximal_fejer",
]


class WeightHypothesisError(DomainError):
    """A weight violates ``phi >= 1`` or monotonicity."""

    def __init__(self, hypothesis: str, detail: str):
        super().__init__(f"weight violates '{hypothesis}': {detail}")
        self.hypothesis = hypothesis


@dataclass(frozen=True)
class WeightSpec:
    """Weight ``w(n)`` dividing ``|sigma_n f|`` inside a maximal operator.

    kinds: ``unit`` (1), ``power`` ((n+1)^(1/p-2)), ``logsq`` (log2(n+1)^2,
    with w(0) = 1) and ``custom`` (a table indexed by n, or a callable).
    """

    kind: str = "unit"
    p: float | None = None
    table: tuple[float, ...] | None = None
    func: Callable[[np.ndarray], np.ndarray] | None = None
    name: str | None = None

    def __post_init__(self):
        if self.kind not in ("unit", "power", "logsq", "custom"):
            raise DomainError(f"unknown weight kind {self.kind!r}")
        if self.kind == "power" and not (self.p is not None and 0 < self.p < 0.5):
            raise DomainError(f"power weight needs 0 < p < 1/2, got {self.p}")
        if self.kind == "custom":
            if (self.table is None) == (self.func is None):
                raise DomainError("custom weight needs exactly one of table or func")
            if self.table is not None:
                self.check(range(1, len(self.table)))

    @classmethod
    def unit(cls) -> "WeightSpec":
        return cls("unit")

    @classmethod
    def power(cls, p: float) -> "WeightSpec":
        return cls("power", p=p)

    @classmethod
    def logsq(cls) -> "WeightSpec":
        return cls("logsq")

    @classmethod
    def custom(cls, phi, name: str | None = None) -> "WeightSpec":
        if callable(phi):
            return cls("custom", func=phi, name=name)
        return cls("custom", table=tuple(float(v) for v in phi), name=name)

    @property
    def label(self) -> str:
        if self.name:
            return self.name
        return f"power(p={self.p})" if self.kind == "power" else self.kind

    def __call__(self, n) -> np.ndarray:
        n = np.asarray(n)
        if self.kind == "unit":
            return np.ones(n.shape)
        if self.kind == "power":
            return (n + 1.0) ** (1.0 / self.p - 2.0)
        if self.kind == "logsq":
            return np.where(n >= 1, np.log2(np.maximum(n, 1) + 1.0) ** 2, 1.0)
        if self.table is not None:
            if np.any(n >= len(self.table)):
                raise DomainError(f"weight table has {len(self.table)} entries")
            return np.asarray(self.table)[n]
        return np.asarray(self.func(n), dtype=np.float64)

    def check(self, ns: Sequence[int]) -> None:
        """Check ``phi >= 1`` and ``phi`` nondecreasing on the points ``ns``."""
        ns = np.sort(np.asarray(list(ns), dtype=np.int64))
        if ns.size == 0:
            return
        w = self(ns)
        if np.any(w < 1.0):
            bad = int(ns[np.argmax(w < 1.0)])
            raise WeightHypothesisError("phi >= 1", f"phi({bad}) = {float(self(bad))}")
        drops = np.flatnonzero(np.diff(w) < 0)
        if drops.size:
            i = int(drops[0])
            raise WeightHypothesisError("nondecreasing", f"phi({ns[i]}) > phi({ns[i + 1]})")


def partial_sum(f: StepFunction, n: int) -> StepFunction:
    """``S_n f``, the inverse transform of the spectrum cut below ``n``."""
    if not 0 <= n <= f.size:
        raise RankError(f"S_{n} needs rank with M_N >= n; function has M_N = {f.size}")
    return inverse(forward(f).truncate(n))


def _lift(f: StepFunction, n: int) -> StepFunction:
    if n > f.size:
        return f.refine(f.group.min_rank(n))
    return f


def fejer_mean(f: StepFunction, n: int, conv=Convention.PAPER) -> StepFunction:
    """``sigma_n f`` through the spectral multiplier."""
    if n < 1:
        raise DomainError("sigma_n is defined for n >= 1")
    f = _lift(f, n)
    s = forward(f)
    return inverse(Spectrum(f.group, f.rank, s.coeffs * fejer_multiplier(n, f.size, conv)))


def convolve(f: StepFunction, kern: StepFunction) -> StepFunction:
    """``(f * k)(x) = int f(t) k(x - t) dmu(t)``; coefficients multiply."""
    if f.rank != kern.rank:
        raise RankError(f"rank mismatch: {f.rank} vs {kern.rank}")
    a, b = forward(f), forward(kern)
    return inverse(Spectrum(f.group, f.rank, a.coeffs * b.coeffs))


def fejer_means(
    f: StepFunction, n_max: int, conv=Convention.PAPER, block: int = 256
) -> Iterator[tuple[np.ndarray, np.ndarray]]:
    """Yield ``(ns, sigma)`` blocks with ``sigma[i] = sigma_{ns[i]} f`` for ``1 <= n <= n_max``.

    Partial sums are accumulated over the character table one block of rows at
    a time, so memory stays at ``O(block * M_R)``.
    """
    if n_max < 1:
        raise DomainError("n_max must be >= 1")
    f = _lift(f, n_max)
    g, R = f.group, f.rank
    coeffs = forward(f).coeffs
    classical = _conv(conv) is Convention.CLASSICAL
    S = np.zeros(f.size, dtype=np.complex128)  # S_{j0}
    T = np.zeros(f.size, dtype=np.complex128)  # S_0 + ... + S_{j0-1}
    for j0 in range(0, n_max, block):
        j1 = min(j0 + block, n_max)
        rows = np.arange(j0, j1)
        psi = character_table(g, R, j1, start=j0)
        # Sblk[i] = S_{j0+i+1}
        Sblk = S + np.cumsum(coeffs[rows, None] * psi, axis=0)
        # Tblk[i] = sum_{k <= j0+i} S_k
        Tblk = T + np.cumsum(np.vstack([S[None, :], Sblk[:-1]]), axis=0)
        ns = rows + 1
        if classical:
            sigma = (Tblk + Sblk) / ns[:, None]
        else:
            sigma = Tblk / ns[:, None]
        yield ns, sigma
        S = Sblk[-1]
        T = Tblk[-1]


def maximal_fejer(
    f: StepFunction,
    n_max: int,
    w: WeightSpec | None = None,
    conv=Convention.PAPER,
    n_min: int = 1,
    return_argmax: bool = False,
):
    """``max_{n_min <= n <= n_max} |sigma_n f| / w(n)`` pointwise.

    With ``return_argmax`` the index ``n`` attaining the maximum at each
    cylinder is returned as a second value (first maximizer on ties).
    """
    w = WeightSpec.unit() if w is None else w
    best = None
    arg = None
    for ns, sigma in fejer_means(f, n_max, conv):
        keep = ns >= n_min
        if not np.any(keep):
            continue
        ns, sigma = ns[keep], sigma[keep]
        vals = np.abs(sigma) / w(ns)[:, None]
        i = np.argmax(vals, axis=0)
        top = vals[i, np.arange(vals.shape[1])]
        if best is None:
            best, arg = top, ns[i]
        else:
            better = top > best
            best = np.where(better, top, best)
            arg = np.where(better, ns[i], arg)
    if best is None:
        raise DomainError(f"empty range n_min={n_min} > n_max={n_max}")
    g = f.group
    R = max(f.rank, g.min_rank(n_max))
    out = StepFunction(g, R, best)
    return (out, arg) if return_argmax else out
