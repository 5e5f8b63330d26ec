"""Poisson binomial PMF and the cardinality-constraint objective."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .core import Objective, Tracker

NEG_TOLERANCE = 1e-8


class PMFError(ArithmeticError):
    """The transform produced a clearly negative probability."""


@dataclass(frozen=True)
class PoiBinDistribution:
    """PMF ``pmf[t] = Pr[sum_j X_j = t]`` for independent ``X_j ~ Bernoulli(p_j)``."""

    pmf: np.ndarray
    source_p: np.ndarray

    @property
    def n(self) -> int:
        return self.source_p.shape[0]


def _finalize(q: np.ndarray) -> np.ndarray:
    worst = q.min()
    if worst < -NEG_TOLERANCE:
        raise PMFError(f"negative PMF entry {worst:.3e}")
    return np.maximum(q, 0.0)


def pmf_dft(p, backend: str = "dft") -> PoiBinDistribution:
    """PMF of the number of successes.

    The default backend evaluates the closed-form inverse transform
    ``q_t = 1/(n+1) sum_s exp(-i w s t) prod_j (1 - p_j + p_j exp(i w s))``
    with ``w = 2 pi / (n + 1)``. ``backend="dp"`` runs the O(n^2) sequential
    convolution instead; it is the reference the transform is checked against.
    """
    p = np.ascontiguousarray(p, dtype=float)
    if p.ndim != 1 or p.shape[0] < 1:
        raise ValueError("need a non-empty probability vector")
    if backend == "dft":
        q = _kernels.pmf_dft(p)
    elif backend == "dp":
        q = _kernels.pmf_dp(p)
    else:
        raise ValueError(f"unknown PMF backend {backend!r}")
    return PoiBinDistribution(_finalize(np.asarray(q)), p.copy())


def pmf_dp(p) -> PoiBinDistribution:
    return pmf_dft(p, backend="dp")


def _remove(q: np.ndarray, pi: float) -> np.ndarray:
    n = q.shape[0] - 1
    out = np.empty(n)
    if pi <= 0.5:
        prev = 0.0
        for t in range(n):
            prev = (q[t] - pi * prev) / (1.0 - pi)
            out[t] = prev
    else:
        prev = 0.0
        for t in range(n - 1, -1, -1):
            prev = (q[t + 1] - (1.0 - pi) * prev) / pi
            out[t] = prev
    return out


def pmf_remove(dist: PoiBinDistribution, i: int) -> np.ndarray:
    """PMF of the count with node ``i`` left out.

    Uses the forward recursion for ``p_i <= 0.5`` and the backward one
    otherwise; both invert ``q_t = q'_t (1 - p_i) + q'_{t-1} p_i``.
    """
    pi = float(dist.source_p[i])
    if pi <= 0.0 or pi >= 1.0:
        raise ValueError(f"p[{i}]={pi} must lie strictly inside (0, 1); clamp first")
    return _remove(dist.pmf, pi)


@dataclass(frozen=True)
class CardinalitySet:
    """Feasible counts ``C`` and the distance table ``dist[t] = min_k |t - k|``."""

    n: int
    feasible: tuple[int, ...]
    dist: np.ndarray = field(repr=False)

    @classmethod
    def of(cls, n: int, feasible) -> "CardinalitySet":
        feas = tuple(sorted(set(int(k) for k in feasible)))
        if not feas:
            raise ValueError("feasible cardinality set is empty")
        if feas[0] < 0 or feas[-1] > n:
            raise ValueError(f"feasible cardinalities must lie in [0, {n}]")
        dist = np.empty(n + 1)
        # two-pointer sweep over sorted feasible values
        j = 0
        for t in range(n + 1):
            while j + 1 < len(feas) and abs(feas[j + 1] - t) <= abs(feas[j] - t):
                j += 1
            dist[t] = abs(t - feas[j])
        return cls(n, feas, dist)

    @classmethod
    def exactly(cls, n: int, k: int) -> "CardinalitySet":
        return cls.of(n, [k])

    @classmethod
    def at_most(cls, n: int, k: int) -> "CardinalitySet":
        return cls.of(n, range(0, k + 1))


def card_eval(dist: PoiBinDistribution, C: CardinalitySet) -> float:
    if dist.n != C.n:
        raise ValueError("distribution and cardinality set disagree on n")
    return float(dist.pmf @ C.dist)


def card_ids(dist: PoiBinDistribution, p, C: CardinalitySet) -> np.ndarray:
    """Incremental differences for every node, shape ``(n, 2)``.

    ``D[i, 0] = sum_t (q'_t - q_t) dist[t]`` and
    ``D[i, 1] = sum_t (q'_{t-1} - q_t) dist[t]`` with ``q'`` the leave-one-out
    PMF of node ``i``. Rows with ``p_i`` exactly 0 or 1 are handled by the
    same recursions (they reduce to identity and shift).
    """
    p = np.ascontiguousarray(p, dtype=float)
    q = dist.pmf
    base = float(q @ C.dist)
    a0, a1 = _kernels.card_remove_sums(np.ascontiguousarray(q), p, C.dist)
    return np.stack([a0 - base, a1 - base], axis=1)


def card_hat(X, C: CardinalitySet) -> float:
    size = int(np.sum(X))
    return float(min(abs(size - k) for k in C.feasible))


class Cardinality(Objective):
    """Expected distance of the selection size to the feasible set.

    ``column`` selects a categorical column (``X_i == column``) instead of a
    binary vector; the count is then over nodes assigned that decision.
    """

    def __init__(self, C: CardinalitySet, column: int | None = None, arity: int = 2,
                 backend: str = "dft"):
        self.C = C
        self.n = C.n
        self.column = column
        self.arity = arity if column is not None else 2
        self.categorical = column is not None
        self.backend = backend

    def _col(self, p):
        p = np.asarray(p, dtype=float)
        return np.ascontiguousarray(p if self.column is None else p[:, self.column])

    def value(self, p) -> float:
        return card_eval(pmf_dft(self._col(p), self.backend), self.C)

    def ids(self, p) -> np.ndarray:
        col = self._col(p)
        D = card_ids(pmf_dft(col, self.backend), col, self.C)
        return self._expand(np.asarray(p, dtype=float), D)

    def _expand(self, p, D):
        if self.column is None:
            return D
        # Row i moves to decision x: the column entry becomes 1 if x == column else 0.
        out = np.repeat(D[:, :1], self.arity, axis=1)
        out[:, self.column] = D[:, 1]
        return out

    def hat(self, X) -> float:
        X = np.asarray(X)
        sel = X if self.column is None else (X == self.column)
        return card_hat(sel, self.C)

    def tracker(self, p) -> "CardinalityTracker":
        return CardinalityTracker(self, p)


class CardinalityTracker(Tracker):
    """Keeps the count PMF of the current state between commits.

    Committed rows are exactly 0 or 1, so the PMF is the PMF of the still
    fractional rows shifted by the number of committed ones. It is rebuilt
    from the fractional rows on every commit: chaining leave-one-out removals
    instead amplifies round-off by up to ``1 / |1 - 2 p_i|`` per removal.
    """

    def __init__(self, obj: Cardinality, p):
        super().__init__(obj, p)
        self._rebuild()

    def _rebuild(self) -> None:
        col = self.obj._col(self.p)
        fixed = (col == 0.0) | (col == 1.0)
        ones = int(np.count_nonzero(col[fixed] == 1.0))
        q = np.zeros(col.shape[0] + 1)
        frac = np.ascontiguousarray(col[~fixed])
        if frac.size:
            q[ones : ones + frac.size + 1] = pmf_dft(frac, self.obj.backend).pmf
        else:
            q[ones] = 1.0
        self.q = q

    def ids(self) -> np.ndarray:
        col = self.obj._col(self.p)
        q = np.ascontiguousarray(self.q)
        base = float(q @ self.obj.C.dist)
        a0, a1 = _kernels.card_remove_sums(q, col, self.obj.C.dist)
        return self.obj._expand(self.p, np.stack([a0 - base, a1 - base], axis=1))

    def value(self) -> float:
        return float(self.q @ self.obj.C.dist)

    def commit(self, i: int, x: int) -> None:
        super().commit(i, x)
        self._rebuild()
