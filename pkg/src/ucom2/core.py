"""Decision states, local derandomization, objective composition and the
brute-force expectation oracle.

Probabilities are plain float64 arrays: a 1-D array of length n is a binary
decision state (entry i is Pr[X_i = 1]); a 2-D ``(n, c)`` array is a
categorical state whose rows sum to one. Discrete decisions are integer
arrays of length n with values in ``range(c)`` (``c = 2`` for binary).
"""
from __future__ import annotations

import itertools
from typing import Callable, Sequence

import numpy as np

DEFAULT_EPS = 1e-6
ORACLE_LIMIT = 2**20


class EnumerationTooLarge(ValueError):
    """Raised when brute-force enumeration would exceed ``ORACLE_LIMIT`` outcomes."""


def arity(p) -> int:
    p = np.asarray(p)
    return 2 if p.ndim == 1 else p.shape[1]


def is_discrete_row(p, i) -> bool:
    row = p[i]
    if np.ndim(row) == 0:
        return row == 0.0 or row == 1.0
    return bool(np.all((row == 0.0) | (row == 1.0)))


def discrete_mask(p) -> np.ndarray:
    """Boolean mask of rows that are exactly 0/1 (or exactly one-hot)."""
    p = np.asarray(p)
    exact = (p == 0.0) | (p == 1.0)
    return exact if p.ndim == 1 else exact.all(axis=1)


def derandomize_entry(p, i: int, x: int) -> np.ndarray:
    """Return a copy of ``p`` with row ``i`` fixed to decision ``x``."""
    p = np.asarray(p, dtype=float)
    n = p.shape[0]
    if not 0 <= i < n:
        raise IndexError(f"node index {i} out of range for n={n}")
    c = arity(p)
    if not 0 <= x < c:
        raise ValueError(f"decision {x} out of range for {c} choices")
    out = p.copy()
    if p.ndim == 1:
        out[i] = float(x)
    else:
        out[i] = 0.0
        out[i, x] = 1.0
    return out


def _project_floor_simplex(rows: np.ndarray, eps: float) -> np.ndarray:
    # Euclidean projection of each row onto {y >= eps, sum(y) = 1}.
    c = rows.shape[1]
    budget = 1.0 - c * eps
    z = rows - eps
    u = -np.sort(-z, axis=1)
    css = np.cumsum(u, axis=1) - budget
    ind = np.arange(1, c + 1)
    cond = u - css / ind > 0
    rho = c - 1 - np.argmax(cond[:, ::-1], axis=1)
    theta = css[np.arange(rows.shape[0]), rho] / (rho + 1)
    return np.maximum(z - theta[:, None], 0.0) + eps


def clamp(p, eps: float = DEFAULT_EPS) -> np.ndarray:
    """Move probabilities into the open box ``[eps, 1 - eps]``.

    Binary states are clipped entry-wise. Categorical states are projected
    row-wise onto the simplex with every entry at least ``eps``; rows already
    inside that set are returned unchanged, so the operation is idempotent.
    """
    if not 0.0 < eps < 0.5:
        raise ValueError(f"eps must lie in (0, 0.5), got {eps}")
    p = np.asarray(p, dtype=float)
    if p.ndim == 1:
        return np.clip(p, eps, 1.0 - eps)
    if p.shape[1] < 2:
        raise ValueError("categorical states need at least two choices")
    if p.shape[1] * eps >= 1.0:
        raise ValueError(f"eps={eps} too large for {p.shape[1]} choices")
    inside = (p >= eps).all(axis=1) & (np.abs(p.sum(axis=1) - 1.0) <= 1e-12)
    out = p.copy()
    if not inside.all():
        out[~inside] = _project_floor_simplex(p[~inside], eps)
    return out


def to_onehot(X, c: int) -> np.ndarray:
    X = np.asarray(X, dtype=int)
    out = np.zeros((X.shape[0], c))
    out[np.arange(X.shape[0]), X] = 1.0
    return out


def as_state(X, c: int = 2, categorical: bool | None = None) -> np.ndarray:
    """Embed a discrete decision as a probability state.

    Binary decisions become a 0/1 vector; categorical ones (default when
    ``c > 2``) become one-hot rows.
    """
    X = np.asarray(X, dtype=int)
    if np.any(X < 0) or np.any(X >= c):
        raise ValueError("decision value out of range")
    categorical = c > 2 if categorical is None else categorical
    return to_onehot(X, c) if categorical else X.astype(float)


def as_decision(p) -> np.ndarray:
    """Read the discrete decision off a fully discrete state."""
    p = np.asarray(p)
    if not discrete_mask(p).all():
        raise ValueError("state is not fully discrete")
    return p.astype(int) if p.ndim == 1 else p.argmax(axis=1)


def oracle_expectation(g: Callable[[np.ndarray], float], p) -> float:
    """Exact E_{X~p} g(X) by enumerating every outcome.

    ``p`` is a binary vector or a categorical matrix; outcomes are weighted by
    the product of independent per-node probabilities.
    """
    p = np.asarray(p, dtype=float)
    n = p.shape[0]
    c = arity(p)
    if c**n > ORACLE_LIMIT:
        raise EnumerationTooLarge(f"{c}^{n} outcomes exceed the enumeration limit")
    probs = np.stack([1.0 - p, p], axis=1) if p.ndim == 1 else p
    total = 0.0
    rows = np.arange(n)
    for X in itertools.product(range(c), repeat=n):
        X = np.array(X, dtype=int)
        w = float(np.prod(probs[rows, X]))
        if w != 0.0:
            total += w * g(X)
    return total


class Objective:
    """A probabilistic objective with incremental differences.

    Subclasses implement ``value`` and ``ids``; ``ids(p)[i, x]`` is
    ``value(derandomize_entry(p, i, x)) - value(p)``. ``hat`` is the discrete
    function whose expectation ``value`` computes (used by the oracle tests).
    """

    n: int
    arity: int = 2
    categorical: bool = False

    def value(self, p) -> float:
        raise NotImplementedError

    def ids(self, p) -> np.ndarray:
        raise NotImplementedError

    def hat(self, X) -> float:
        raise NotImplementedError

    def grad(self, p) -> np.ndarray:
        """Gradient obtained from the incremental differences.

        For binary states this is d f / d p_i = ids[i, 1] - ids[i, 0]. For
        categorical states it is ids[i, r], which differs from the partial
        derivative by the per-row constant value(p); any per-row constant is
        removed by moving along the simplex.
        """
        D = self.ids(p)
        if np.ndim(p) == 1:
            return D[:, 1] - D[:, 0]
        return D

    def tracker(self, p) -> "Tracker":
        return Tracker(self, p)


class Tracker:
    """Mutable derandomization state for one objective.

    The default recomputes incremental differences from scratch; objectives
    with cheap cached aggregates override ``tracker`` with a subclass.
    """

    def __init__(self, obj: Objective, p):
        self.obj = obj
        self.p = np.array(p, dtype=float)

    def ids(self) -> np.ndarray:
        return self.obj.ids(self.p)

    def value(self) -> float:
        return self.obj.value(self.p)

    def commit(self, i: int, x: int) -> None:
        if self.p.ndim == 1:
            self.p[i] = float(x)
        else:
            self.p[i] = 0.0
            self.p[i, x] = 1.0


def binary_ids_from_grad(p, g) -> np.ndarray:
    """IDs of a function affine in each coordinate: (-p g, (1 - p) g)."""
    return np.stack([-p * g, (1.0 - p) * g], axis=1)


def categorical_ids_from_partials(p, G) -> np.ndarray:
    """IDs of a function affine in each row: G[i, x] - sum_r p[i, r] G[i, r]."""
    return G - np.sum(p * G, axis=1, keepdims=True)


class PenaltyComposite(Objective):
    """Weighted sum ``sum_k beta_k * term_k`` of objectives on one decision space."""

    def __init__(self, terms: Sequence[tuple[Objective, float]], names: Sequence[str] | None = None):
        terms = list(terms)
        if not terms:
            raise ValueError("a composite needs at least one term")
        n, a = terms[0][0].n, terms[0][0].arity
        cat = terms[0][0].categorical or a > 2
        for obj, beta in terms:
            if obj.n != n or obj.arity != a or (obj.categorical or obj.arity > 2) != cat:
                raise ValueError("all terms must share the decision space")
            if not np.isfinite(beta) or beta < 0:
                raise ValueError(f"coefficient must be finite and non-negative, got {beta}")
        self.terms = [(obj, float(beta)) for obj, beta in terms]
        self.names = list(names) if names is not None else [type(t).__name__ for t, _ in terms]
        self.n = n
        self.arity = a
        self.categorical = any(t.categorical for t, _ in self.terms)

    def value(self, p) -> float:
        return float(sum(b * t.value(p) for t, b in self.terms if b != 0.0))

    def ids(self, p) -> np.ndarray:
        out = np.zeros((self.n, self.arity))
        for t, b in self.terms:
            if b != 0.0:
                out += b * t.ids(p)
        return out

    def hat(self, X) -> float:
        return float(sum(b * t.hat(X) for t, b in self.terms if b != 0.0))

    def term_values(self, p) -> dict[str, float]:
        return {name: t.value(p) for name, (t, _) in zip(self.names, self.terms)}

    def tracker(self, p) -> "CompositeTracker":
        return CompositeTracker(self, p)


class CompositeTracker(Tracker):
    def __init__(self, obj: PenaltyComposite, p):
        super().__init__(obj, p)
        self.parts = [(t.tracker(p), b) for t, b in obj.terms if b != 0.0]

    def ids(self) -> np.ndarray:
        out = np.zeros((self.obj.n, self.obj.arity))
        for tr, b in self.parts:
            out += b * tr.ids()
        return out

    def value(self) -> float:
        return float(sum(b * tr.value() for tr, b in self.parts))

    def commit(self, i: int, x: int) -> None:
        super().commit(i, x)
        for tr, _ in self.parts:
            tr.commit(i, x)


def composite_eval(pc: PenaltyComposite, p) -> float:
    return pc.value(p)


def composite_ids(pc: PenaltyComposite, p) -> np.ndarray:
    return pc.ids(p)


def composite_grad(pc: PenaltyComposite, p) -> np.ndarray:
    return pc.grad(p)


def recompute_ids(obj: Objective, p) -> np.ndarray:
    """IDs by local derandomization and full re-evaluation (reference path)."""
    p = np.asarray(p, dtype=float)
    base = obj.value(p)
    out = np.empty((p.shape[0], obj.arity))
    for i in range(p.shape[0]):
        for x in range(obj.arity):
            out[i, x] = obj.value(derandomize_entry(p, i, x)) - base
    return out
