"""Closed-form expectations and incremental differences for the
minimum-over-subset, covering, clique and colorwise-conflict conditions.

Each condition comes in two forms: small functions operating on a single
profile / neighbor list / edge list (``ms_eval``, ``cover_ids``, ...), and an
``Objective`` subclass that aggregates many of them with vectorized code.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from . import _kernels
from .core import (
    Objective,
    Tracker,
    binary_ids_from_grad,
    categorical_ids_from_partials,
)

SOFT_P_MAX = 1.0 - 1e-12


# ---------------------------------------------------------------- min w.r.t. subset


@dataclass(frozen=True)
class DistanceProfile:
    """Nodes ordered by increasing score ``h(target, v)``; ties by node index."""

    target: int
    order: np.ndarray
    dists: np.ndarray

    @classmethod
    def of(cls, target: int, scores) -> "DistanceProfile":
        scores = np.asarray(scores, dtype=float)
        order = np.argsort(scores, kind="stable")
        return cls(int(target), order.astype(np.int64), scores[order])


def ms_eval(prof: DistanceProfile, p) -> float:
    """E[min_{v chosen} h(target, v)], with 0 for the empty selection."""
    p = np.asarray(p, dtype=float)
    pm = p[prof.order]
    pref = np.concatenate([[1.0], np.cumprod(1.0 - pm)[:-1]])
    return float(np.sum(pref * pm * prof.dists))


def _ms_grad_single(prof: DistanceProfile, p) -> np.ndarray:
    p = np.ascontiguousarray(p, dtype=float)
    return _kernels.ms_grad(prof.order[None, :].copy(), prof.dists[None, :].copy(), p)


def ms_ids(prof: DistanceProfile, p) -> np.ndarray:
    """IDs for every node, shape ``(n, 2)``.

    With ``P_j`` the probability that none of ``v_1..v_{j-1}`` is chosen and
    ``S_j = sum_{j'>j} prod_{j<k<j'}(1 - p_{v_k}) p_{v_j'} d_j'``:
    ``D[v_j, 0] = P_j p_{v_j} (S_j - d_j)`` and
    ``D[v_j, 1] = P_j (1 - p_{v_j}) (d_j - S_j)``. This equals
    ``-q_j d_j + p/(1-p) sum_{j'>j} q_j' d_j'`` and
    ``sum_{j'>j} q_j' (d_j - d_j') + r d_j`` (``r`` = all-unchosen mass)
    without dividing by ``1 - p_{v_j}``.
    """
    p = np.asarray(p, dtype=float)
    return binary_ids_from_grad(p, _ms_grad_single(prof, p))


def ms_hat(X, prof: DistanceProfile) -> float:
    chosen = np.flatnonzero(np.asarray(X)[prof.order])
    return float(prof.dists[chosen[0]]) if chosen.size else 0.0


class MinSubset(Objective):
    """Sum over targets of E[min distance to the selection].

    ``W[v, u]`` is the score of serving target ``v`` from node ``u``; every
    row of ``W`` is one target profile over all ``n`` nodes.
    """

    def __init__(self, W):
        W = np.asarray(W, dtype=float)
        if W.ndim != 2 or W.shape[0] != W.shape[1]:
            raise ValueError("W must be a square matrix")
        self.W = W
        self.n = W.shape[1]
        self.order = np.argsort(W, axis=1, kind="stable").astype(np.int64)
        self.dsorted = np.ascontiguousarray(np.take_along_axis(W, self.order, axis=1))

    def profile(self, v: int) -> DistanceProfile:
        return DistanceProfile(v, self.order[v], self.dsorted[v])

    def value(self, p) -> float:
        return float(_kernels.ms_value(self.order, self.dsorted, np.ascontiguousarray(p, dtype=float)))

    def grad(self, p) -> np.ndarray:
        return _kernels.ms_grad(self.order, self.dsorted, np.ascontiguousarray(p, dtype=float))

    def ids(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        return binary_ids_from_grad(p, self.grad(p))

    def hat(self, X) -> float:
        sel = np.flatnonzero(np.asarray(X))
        if sel.size == 0:
            return 0.0
        return float(self.W[:, sel].min(axis=1).sum())


# ---------------------------------------------------------------- covering


@dataclass(frozen=True)
class NeighborList:
    target: int
    neighbors: np.ndarray

    def __post_init__(self):
        if np.unique(self.neighbors).size != len(self.neighbors):
            raise ValueError("duplicate neighbors")


def cover_eval(nb: NeighborList, p) -> float:
    """Probability that no neighbor of the target is chosen."""
    p = np.asarray(p, dtype=float)
    return float(np.prod(1.0 - p[nb.neighbors]))


def cover_ids(nb: NeighborList, p) -> dict[int, tuple[float, float]]:
    """Sparse IDs ``{j: (D[j, 0], D[j, 1])}`` over the neighbors ``j``.

    ``D[j, 0] = p_j prod_{v != j}(1 - p_v)`` and ``D[j, 1] = -cover_eval``;
    every other node has zero IDs.
    """
    p = np.asarray(p, dtype=float)
    f = cover_eval(nb, p)
    out = {}
    for j in nb.neighbors:
        rest = np.prod([1.0 - p[v] for v in nb.neighbors if v != j])
        out[int(j)] = (float(p[j] * rest), -f)
    return out


def cover_hat(X, nb: NeighborList) -> float:
    return float(not np.any(np.asarray(X)[nb.neighbors]))


def _segment_products(factors: np.ndarray, indptr: np.ndarray):
    """Per-segment product of non-zero factors and count of exact zeros."""
    nseg = indptr.shape[0] - 1
    prod = np.ones(nseg)
    zeros = np.zeros(nseg, dtype=np.int64)
    sizes = np.diff(indptr)
    nz = sizes > 0
    if factors.size:
        safe = np.where(factors == 0.0, 1.0, factors)
        starts = indptr[:-1][nz]
        prod[nz] = np.multiply.reduceat(safe, starts)
        zeros[nz] = np.add.reduceat((factors == 0.0).astype(np.int64), starts)
    return prod, zeros


def leave_one_out_products(factors: np.ndarray, indptr: np.ndarray):
    """For each entry, the product of the other factors in its segment.

    Returns ``(full, loo)``: the full product per segment and, per entry, the
    product with that entry left out. Exact zeros are handled by counting.
    """
    prod, zeros = _segment_products(factors, indptr)
    full = np.where(zeros > 0, 0.0, prod)
    seg = np.repeat(np.arange(indptr.shape[0] - 1), np.diff(indptr))
    pz, zc = prod[seg], zeros[seg]
    is_zero = factors == 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        loo = np.where(zc == 0, pz / np.where(is_zero, 1.0, factors), 0.0)
    loo = np.where((zc == 1) & is_zero, pz, loo)
    return full, loo


class Cover(Objective):
    """Weighted expected number of uncovered items.

    Item ``j`` is covered by a chosen node ``v`` in ``members[j]`` with
    probability ``s_jv`` (``strengths``, default 1), independently across
    nodes. The value is ``sum_j w_j prod_{v in members[j]} (1 - s_jv p_v)``.
    """

    def __init__(self, n: int, members, weights=None, strengths=None):
        self.n = int(n)
        members = [np.asarray(m, dtype=np.int64) for m in members]
        self.m = len(members)
        self.indptr = np.concatenate([[0], np.cumsum([len(m) for m in members])]).astype(np.int64)
        self.indices = np.concatenate(members) if members else np.zeros(0, dtype=np.int64)
        if self.indices.size and (self.indices.min() < 0 or self.indices.max() >= self.n):
            raise ValueError("member index out of range")
        self.weights = np.ones(self.m) if weights is None else np.asarray(weights, dtype=float)
        if strengths is None:
            self.strengths = None
        else:
            self.strengths = np.concatenate([np.asarray(s, dtype=float) for s in strengths]) if self.m else np.zeros(0)
            if self.strengths.shape != self.indices.shape:
                raise ValueError("one strength per member required")
        self._seg = np.repeat(np.arange(self.m), np.diff(self.indptr))

    def _factors(self, p):
        pv = np.asarray(p, dtype=float)[self.indices]
        return 1.0 - (pv if self.strengths is None else self.strengths * pv)

    def item_values(self, p) -> np.ndarray:
        full, _ = leave_one_out_products(self._factors(p), self.indptr)
        return full

    def value(self, p) -> float:
        return float(self.weights @ self.item_values(p))

    def grad(self, p) -> np.ndarray:
        _, loo = leave_one_out_products(self._factors(p), self.indptr)
        contrib = self.weights[self._seg] * loo
        if self.strengths is not None:
            contrib = contrib * self.strengths
        return -np.bincount(self.indices, weights=contrib, minlength=self.n)

    def ids(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        return binary_ids_from_grad(p, self.grad(p))

    def hat(self, X) -> float:
        """Expected uncovered weight of a fixed selection (coverage events
        stay random when strengths are below one)."""
        X = np.asarray(X)
        total = 0.0
        for j in range(self.m):
            lo, hi = self.indptr[j], self.indptr[j + 1]
            miss = 1.0
            for t in range(lo, hi):
                if X[self.indices[t]] == 1:
                    miss *= 1.0 - (1.0 if self.strengths is None else self.strengths[t])
            total += self.weights[j] * miss
        return total


# ---------------------------------------------------------------- cliques


def non_edges(n: int, edges) -> np.ndarray:
    """All pairs ``(u, v)``, ``u < v``, that are not edges."""
    adj = np.zeros((n, n), dtype=bool)
    for u, v in edges:
        adj[u, v] = adj[v, u] = True
    iu, ju = np.triu_indices(n, k=1)
    keep = ~adj[iu, ju]
    return np.stack([iu[keep], ju[keep]], axis=1).astype(np.int64)


def clique_eval(ne, p) -> float:
    """Expected number of chosen non-adjacent pairs."""
    ne = np.asarray(ne, dtype=np.int64).reshape(-1, 2)
    p = np.asarray(p, dtype=float)
    return float(np.sum(p[ne[:, 0]] * p[ne[:, 1]]))


def clique_ids(ne, p) -> np.ndarray:
    """``D[i, 0] = -p_i S_i`` and ``D[i, 1] = (1 - p_i) S_i`` with ``S_i`` the
    probability mass on non-neighbors of ``i``; one pass over the pairs."""
    ne = np.asarray(ne, dtype=np.int64).reshape(-1, 2)
    p = np.asarray(p, dtype=float)
    S = np.zeros(p.shape[0])
    np.add.at(S, ne[:, 0], p[ne[:, 1]])
    np.add.at(S, ne[:, 1], p[ne[:, 0]])
    return binary_ids_from_grad(p, S)


def _sym_matrix(n: int, pairs: np.ndarray, weights: np.ndarray) -> sp.csr_matrix:
    rows = np.concatenate([pairs[:, 0], pairs[:, 1]])
    cols = np.concatenate([pairs[:, 1], pairs[:, 0]])
    return sp.csr_matrix((np.concatenate([weights, weights]), (rows, cols)), shape=(n, n))


class Pairwise(Objective):
    """``sum_{(u,v)} w_uv p_u p_v`` over a fixed list of pairs.

    With unit weights on the non-edges this is the clique violation count;
    with ``-log P_uv`` on edges it is the robust k-clique uncertainty cost.
    """

    def __init__(self, n: int, pairs, weights=None):
        self.n = int(n)
        self.pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
        self.weights = np.ones(len(self.pairs)) if weights is None else np.asarray(weights, dtype=float)
        if np.any(self.pairs[:, 0] == self.pairs[:, 1]):
            raise ValueError("self pairs are not allowed")
        self.M = _sym_matrix(self.n, self.pairs, self.weights)

    def value(self, p) -> float:
        p = np.asarray(p, dtype=float)
        return float(np.sum(self.weights * p[self.pairs[:, 0]] * p[self.pairs[:, 1]]))

    def grad(self, p) -> np.ndarray:
        return self.M @ np.asarray(p, dtype=float)

    def ids(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        return binary_ids_from_grad(p, self.grad(p))

    def hat(self, X) -> float:
        X = np.asarray(X)
        both = (X[self.pairs[:, 0]] == 1) & (X[self.pairs[:, 1]] == 1)
        return float(self.weights[both].sum())

    def tracker(self, p) -> "PairwiseTracker":
        return PairwiseTracker(self, p)


class PairwiseTracker(Tracker):
    def __init__(self, obj: Pairwise, p):
        super().__init__(obj, p)
        self.S = obj.M @ self.p
        self.cols = obj.M.tocsc()

    def ids(self) -> np.ndarray:
        return binary_ids_from_grad(self.p, self.S)

    def value(self) -> float:
        return float(0.5 * self.p @ self.S)

    def commit(self, i: int, x: int) -> None:
        delta = float(x) - self.p[i]
        super().commit(i, x)
        if delta != 0.0:
            lo, hi = self.cols.indptr[i], self.cols.indptr[i + 1]
            self.S[self.cols.indices[lo:hi]] += self.cols.data[lo:hi] * delta


# ---------------------------------------------------------------- colorwise conflicts


@dataclass(frozen=True)
class UncertainEdgeList:
    """Edges with existence probabilities, split into hard (P = 1) and soft."""

    n: int
    edges: np.ndarray
    probs: np.ndarray

    @classmethod
    def of(cls, n: int, edges, probs) -> "UncertainEdgeList":
        edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        probs = np.asarray(probs, dtype=float)
        if edges.shape[0] != probs.shape[0]:
            raise ValueError("one probability per edge required")
        if np.any((probs < 0) | (probs > 1)):
            raise ValueError("edge probabilities must lie in [0, 1]")
        if np.any(edges[:, 0] == edges[:, 1]):
            raise ValueError("self-loops are not allowed")
        if edges.size and (edges.min() < 0 or edges.max() >= n):
            raise ValueError("edge endpoint out of range")
        keep = probs > 0
        return cls(int(n), edges[keep], probs[keep])

    @property
    def hard_mask(self) -> np.ndarray:
        return self.probs == 1.0

    @property
    def hard(self) -> np.ndarray:
        return self.edges[self.hard_mask]

    @property
    def soft(self) -> np.ndarray:
        return self.edges[~self.hard_mask]

    @property
    def soft_probs(self) -> np.ndarray:
        return self.probs[~self.hard_mask]

    @property
    def soft_penalties(self) -> np.ndarray:
        """``-log(1 - P)`` per soft edge, with P capped just below 1."""
        return -np.log1p(-np.minimum(self.soft_probs, SOFT_P_MAX))


class Colorwise(Objective):
    """``sum_{(u,v)} w_uv sum_r p_ur p_vr``: expected weight of same-color pairs."""

    def __init__(self, n: int, c: int, pairs, weights=None):
        if c < 2:
            raise ValueError("need at least two colors")
        self.n = int(n)
        self.arity = int(c)
        self.categorical = True
        self.pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
        self.weights = np.ones(len(self.pairs)) if weights is None else np.asarray(weights, dtype=float)
        self.M = _sym_matrix(self.n, self.pairs, self.weights)

    def aggregates(self, p) -> np.ndarray:
        """``A[i, r] = sum_j w_ij p_jr`` over the pairs touching ``i``."""
        return self.M @ np.asarray(p, dtype=float)

    def value(self, p) -> float:
        p = np.asarray(p, dtype=float)
        same = np.sum(p[self.pairs[:, 0]] * p[self.pairs[:, 1]], axis=1)
        return float(self.weights @ same)

    def ids(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        return categorical_ids_from_partials(p, self.aggregates(p))

    def hat(self, X) -> float:
        X = np.asarray(X)
        return float(self.weights[X[self.pairs[:, 0]] == X[self.pairs[:, 1]]].sum())

    def tracker(self, p) -> "ColorwiseTracker":
        return ColorwiseTracker(self, p)


class ColorwiseTracker(Tracker):
    def __init__(self, obj: Colorwise, p):
        super().__init__(obj, p)
        self.A = obj.M @ self.p
        self.cols = obj.M.tocsc()

    def ids(self) -> np.ndarray:
        return categorical_ids_from_partials(self.p, self.A)

    def value(self) -> float:
        return float(0.5 * np.sum(self.p * self.A))

    def commit(self, i: int, x: int) -> None:
        delta = -self.p[i].copy()
        delta[x] += 1.0
        super().commit(i, x)
        lo, hi = self.cols.indptr[i], self.cols.indptr[i + 1]
        self.A[self.cols.indices[lo:hi]] += self.cols.data[lo:hi, None] * delta[None, :]


def colorwise_conflict_eval(ue: UncertainEdgeList, p, c: int | None = None) -> tuple[float, float]:
    """Expected hard-conflict count and expected soft penalty ``sum -log(1-P)``."""
    p = np.asarray(p, dtype=float)
    c = p.shape[1] if c is None else c
    g1 = Colorwise(ue.n, c, ue.hard).value(p)
    f2 = Colorwise(ue.n, c, ue.soft, ue.soft_penalties).value(p)
    return g1, f2


def colorwise_conflict_ids(ue: UncertainEdgeList, p) -> tuple[np.ndarray, np.ndarray]:
    """IDs of the hard and soft terms, each of shape ``(n, c)``.

    With ``A[i, r]`` the (weighted) color-``r`` mass on the neighbors of
    ``i``, ``D[i, x] = A[i, x] - sum_r p_ir A[i, r]``; this is the
    pairwise-difference form summed over ``x' != x`` collapsed with
    ``sum_r p_ir = 1``.
    """
    p = np.asarray(p, dtype=float)
    c = p.shape[1]
    hard = Colorwise(ue.n, c, ue.hard).ids(p)
    soft = Colorwise(ue.n, c, ue.soft, ue.soft_penalties).ids(p)
    return hard, soft


class EmptyGroups(Objective):
    """Expected number of decisions (groups) that no node takes."""

    def __init__(self, n: int, c: int):
        self.n = int(n)
        self.arity = int(c)
        self.categorical = True
        self._indptr = np.arange(0, self.n * c + 1, self.n)

    def value(self, p) -> float:
        return float(np.prod(1.0 - np.asarray(p, dtype=float), axis=0).sum())

    def ids(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        # column-major segments: one per decision r
        factors = np.ascontiguousarray((1.0 - p).T).ravel()
        _, loo = leave_one_out_products(factors, self._indptr)
        G = -loo.reshape(self.arity, self.n).T
        return categorical_ids_from_partials(p, G)

    def hat(self, X) -> float:
        return float(self.arity - np.unique(np.asarray(X)).size)
