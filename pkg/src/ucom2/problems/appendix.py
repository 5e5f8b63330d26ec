"""Four further assemblies: robust k-clique, robust dominating set, clique
cover, and spanning trees via layered parent assignment."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..conditions import Colorwise, Cover, EmptyGroups, Pairwise, UncertainEdgeList, non_edges
from ..core import Objective, PenaltyComposite, recompute_ids
from ..poibin import Cardinality, CardinalitySet
from .base import Problem, Report, check_k


def _pair(beta, count: int) -> tuple:
    if beta is None:
        return (1.0,) * count
    if np.ndim(beta) == 0:
        return (float(beta),) * count
    beta = tuple(float(b) for b in beta)
    if len(beta) != count:
        raise ValueError(f"expected {count} coefficients")
    return beta


def _adjacency(n: int, edges) -> np.ndarray:
    adj = np.zeros((n, n), dtype=bool)
    e = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    adj[e[:, 0], e[:, 1]] = adj[e[:, 1], e[:, 0]] = True
    return adj


@dataclass(eq=False)
class RobustCliqueInstance(Problem):
    """Pick ``k`` nodes forming a clique whose edges all exist with the
    highest probability."""

    edges: UncertainEdgeList
    k: int
    kind = "rkc"

    def __post_init__(self):
        self.k = check_k(self.k, self.n)

    @property
    def n(self) -> int:
        return self.edges.n

    def init_spec(self):
        return ("card", self.k / self.n)

    def build(self, beta=None) -> PenaltyComposite:
        """``beta`` is a scalar or ``(clique, cardinality)`` coefficients."""
        b_cq, b_card = _pair(beta, 2)
        ue = self.edges
        uncertainty = Pairwise(self.n, ue.edges, -np.log(ue.probs))
        clique = Pairwise(self.n, non_edges(self.n, ue.edges))
        card = Cardinality(CardinalitySet.exactly(self.n, self.k))
        return PenaltyComposite([(uncertainty, 1.0), (clique, b_cq), (card, b_card)],
                                ["uncertainty", "clique", "cardinality"])

    def evaluate(self, X) -> Report:
        X = self.check_decision(X)
        sel = np.flatnonzero(X)
        adj = _adjacency(self.n, self.edges.edges)
        sub = adj[np.ix_(sel, sel)]
        missing = int((sel.size * (sel.size - 1) - sub.sum()) // 2)
        e = self.edges.edges
        inside = (X[e[:, 0]] == 1) & (X[e[:, 1]] == 1)
        cost = float(-np.log(self.edges.probs[inside]).sum())
        feasible = missing == 0 and sel.size == self.k
        return Report(cost if feasible else np.inf, feasible,
                      {"cardinality": abs(int(sel.size) - self.k), "clique": missing},
                      {"existence_probability": float(np.prod(self.edges.probs[inside]))})


@dataclass(eq=False)
class RobustDominatingInstance(Problem):
    """Pick ``k`` nodes dominating the graph, maximizing the probability that
    the domination survives edge uncertainty. Every node covers itself."""

    edges: UncertainEdgeList
    k: int
    kind = "rds"

    def __post_init__(self):
        self.k = check_k(self.k, self.n)

    @property
    def n(self) -> int:
        return self.edges.n

    def init_spec(self):
        return ("card", self.k / self.n)

    def neighborhoods(self):
        """Members and coverage probabilities per node, self first."""
        members = [[i] for i in range(self.n)]
        strengths = [[1.0] for _ in range(self.n)]
        for (u, v), P in zip(self.edges.edges, self.edges.probs):
            members[u].append(v)
            strengths[u].append(P)
            members[v].append(u)
            strengths[v].append(P)
        return members, strengths

    def build(self, beta=None) -> PenaltyComposite:
        (b_card,) = _pair(beta, 1)
        members, strengths = self.neighborhoods()
        uncovered = Cover(self.n, members, strengths=strengths)
        card = Cardinality(CardinalitySet.exactly(self.n, self.k))
        return PenaltyComposite([(uncovered, 1.0), (card, b_card)], ["uncovered", "cardinality"])

    def evaluate(self, X) -> Report:
        X = self.check_decision(X)
        members, strengths = self.neighborhoods()
        expected = 0.0
        undominated = 0
        for mem, st in zip(members, strengths):
            chosen = [s for v, s in zip(mem, st) if X[v] == 1]
            undominated += not chosen
            expected += float(np.prod([1.0 - s for s in chosen]))
        size = int(X.sum())
        feasible = undominated == 0 and size == self.k
        return Report(expected if feasible else np.inf, feasible,
                      {"cardinality": abs(size - self.k), "domination": undominated},
                      {"expected_uncovered": expected})


@dataclass(eq=False)
class CliqueCoverInstance(Problem):
    """Partition the nodes into ``c`` groups that each form a clique."""

    n_nodes: int
    edges: np.ndarray
    c: int
    kind = "cc"
    categorical = True

    def __post_init__(self):
        if self.c < 2:
            raise ValueError("need at least two groups")
        self.edges = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        self.arity = int(self.c)

    @property
    def n(self) -> int:
        return self.n_nodes

    def build(self, beta=None) -> PenaltyComposite:
        """Non-adjacent same-group pairs plus ``beta`` times empty groups."""
        (b_empty,) = _pair(beta, 1)
        conflicts = Colorwise(self.n, self.c, non_edges(self.n, self.edges))
        return PenaltyComposite([(conflicts, 1.0), (EmptyGroups(self.n, self.c), b_empty)],
                                ["non_clique", "empty"])

    def evaluate(self, X) -> Report:
        X = self.check_decision(X)
        ne = non_edges(self.n, self.edges)
        bad = int(np.sum(X[ne[:, 0]] == X[ne[:, 1]]))
        empty = int(self.c - np.unique(X).size)
        return Report(float(bad), bad == 0, {"non_clique": bad}, {"empty_groups": empty})


class LayeredParents(Objective):
    """Per-node expectations over layer assignments in a graph.

    For a node ``i`` in layer ``l >= 1`` its candidate parents are the
    neighbors in layer ``l - 1``. ``part="orphans"`` is the expected number
    of non-root nodes without a candidate parent; ``part="cost"`` is the
    expected weight to the cheapest candidate parent (0 when there is none).
    Incremental differences are obtained by re-evaluation.
    """

    def __init__(self, n: int, c: int, neighbors, weights, part: str):
        if part not in ("orphans", "cost"):
            raise ValueError("part must be 'orphans' or 'cost'")
        self.n, self.arity, self.part = int(n), int(c), part
        self.categorical = True
        L = max([len(nb) for nb in neighbors] + [1])
        # Pad every profile with a phantom node (index n) that is never chosen.
        self.order = np.full((n, L), n, dtype=np.int64)
        self.dists = np.zeros((n, L))
        for i, (nb, w) in enumerate(zip(neighbors, weights)):
            idx = np.argsort(np.asarray(w, dtype=float), kind="stable")
            self.order[i, : len(nb)] = np.asarray(nb, dtype=np.int64)[idx]
            self.dists[i, : len(nb)] = np.asarray(w, dtype=float)[idx]

    def _per_layer(self, col: np.ndarray) -> np.ndarray:
        pm = np.append(col, 0.0)[self.order]
        keep = np.cumprod(1.0 - pm, axis=1)
        if self.part == "orphans":
            return keep[:, -1]
        pref = np.ones_like(pm)
        pref[:, 1:] = keep[:, :-1]
        return np.sum(pref * pm * self.dists, axis=1)

    def value(self, p) -> float:
        p = np.asarray(p, dtype=float)
        return float(sum(p[:, l] @ self._per_layer(p[:, l - 1]) for l in range(1, self.arity)))

    def ids(self, p) -> np.ndarray:
        return recompute_ids(self, p)

    def hat(self, X) -> float:
        X = np.asarray(X)
        total = 0.0
        for i in range(self.n):
            if X[i] == 0:
                continue
            parents = [d for v, d in zip(self.order[i], self.dists[i]) if v < self.n and X[v] == X[i] - 1]
            if self.part == "orphans":
                total += not parents
            elif parents:
                total += min(parents)
        return total


@dataclass(eq=False)
class LayeredTreeInstance(Problem):
    """Spanning tree via layers: one root in layer 0, every other node takes
    its cheapest neighbor in the previous layer as parent."""

    n_nodes: int
    edges: np.ndarray
    weights: np.ndarray
    c: int | None = None
    kind = "mst"
    categorical = True

    def __post_init__(self):
        self.edges = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        self.weights = np.asarray(self.weights, dtype=float)
        if self.weights.shape[0] != self.edges.shape[0]:
            raise ValueError("one weight per edge required")
        if np.any(self.edges[:, 0] == self.edges[:, 1]):
            raise ValueError("self-loops are not allowed")
        self.c = self.n_nodes if self.c is None else int(self.c)
        if not 2 <= self.c <= self.n_nodes:
            raise ValueError("layer count must lie in [2, n]")
        self.arity = self.c

    @property
    def n(self) -> int:
        return self.n_nodes

    def neighbors(self):
        nb = [[] for _ in range(self.n)]
        w = [[] for _ in range(self.n)]
        for (u, v), x in zip(self.edges, self.weights):
            nb[u].append(v)
            w[u].append(x)
            nb[v].append(u)
            w[v].append(x)
        return nb, w

    def build(self, beta=None) -> PenaltyComposite:
        """Tree weight plus ``beta`` times (orphans + distance of the root
        count to one). ``beta`` may be a pair for the two penalties."""
        b_orph, b_root = _pair(beta, 2)
        nb, w = self.neighbors()
        cost = LayeredParents(self.n, self.c, nb, w, "cost")
        orphans = LayeredParents(self.n, self.c, nb, w, "orphans")
        root = Cardinality(CardinalitySet.exactly(self.n, 1), column=0, arity=self.c)
        return PenaltyComposite([(cost, 1.0), (orphans, b_orph), (root, b_root)],
                                ["weight", "orphans", "root"])

    def evaluate(self, X) -> Report:
        X = self.check_decision(X)
        nb, w = self.neighbors()
        cost = LayeredParents(self.n, self.c, nb, w, "cost").hat(X)
        orphans = int(LayeredParents(self.n, self.c, nb, w, "orphans").hat(X))
        roots = int(np.sum(X == 0))
        feasible = orphans == 0 and roots == 1
        return Report(cost if feasible else np.inf, feasible,
                      {"orphans": orphans, "root": abs(roots - 1)}, {"weight": cost})


def build_rkc(inst: RobustCliqueInstance, beta=None) -> PenaltyComposite:
    return inst.build(beta)


def build_rds(inst: RobustDominatingInstance, beta=None) -> PenaltyComposite:
    return inst.build(beta)


def build_cc(inst: CliqueCoverInstance, beta=None) -> PenaltyComposite:
    return inst.build(beta)


def build_mst(inst: LayeredTreeInstance, beta=None) -> PenaltyComposite:
    return inst.build(beta)
