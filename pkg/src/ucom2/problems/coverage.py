"""Maximum coverage: choose k sets maximizing the total weight of covered items."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..conditions import Cover
from ..core import PenaltyComposite
from ..poibin import Cardinality, CardinalitySet
from .base import Problem, Report, check_k

DEFAULT_BETA = 500.0


@dataclass(eq=False)
class CoverageInstance(Problem):
    """Item weights, the sets (lists of item indices) and ``k``."""

    weights: np.ndarray
    sets: list
    k: int
    kind = "mc"
    maximize = True

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=float)
        if np.any(self.weights <= 0):
            raise ValueError("item weights must be positive")
        m = self.weights.shape[0]
        self.sets = [np.unique(np.asarray(s, dtype=np.int64)) for s in self.sets]
        for s in self.sets:
            if s.size == 0:
                raise ValueError("empty set encountered")
            if s.min() < 0 or s.max() >= m:
                raise ValueError("item index out of range")
        self.k = check_k(self.k, len(self.sets))

    @property
    def n(self) -> int:
        return len(self.sets)

    @property
    def m(self) -> int:
        return self.weights.shape[0]

    def item_members(self) -> list:
        """For each item, the sets containing it (the bipartite adjacency)."""
        members = [[] for _ in range(self.m)]
        for i, s in enumerate(self.sets):
            for j in s:
                members[j].append(i)
        return members

    def default_beta(self) -> float:
        return DEFAULT_BETA

    def safe_beta(self) -> float:
        """A coefficient above the weight any single set can add: no
        flip-local minimum of the penalized objective then misses ``k``."""
        return 1.0 + max(float(self.weights[s].sum()) for s in self.sets)

    def derand_beta(self, beta):
        return max(beta, self.safe_beta())

    def init_spec(self):
        return ("card", self.k / self.n)

    def build(self, beta=None) -> PenaltyComposite:
        beta = self.default_beta() if beta is None else beta
        cover = Cover(self.n, self.item_members(), self.weights)
        card = Cardinality(CardinalitySet.exactly(self.n, self.k))
        return PenaltyComposite([(cover, 1.0), (card, beta)], ["uncovered", "cardinality"])

    def covered_weight(self, X) -> float:
        chosen = [self.sets[i] for i in np.flatnonzero(X)]
        if not chosen:
            return 0.0
        return float(self.weights[np.unique(np.concatenate(chosen))].sum())

    def evaluate(self, X) -> Report:
        X = self.check_decision(X)
        size = int(X.sum())
        covered = self.covered_weight(X)
        return Report(covered, size == self.k, {"cardinality": abs(size - self.k)},
                      {"size": size, "uncovered": float(self.weights.sum()) - covered})


def build_mc(inst: CoverageInstance, beta=None) -> PenaltyComposite:
    return inst.build(beta)
