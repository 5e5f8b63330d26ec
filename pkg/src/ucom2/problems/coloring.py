"""Robust coloring: color an uncertain graph with c colors so that no hard
edge is monochromatic and the probability of a monochromatic soft edge
existing is as small as possible."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..conditions import Colorwise, UncertainEdgeList
from ..core import PenaltyComposite
from .base import Problem, Report


@dataclass(eq=False)
class RobustColoringInstance(Problem):
    edges: UncertainEdgeList
    c: int
    kind = "rc"
    categorical = True

    def __post_init__(self):
        if self.c < 2:
            raise ValueError("need at least two colors")
        self.arity = int(self.c)

    @classmethod
    def of(cls, n: int, edges, probs, c: int) -> "RobustColoringInstance":
        return cls(UncertainEdgeList.of(n, edges, probs), c)

    @property
    def n(self) -> int:
        return self.edges.n

    def default_beta(self) -> float:
        pen = self.edges.soft_penalties
        return float(pen.max()) if pen.size else 1.0

    def soft_degree(self) -> np.ndarray:
        """Total soft penalty incident to each node."""
        ue = self.edges
        deg = np.zeros(self.n)
        np.add.at(deg, ue.soft[:, 0], ue.soft_penalties)
        np.add.at(deg, ue.soft[:, 1], ue.soft_penalties)
        return deg

    def derand_beta(self, beta):
        # Above the largest incident soft penalty, any recoloring that lowers
        # a node's hard-conflict count is an improving flip.
        bound = float(self.soft_degree().max()) if self.n else 0.0
        return max(beta, bound * (1.0 + 1e-6) + 1e-6)

    def terms(self):
        ue = self.edges
        return (Colorwise(ue.n, self.c, ue.hard),
                Colorwise(ue.n, self.c, ue.soft, ue.soft_penalties))

    def build(self, beta=None) -> PenaltyComposite:
        beta = self.default_beta() if beta is None else beta
        hard, soft = self.terms()
        return PenaltyComposite([(soft, 1.0), (hard, beta)], ["soft", "hard"])

    def evaluate(self, X) -> Report:
        X = self.check_decision(X)
        ue = self.edges
        hard = ue.hard
        violated = int(np.sum(X[hard[:, 0]] == X[hard[:, 1]]))
        soft = ue.soft
        same = X[soft[:, 0]] == X[soft[:, 1]]
        penalty = float(ue.soft_penalties[same].sum())
        return Report(penalty, violated == 0, {"hard": violated},
                      {"soft_conflicts": int(same.sum()),
                       "no_conflict_probability": float(np.prod(1.0 - ue.soft_probs[same]))})


def build_rc(inst: RobustColoringInstance, beta=None) -> PenaltyComposite:
    return inst.build(beta)
