"""Facility location: choose k locations minimizing the summed distance from
every node to its closest chosen location."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import cdist

from ..conditions import MinSubset
from ..core import PenaltyComposite
from ..poibin import Cardinality, CardinalitySet
from .base import Problem, Report, check_k

BETA_SCALE = 0.1


@dataclass(eq=False)
class FacilityInstance(Problem):
    """Distance matrix ``W`` (``W[v, u]`` = cost of serving ``v`` from ``u``)
    and the number of locations ``k``; ``points`` is kept when the matrix was
    derived from coordinates."""

    W: np.ndarray
    k: int
    points: np.ndarray | None = field(default=None, repr=False)
    kind = "fl"

    def __post_init__(self):
        self.W = np.asarray(self.W, dtype=float)
        if self.W.ndim != 2 or self.W.shape[0] != self.W.shape[1]:
            raise ValueError("W must be square")
        if np.any(self.W < 0) or np.any(np.diag(self.W) != 0):
            raise ValueError("W must be non-negative with a zero diagonal")
        if not np.allclose(self.W, self.W.T, rtol=0, atol=1e-12):
            raise ValueError("W must be symmetric")
        self.k = check_k(self.k, self.W.shape[0])

    @classmethod
    def from_points(cls, points, k: int) -> "FacilityInstance":
        """Squared Euclidean distances between the given coordinates."""
        pts = np.asarray(points, dtype=float)
        if pts.ndim != 2:
            raise ValueError("points must be an (n, dim) array")
        W = cdist(pts, pts, "sqeuclidean")
        np.fill_diagonal(W, 0.0)
        return cls(W, k, pts)

    @property
    def n(self) -> int:
        return self.W.shape[0]

    def default_beta(self) -> float:
        p = np.full(self.n, self.k / self.n)
        return BETA_SCALE * MinSubset(self.W).value(p) if self.n > 1 else 1.0

    def safe_beta(self) -> float:
        """Above the largest cost change one flip can cause.

        Dropping a location moves each target at most to its farthest node
        and opening the first one costs one column sum; both are bounded by
        the summed row maxima, so every flip-local minimum has exactly ``k``
        locations.
        """
        return 1.0 + float(self.W.max(axis=1).sum())

    def derand_beta(self, beta):
        return max(beta, self.safe_beta())

    def init_spec(self):
        return ("card", self.k / self.n)

    def build(self, beta=None) -> PenaltyComposite:
        beta = self.default_beta() if beta is None else beta
        card = Cardinality(CardinalitySet.exactly(self.n, self.k))
        return PenaltyComposite([(MinSubset(self.W), 1.0), (card, beta)], ["distance", "cardinality"])

    def cost(self, X) -> float:
        sel = np.flatnonzero(X)
        return float(self.W[:, sel].min(axis=1).sum()) if sel.size else np.inf

    def evaluate(self, X) -> Report:
        X = self.check_decision(X)
        size = int(X.sum())
        feasible = size == self.k
        cost = self.cost(X)
        return Report(cost if feasible else np.inf, feasible,
                      {"cardinality": abs(size - self.k)}, {"size": size, "distance": cost})


def build_fl(inst: FacilityInstance, beta=None) -> PenaltyComposite:
    return inst.build(beta)
