"""Shared plumbing for problem instances: the discrete report type and the
interface every instance implements."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..core import PenaltyComposite


@dataclass
class Report:
    """Exact evaluation of a discrete decision.

    ``objective`` follows the problem's own convention (covered weight for
    maximum coverage, a cost everywhere else) and is ``inf`` for infeasible
    facility-location decisions. ``violations`` counts each violated
    constraint family.
    """

    objective: float
    feasible: bool
    violations: dict = field(default_factory=dict)
    extras: dict = field(default_factory=dict)


class Problem:
    """Interface of a solvable instance.

    ``arity`` is 2 for binary problems. ``build`` returns the penalized
    expectation objective; ``evaluate`` scores a discrete decision exactly.
    ``maximize`` tells reporting layers which direction is better.
    """

    kind: str = ""
    arity: int = 2
    categorical: bool = False
    maximize: bool = False

    @property
    def n(self) -> int:
        raise NotImplementedError

    def default_beta(self) -> float:
        return 1.0

    def derand_beta(self, beta):
        """Coefficient used while derandomizing. Problems whose flip-local
        minima are only feasible above some threshold raise ``beta`` to it;
        the continuous phase keeps ``beta``."""
        return beta

    def build(self, beta=None) -> PenaltyComposite:
        raise NotImplementedError

    def evaluate(self, X) -> Report:
        raise NotImplementedError

    def init_spec(self) -> tuple[str, float]:
        """Default ``(init, init_value)`` for the continuous optimizer."""
        return ("uniform", 0.0) if self.categorical else ("half", 0.5)

    def check_decision(self, X) -> np.ndarray:
        X = np.asarray(X)
        if X.ndim != 1 or X.shape[0] != self.n:
            raise ValueError(f"decision must have length {self.n}")
        if not np.issubdtype(X.dtype, np.integer):
            if not np.all(X == np.round(X)):
                raise ValueError("decision entries must be integers")
            X = X.astype(np.int64)
        if np.any(X < 0) or np.any(X >= self.arity):
            raise ValueError("decision value out of range")
        return X


def check_k(k: int, n: int) -> int:
    k = int(k)
    if not 1 <= k <= n:
        raise ValueError(f"k must lie in [1, {n}], got {k}")
    return k
