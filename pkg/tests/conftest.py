"""Random instance factories shared by the test modules."""
from __future__ import annotations

import numpy as np
import pytest

from ucom2.conditions import Colorwise, Cover, MinSubset, Pairwise, UncertainEdgeList, non_edges
from ucom2.core import clamp
from ucom2.data_io import gen_fl_random, gen_mc_random
from ucom2.poibin import Cardinality, CardinalitySet
from ucom2.problems import (
    CliqueCoverInstance,
    LayeredTreeInstance,
    RobustCliqueInstance,
    RobustColoringInstance,
    RobustDominatingInstance,
)

BINARY_CONDITIONS = ("card", "ms", "cv", "cq")
CATEGORICAL_CONDITIONS = ("g1", "f2")
BINARY_PROBLEMS = ("fl", "mc", "rkc", "rds")
CATEGORICAL_PROBLEMS = ("rc", "cc", "mst")


def random_edges(n, rng, density=0.4):
    iu, ju = np.triu_indices(n, k=1)
    keep = rng.random(iu.size) < density
    return np.stack([iu[keep], ju[keep]], axis=1)


def uncertain_edges(n, rng, density=0.5, hard_frac=0.3):
    e = random_edges(n, rng, density)
    probs = rng.uniform(0.05, 0.95, len(e))
    probs[rng.random(len(e)) < hard_frac] = 1.0
    return UncertainEdgeList.of(n, e, probs)


def random_state(n, rng, c=None):
    """Clamped binary vector (``c`` is None) or clamped categorical matrix."""
    if c is None:
        return clamp(rng.uniform(0.0, 1.0, n))
    return clamp(rng.dirichlet(np.ones(c), size=n))


def make_condition(name, n, rng, c=3):
    if name == "card":
        feas = rng.choice(n + 1, size=rng.integers(1, 3), replace=False)
        return Cardinality(CardinalitySet.of(n, feas))
    if name == "ms":
        d = rng.uniform(0, 1, (n, n))
        W = d + d.T
        np.fill_diagonal(W, 0.0)
        return MinSubset(W)
    if name == "cv":
        m = n + 2
        members = [rng.choice(n, size=rng.integers(0, min(n, 4) + 1), replace=False) for _ in range(m)]
        return Cover(n, members, rng.uniform(0.5, 3.0, m))
    if name == "cq":
        return Pairwise(n, non_edges(n, random_edges(n, rng)))
    ue = uncertain_edges(n, rng)
    if name == "g1":
        return Colorwise(n, c, ue.hard)
    if name == "f2":
        return Colorwise(n, c, ue.soft, ue.soft_penalties)
    raise KeyError(name)


def make_problem(kind, n, rng, c=3):
    seed = int(rng.integers(1 << 30))
    if kind == "fl":
        return gen_fl_random(n, seed=seed, k=max(1, n // 5))
    if kind == "mc":
        return gen_mc_random(n, n + 5, seed=seed, k=max(1, n // 5), size_range=(1, 4))
    if kind == "rc":
        return RobustColoringInstance(uncertain_edges(n, rng), c)
    if kind == "rkc":
        return RobustCliqueInstance(uncertain_edges(n, rng, density=0.6), max(2, n // 4))
    if kind == "rds":
        return RobustDominatingInstance(uncertain_edges(n, rng), max(1, n // 4))
    if kind == "cc":
        return CliqueCoverInstance(n, random_edges(n, rng, 0.5), c)
    if kind == "mst":
        e = random_edges(n, rng, 0.6)
        return LayeredTreeInstance(n, e, rng.uniform(1, 5, len(e)), min(c, n))
    raise KeyError(kind)


def problem_beta(problem, rng):
    """A random positive coefficient in the shape ``problem.build`` accepts."""
    if problem.kind in ("rkc", "mst"):
        return tuple(rng.uniform(0.2, 3.0, 2))
    return float(rng.uniform(0.2, 3.0))


def arity_of(obj):
    return obj.arity if obj.categorical else None


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# one line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE: dict[int, tuple[bool, str, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE):
        ok, title, detail = ACCEPTANCE[num]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  C{num:<2} {title}: {detail}")
