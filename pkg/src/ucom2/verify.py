"""Self-check suites: brute-force oracle agreement, ID exactness,
multilinearity and the greedy derandomization guarantees (G1 to G3)."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    ORACLE_LIMIT,
    Objective,
    as_state,
    clamp,
    derandomize_entry,
    discrete_mask,
    oracle_expectation,
    recompute_ids,
)
from .derand import greedy_derandomize

TOL = 1e-9
ORACLE_MAX_OUTCOMES = 4096


@dataclass
class SuiteResult:
    name: str
    passed: bool
    worst: float = 0.0
    skipped: bool = False
    detail: str = ""


def random_state(obj: Objective, rng) -> np.ndarray:
    """A clamped random state in the decision space of ``obj``."""
    if not obj.categorical:
        return clamp(rng.uniform(0.0, 1.0, obj.n))
    return clamp(rng.dirichlet(np.ones(obj.arity), size=obj.n))


def _scale(f: float) -> float:
    return TOL * max(1.0, abs(f))


def check_oracle(obj: Objective, rng, trials: int = 3) -> SuiteResult:
    if obj.arity ** obj.n > min(ORACLE_LIMIT, ORACLE_MAX_OUTCOMES):
        return SuiteResult("oracle", True, skipped=True,
                           detail=f"{obj.arity}^{obj.n} outcomes: too many to enumerate")
    worst, ok = 0.0, True
    for _ in range(trials):
        p = random_state(obj, rng)
        f = obj.value(p)
        err = abs(f - oracle_expectation(obj.hat, p))
        worst = max(worst, err)
        ok &= err <= _scale(f)
    return SuiteResult("oracle", ok, worst)


def check_ids(obj: Objective, rng, trials: int = 2) -> SuiteResult:
    worst, ok = 0.0, True
    for _ in range(trials):
        p = random_state(obj, rng)
        ref = recompute_ids(obj, p)
        f = obj.value(p)
        for got in (obj.ids(p), obj.tracker(p).ids()):
            err = float(np.abs(got - ref).max())
            worst = max(worst, err)
            ok &= err <= _scale(f)
    return SuiteResult("ids", ok, worst)


def check_multilinear(obj: Objective, rng, trials: int = 2) -> SuiteResult:
    worst, ok = 0.0, True
    for _ in range(trials):
        p = random_state(obj, rng)
        f = obj.value(p)
        for i in range(obj.n):
            row = np.array([1.0 - p[i], p[i]]) if p.ndim == 1 else p[i]
            mix = sum(row[x] * obj.value(derandomize_entry(p, i, x)) for x in range(obj.arity))
            err = abs(mix - f)
            worst = max(worst, err)
            ok &= err <= _scale(f)
    return SuiteResult("multilinearity", ok, worst)


def greedy_guarantees(obj: Objective, p0) -> tuple[bool, bool, bool, float]:
    """Run greedy derandomization and test G1 (discrete), G2 (no increase)
    and G3 (no improving single-row flip). Returns the flags and the worst
    G3 improvement found."""
    trace = greedy_derandomize(obj, p0)
    state = as_state(trace.final, obj.arity, obj.categorical)
    g1 = bool(discrete_mask(state).all())
    f0, f = obj.value(p0), obj.value(state)
    g2 = f <= f0 + _scale(f0)
    best = min(obj.value(derandomize_entry(state, i, x))
               for i in range(obj.n) for x in range(obj.arity))
    g3 = best >= f - _scale(f)
    return g1, g2, g3, max(0.0, f - best)


def check_derand(obj: Objective, rng, trials: int = 3) -> SuiteResult:
    worst, ok = 0.0, True
    for _ in range(trials):
        g1, g2, g3, gap = greedy_guarantees(obj, random_state(obj, rng))
        worst = max(worst, gap)
        ok &= g1 and g2 and g3
    return SuiteResult("derandomization", ok, worst)


SUITES = (check_oracle, check_ids, check_multilinear, check_derand)


def run_suites(obj: Objective, seed: int = 0) -> list[SuiteResult]:
    rng = np.random.default_rng(seed)
    return [suite(obj, rng) for suite in SUITES]


def bundled_toys():
    """Small deterministic instances of every problem kind."""
    from .data_io import gen_fl_random, gen_mc_random, gen_rc_random
    from .problems import (
        CliqueCoverInstance,
        LayeredTreeInstance,
        RobustCliqueInstance,
        RobustDominatingInstance,
    )

    rng = np.random.default_rng(7)
    ue = gen_rc_random(7, 0.6, 0.3, seed=3, c=3).edges
    yield "fl", gen_fl_random(7, seed=1, k=2)
    yield "mc", gen_mc_random(7, 9, seed=2, k=2, size_range=(2, 4))
    yield "rc", gen_rc_random(6, 0.6, 0.3, seed=3, c=3)
    yield "rkc", RobustCliqueInstance(ue, 3)
    yield "rds", RobustDominatingInstance(ue, 2)
    yield "cc", CliqueCoverInstance(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (2, 3)], 2)
    yield "mst", LayeredTreeInstance(5, [(0, 1), (1, 2), (2, 3), (3, 4), (0, 4), (1, 3)],
                                     rng.uniform(1, 5, 6), 3)
