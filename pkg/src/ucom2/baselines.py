"""Classical baselines: greedy facility location, greedy maximum coverage,
randomized greedy robust coloring and uniform random selection."""
from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .problems import CoverageInstance, FacilityInstance, Problem, RobustColoringInstance


@dataclass
class BaselineResult:
    decision: np.ndarray
    objective: float
    wall_time: float
    seed: int | None = None
    runs: int = 1


def greedy_fl(inst: FacilityInstance) -> BaselineResult:
    """Add the location with the largest drop in summed distance, ``k`` times."""
    t0 = time.perf_counter()
    W = inst.W
    cur = np.full(inst.n, np.inf)
    X = np.zeros(inst.n, dtype=np.int64)
    for _ in range(inst.k):
        totals = np.minimum(cur[:, None], W).sum(axis=0)
        totals[X == 1] = np.inf
        u = int(np.argmin(totals))
        X[u] = 1
        cur = np.minimum(cur, W[:, u])
    return BaselineResult(X, inst.evaluate(X).objective, time.perf_counter() - t0)


def greedy_mc(inst: CoverageInstance) -> BaselineResult:
    """``k`` rounds of picking the set with the most uncovered weight."""
    t0 = time.perf_counter()
    covered = np.zeros(inst.m, dtype=bool)
    X = np.zeros(inst.n, dtype=np.int64)
    for _ in range(inst.k):
        gains = np.array([inst.weights[s[~covered[s]]].sum() if not X[i] else -1.0
                          for i, s in enumerate(inst.sets)])
        i = int(np.argmax(gains))
        X[i] = 1
        covered[inst.sets[i]] = True
    return BaselineResult(X, inst.evaluate(X).objective, time.perf_counter() - t0)


def _incidence(n: int, edges: np.ndarray, weights: np.ndarray):
    adj = [[] for _ in range(n)]
    for (u, v), w in zip(edges, weights):
        adj[u].append((int(v), float(w)))
        adj[v].append((int(u), float(w)))
    return adj


def greedy_rd_coloring(inst: RobustColoringInstance, time_budget: float = 1.0, seed=None,
                       max_runs: int | None = None) -> BaselineResult:
    """Repeated randomized greedy coloring.

    Each run visits the nodes in a random order and gives each node the color
    with the fewest hard conflicts against already colored neighbors, then
    the smallest soft penalty, then the smallest index. Runs continue until
    ``time_budget`` seconds (or ``max_runs`` runs) are spent; the best run by
    (hard violations, soft penalty) is returned. At least one run is made.
    """
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    n, c = inst.n, inst.c
    ue = inst.edges
    hard = _incidence(n, ue.hard, np.ones(len(ue.hard)))
    soft = _incidence(n, ue.soft, ue.soft_penalties)
    best, best_key, runs = None, None, 0
    while True:
        X = np.full(n, -1, dtype=np.int64)
        for i in rng.permutation(n):
            h = np.zeros(c)
            s = np.zeros(c)
            for j, _ in hard[i]:
                if X[j] >= 0:
                    h[X[j]] += 1
            for j, w in soft[i]:
                if X[j] >= 0:
                    s[X[j]] += w
            cand = np.flatnonzero(h == h.min())
            X[i] = cand[np.argmin(s[cand])]
        rep = inst.evaluate(X)
        key = (rep.violations["hard"], rep.objective)
        if best_key is None or key < best_key:
            best, best_key = X, key
        runs += 1
        if max_runs is not None and runs >= max_runs:
            break
        if time.perf_counter() - t0 >= time_budget:
            break
    return BaselineResult(best, best_key[1], time.perf_counter() - t0, seed, runs)


def _draw(problem: Problem, rng) -> np.ndarray:
    n = problem.n
    k = getattr(problem, "k", None)
    if not problem.categorical and k is not None:
        X = np.zeros(n, dtype=np.int64)
        X[rng.choice(n, size=k, replace=False)] = 1
        return X
    return rng.integers(0, problem.arity, size=n)


def random_select(problem: Problem, time_budget: float = 1.0, seed=None,
                  max_draws: int | None = None) -> BaselineResult:
    """Best of uniform random draws (size-``k`` subsets when the problem has
    a cardinality target, uniform labels otherwise)."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    sign = -1.0 if problem.maximize else 1.0
    best, best_key, draws = None, None, 0
    while True:
        X = _draw(problem, rng)
        rep = problem.evaluate(X)
        key = (not rep.feasible, sign * rep.objective)
        if best_key is None or key < best_key:
            best, best_key = X, key
        draws += 1
        if max_draws is not None and draws >= max_draws:
            break
        if time.perf_counter() - t0 >= time_budget:
            break
    return BaselineResult(best, problem.evaluate(best).objective, time.perf_counter() - t0, seed, draws)
