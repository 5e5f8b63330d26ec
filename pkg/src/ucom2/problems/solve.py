"""End-to-end pipeline: build the objective, optimize probabilities, then
derandomize, timing the two phases separately."""
from __future__ import annotations

import time
from dataclasses import dataclass, replace

import numpy as np

from ..core import clamp
from ..derand import (
    DerandTrace,
    greedy_derandomize,
    greedy_derandomize_naive,
    iterative_rounding,
    sample_derandomize,
)
from ..optim import OptimConfig, OptimResult, optimize_binary, optimize_nonbinary
from .base import Problem, Report

DERAND_METHODS = ("greedy", "greedy-naive", "iterative", "sample")


@dataclass
class SolveResult:
    decision: np.ndarray
    report: Report
    beta: float | tuple
    derand_beta: float | tuple
    optim: OptimResult
    trace: DerandTrace
    optimize_time: float
    derandomize_time: float

    @property
    def wall_time(self) -> float:
        return self.optimize_time + self.derandomize_time


def derandomize(obj, p, method: str = "greedy", seed=None, samples: int = 100, polish: bool = True):
    if method == "greedy":
        return greedy_derandomize(obj, p, polish=polish)
    if method == "greedy-naive":
        return greedy_derandomize_naive(obj, p, polish=polish)
    if method == "iterative":
        order = None if seed is None else np.random.default_rng(seed).permutation(p.shape[0])
        return iterative_rounding(obj, p, order)
    if method == "sample":
        return sample_derandomize(obj, p, samples, seed)
    raise ValueError(f"unknown derandomization method {method!r}")


def default_config(problem: Problem, **overrides) -> OptimConfig:
    """Per-problem optimizer defaults; keyword arguments override fields."""
    init, value = problem.init_spec()
    base = dict(init=init, init_value=value)
    if problem.kind == "fl":
        base.update(learning_rate=0.1, max_iters=300, restarts=5)
    elif problem.kind == "mc":
        base.update(learning_rate=1e-5, max_iters=300, restarts=1)
    elif problem.kind == "rc":
        base.update(learning_rate=0.1, max_iters=300, restarts=5)
    base.update(overrides)
    return OptimConfig(**base)


def solve(problem: Problem, cfg: OptimConfig | None = None, beta=None, derand: str = "greedy",
          seed=None, samples: int = 100, polish: bool = True) -> SolveResult:
    """Optimize the penalized expectation and derandomize the best restart."""
    cfg = default_config(problem) if cfg is None else cfg
    beta = problem.default_beta() if beta is None else beta
    obj = problem.build(beta)
    t0 = time.perf_counter()
    if problem.categorical:
        res = optimize_nonbinary(obj, cfg)
    else:
        res = optimize_binary(obj, cfg)
    t1 = time.perf_counter()
    dbeta = problem.derand_beta(beta)
    dobj = obj if dbeta == beta else problem.build(dbeta)
    trace = derandomize(dobj, clamp(res.best_p, cfg.eps), derand, seed, samples, polish)
    t2 = time.perf_counter()
    return SolveResult(trace.final, problem.evaluate(trace.final), beta, dbeta, res, trace,
                       t1 - t0, t2 - t1)


def with_config(cfg: OptimConfig, **changes) -> OptimConfig:
    return replace(cfg, **changes)
