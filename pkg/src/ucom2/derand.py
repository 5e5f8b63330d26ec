"""Derandomization engines turning a probability state into a discrete decision.

``greedy_derandomize`` commits the most improving (node, decision) pair per
step using incrementally maintained differences. ``greedy_derandomize_naive``
makes the same choices by full re-evaluation and exists for timing and
equivalence checks. ``iterative_rounding`` and ``sample_derandomize`` are the
classical baselines.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .core import Objective, arity, as_decision, as_state, derandomize_entry, discrete_mask

TIE_RTOL = 1e-12
IMPROVE_RTOL = 1e-11


class DerandError(ArithmeticError):
    """Incremental differences contained NaN or infinity."""


@dataclass
class DerandTrace:
    """Committed steps ``(i, x, delta)``, the objective after each commit,
    the final decision and its exactly recomputed objective."""

    steps: list = field(default_factory=list)
    objective_path: list = field(default_factory=list)
    final: np.ndarray | None = None
    final_value: float = float("nan")
    initial_value: float = float("nan")
    wall_time: float = 0.0
    polish_steps: int = 0


def _check_obj(obj) -> None:
    if not callable(getattr(obj, "ids", None)):
        raise TypeError("objective does not provide incremental differences")


def _pick(D: np.ndarray, rows: np.ndarray, scale: float):
    """Smallest entry of ``D[rows]``; near-ties go to the smallest node, then decision."""
    sub = D[rows]
    if not np.all(np.isfinite(sub)):
        raise DerandError("non-finite incremental difference")
    best = sub.min()
    tol = TIE_RTOL * max(1.0, abs(scale))
    r, x = np.argwhere(sub <= best + tol)[0]
    return int(rows[r]), int(x), float(sub[r, x])


def _finish(trace: DerandTrace, obj: Objective, p, t0: float) -> DerandTrace:
    trace.final = as_decision(p)
    trace.final_value = obj.value(p)
    trace.wall_time = time.perf_counter() - t0
    return trace


def _current_choice(p: np.ndarray) -> np.ndarray:
    return p.astype(int) if p.ndim == 1 else p.argmax(axis=1)


def _improving_flip(D: np.ndarray, p: np.ndarray, value: float):
    cur = _current_choice(p)
    D = D.copy()
    D[np.arange(D.shape[0]), cur] = np.inf
    i, x, d = _pick(np.where(np.isfinite(D), D, np.finfo(float).max), np.arange(D.shape[0]), value)
    if d < -IMPROVE_RTOL * max(1.0, abs(value)):
        return i, x, d
    return None


def _greedy(obj: Objective, p0, ids_fn, polish: bool) -> DerandTrace:
    _check_obj(obj)
    t0 = time.perf_counter()
    p = np.array(p0, dtype=float)
    state = ids_fn(p)
    value = state.value()
    trace = DerandTrace(initial_value=value)
    frac = ~discrete_mask(p)
    while frac.any():
        D = state.ids()
        i, x, d = _pick(D, np.flatnonzero(frac), value)
        state.commit(i, x)
        frac[i] = False
        value += d
        trace.steps.append((i, x, d))
        trace.objective_path.append(value)
    if polish:
        while True:
            move = _improving_flip(state.ids(), state.p, value)
            if move is None:
                break
            i, x, d = move
            state.commit(i, x)
            value += d
            trace.steps.append((i, x, d))
            trace.objective_path.append(value)
            trace.polish_steps += 1
    return _finish(trace, obj, state.p, t0)


def greedy_derandomize(obj: Objective, p0, polish: bool = True) -> DerandTrace:
    """Greedy derandomization with incrementally maintained differences.

    Each step commits the fractional row and decision with the most negative
    incremental difference. Once every row is discrete, ``polish`` keeps
    applying strictly improving single-row flips until none is left, which
    makes the result flip-locally minimal. By entry-wise concavity neither
    phase ever increases the objective.
    """
    return _greedy(obj, p0, obj.tracker, polish)


class _NaiveState:
    """Tracker look-alike that re-evaluates the objective for every candidate."""

    def __init__(self, obj: Objective, p):
        self.obj = obj
        self.p = np.array(p, dtype=float)
        self.frac = ~discrete_mask(self.p)

    def value(self) -> float:
        return self.obj.value(self.p)

    def ids(self) -> np.ndarray:
        base = self.obj.value(self.p)
        c = arity(self.p)
        rows = np.flatnonzero(self.frac) if self.frac.any() else np.arange(self.p.shape[0])
        D = np.full((self.p.shape[0], c), np.inf)
        for i in rows:
            for x in range(c):
                D[i, x] = self.obj.value(derandomize_entry(self.p, i, x)) - base
        return D

    def commit(self, i: int, x: int) -> None:
        self.p = derandomize_entry(self.p, i, x)
        self.frac[i] = False


def greedy_derandomize_naive(obj: Objective, p0, polish: bool = True) -> DerandTrace:
    """Same selection rule as ``greedy_derandomize``; every candidate is
    scored by evaluating the objective at the locally derandomized state."""
    return _greedy(obj, p0, lambda p: _NaiveState(obj, p), polish)


def iterative_rounding(obj: Objective, p0, order=None) -> DerandTrace:
    """Visit nodes once in ``order`` (default ``0..n-1``) and commit the
    decision with the smallest incremental difference; ties go to the
    smallest decision value."""
    _check_obj(obj)
    t0 = time.perf_counter()
    p = np.array(p0, dtype=float)
    n = p.shape[0]
    order = np.arange(n) if order is None else np.asarray(order, dtype=int)
    if sorted(order.tolist()) != list(range(n)):
        raise ValueError("order must be a permutation of the nodes")
    state = obj.tracker(p)
    value = state.value()
    trace = DerandTrace(initial_value=value)
    frac = ~discrete_mask(p)
    for i in order:
        if not frac[i]:
            continue
        D = state.ids()
        _, x, d = _pick(D, np.array([i]), value)
        state.commit(int(i), x)
        value += d
        trace.steps.append((int(i), x, d))
        trace.objective_path.append(value)
    return _finish(trace, obj, state.p, t0)


def sample_derandomize(obj: Objective, p0, num_samples: int, seed=None) -> DerandTrace:
    """Draw decisions from the product distribution and keep the one with the
    lowest discrete objective ``obj.hat``. ``objective_path`` is the
    best-so-far value after each draw."""
    if num_samples < 1:
        raise ValueError("num_samples must be at least 1")
    t0 = time.perf_counter()
    p = np.asarray(p0, dtype=float)
    c = arity(p)
    rng = np.random.default_rng(seed)
    trace = DerandTrace(initial_value=obj.value(p))
    best_val, best = np.inf, None
    for _ in range(num_samples):
        if p.ndim == 1:
            X = (rng.random(p.shape[0]) < p).astype(int)
        else:
            cum = np.cumsum(p, axis=1)
            u = rng.random((p.shape[0], 1))
            X = np.minimum((u >= cum).sum(axis=1), c - 1)
        val = obj.hat(X)
        if val < best_val:
            best_val, best = val, X
        trace.objective_path.append(best_val)
    state = as_state(best, c, p.ndim == 2)
    return _finish(trace, obj, state, t0)
