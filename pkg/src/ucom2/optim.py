"""Direct (transductive) continuous optimization of decision probabilities.

Binary states use projected gradient descent on the box ``[eps, 1 - eps]``.
Categorical states are parameterized by row-wise softmax of logits; the
logit gradient is chained from the incremental differences.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import DEFAULT_EPS, Objective, clamp

MAX_HALVINGS = 20


@dataclass
class OptimConfig:
    """Settings for one optimization run.

    ``init`` is ``"half"`` (every entry 0.5), ``"card"`` (every entry
    ``init_value``, typically ``k / n``), ``"random"`` or ``"uniform"``
    (rows ``1 / c`` for categorical states). Restarts after the first add
    seeded noise to that initialization. ``beta`` is not read by the
    optimizer; solve pipelines forward it to the problem builders and echo it.
    """

    learning_rate: float = 0.1
    max_iters: int = 1000
    beta: float | None = None
    init: str = "half"
    init_value: float = 0.5
    restarts: int = 1
    eps: float = DEFAULT_EPS
    seed: int | None = 0
    backtrack: bool = True
    tol: float = 1e-7
    patience: int = 50
    noise: float = 0.1

    def __post_init__(self):
        if not self.learning_rate > 0:
            raise ValueError("learning_rate must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        if self.restarts < 1:
            raise ValueError("restarts must be at least 1")
        if self.init not in ("half", "card", "random", "uniform"):
            raise ValueError(f"unknown init {self.init!r}")
        if not 0.0 < self.eps < 0.5:
            raise ValueError("eps must lie in (0, 0.5)")


@dataclass
class OptimResult:
    best_p: np.ndarray
    loss_path: list = field(default_factory=list)
    restart_losses: list = field(default_factory=list)
    best_restart: int = 0


def grad_from_ids(obj: Objective, p) -> np.ndarray:
    """Gradient of ``obj`` read off its incremental differences.

    Binary: ``D[i, 1] - D[i, 0]``. Categorical: ``D[i, r]``, equal to the
    partial derivative up to a per-row constant that any simplex-preserving
    update ignores.
    """
    D = obj.ids(p)
    if np.ndim(p) == 1:
        return D[:, 1] - D[:, 0]
    return D


def line_search_backtrack(obj: Objective, p, grad, lr0: float, eps: float = DEFAULT_EPS,
                          value: float | None = None):
    """Projected step ``clamp(p - lr * grad)`` with ``lr`` halved until the
    objective strictly decreases. Returns ``(p_new, f_new, lr)``; after
    ``MAX_HALVINGS`` failed halvings the input state is returned with
    ``lr = 0``."""
    p = np.asarray(p, dtype=float)
    f0 = obj.value(p) if value is None else value
    if not np.any(grad):
        return p, f0, 0.0
    lr = lr0
    for _ in range(MAX_HALVINGS + 1):
        cand = clamp(p - lr * grad, eps)
        f = obj.value(cand)
        if f < f0:
            return cand, f, lr
        lr *= 0.5
    return p, f0, 0.0


def _stalled(path: list, tol: float, patience: int) -> bool:
    if len(path) <= patience:
        return False
    old, new = path[-patience - 1], path[-1]
    return old - new <= tol * max(1.0, abs(old))


def _run(obj, x0, to_p, step, cfg: OptimConfig):
    """Shared descent loop; returns ``(p, loss_path)`` or ``None`` on divergence."""
    x = x0
    p = to_p(x)
    f = obj.value(p)
    if not np.isfinite(f):
        return None
    path = [f]
    lr = cfg.learning_rate
    for _ in range(cfg.max_iters):
        x_new, f_new, used = step(x, p, f, min(cfg.learning_rate, 2.0 * lr) if cfg.backtrack else cfg.learning_rate)
        if x_new is None or not np.isfinite(f_new):
            return None
        if cfg.backtrack and used == 0.0:
            break
        lr = used
        x, f = x_new, f_new
        p = to_p(x)
        path.append(f)
        if _stalled(path, cfg.tol, cfg.patience):
            break
    return p, path


def _keep_best(runs, cfg):
    losses = [np.inf if r is None else r[1][-1] for r in runs]
    if all(r is None for r in runs):
        raise FloatingPointError("every restart diverged")
    best = int(np.argmin(losses))
    return OptimResult(runs[best][0], runs[best][1], losses, best)


def optimize_binary(obj: Objective, cfg: OptimConfig, p_init=None) -> OptimResult:
    """Projected gradient descent over ``[eps, 1 - eps]^n``; best restart kept."""
    rng = np.random.default_rng(cfg.seed)
    n = obj.n
    if p_init is not None:
        base = np.asarray(p_init, dtype=float)
    elif cfg.init == "card":
        base = np.full(n, cfg.init_value)
    elif cfg.init == "random":
        base = rng.uniform(0.0, 1.0, n)
    else:
        base = np.full(n, 0.5)

    def step(x, p, f, lr):
        g = grad_from_ids(obj, p)
        if not np.all(np.isfinite(g)):
            return None, np.nan, 0.0
        if cfg.backtrack:
            return line_search_backtrack(obj, p, g, lr, cfg.eps, f)
        new = clamp(p - lr * g, cfg.eps)
        return new, obj.value(new), lr

    runs = []
    for r in range(cfg.restarts):
        start = base if r == 0 else base + cfg.noise * rng.standard_normal(n)
        runs.append(_run(obj, clamp(start, cfg.eps), lambda x: x, step, cfg))
    return _keep_best(runs, cfg)


def softmax_rows(theta: np.ndarray) -> np.ndarray:
    z = theta - theta.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def optimize_nonbinary(obj: Objective, cfg: OptimConfig, theta_init=None) -> OptimResult:
    """Gradient descent on row logits ``theta`` with ``p = clamp(softmax(theta))``.

    The logit gradient is ``p * D`` (row-wise), using that ``D`` already has
    zero ``p``-weighted row mean. The first restart starts from
    ``theta_init`` (default all zeros, i.e. uniform rows); later restarts add
    seeded Gaussian noise to the logits.
    """
    rng = np.random.default_rng(cfg.seed)
    n, c = obj.n, obj.arity
    base = np.zeros((n, c)) if theta_init is None else np.asarray(theta_init, dtype=float)
    if cfg.init == "random":
        base = base + rng.standard_normal((n, c))

    def to_p(theta):
        return clamp(softmax_rows(theta), cfg.eps)

    def step(theta, p, f, lr):
        D = obj.ids(p)
        g = p * (D - np.sum(p * D, axis=1, keepdims=True))
        if not np.all(np.isfinite(g)):
            return None, np.nan, 0.0
        if not np.any(g):
            return theta, f, 0.0 if cfg.backtrack else lr
        for _ in range(MAX_HALVINGS + 1 if cfg.backtrack else 1):
            cand = theta - lr * g
            fc = obj.value(to_p(cand))
            if not cfg.backtrack or fc < f:
                return cand, fc, lr
            lr *= 0.5
        return theta, f, 0.0

    runs = []
    for r in range(cfg.restarts):
        start = base if r == 0 else base + cfg.noise * rng.standard_normal((n, c))
        runs.append(_run(obj, start, to_p, step, cfg))
    return _keep_best(runs, cfg)
