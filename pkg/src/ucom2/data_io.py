"""Instance generators and the line-oriented instance / result file formats.

Every instance file starts with ``#UCOM2 <kind> <version>`` optionally
followed by ``key=value`` tokens (seed, generator tag, ...). Bodies:

* ``fl``: ``n k`` then ``n`` lines ``x y`` (or, with ``mode=matrix``, ``n``
  rows of the distance matrix)
* ``mc``: ``n m k``, then ``m`` weight lines, then ``n`` lines of item indices
* ``rc``: ``n m c`` then ``m`` lines ``u v P``
* ``rkc`` / ``rds``: ``n m k`` then ``m`` lines ``u v P``
* ``cc``: ``n m c`` then ``m`` lines ``u v``
* ``mst``: ``n m c`` then ``m`` lines ``u v w``

Floats are written with ``repr`` so a write/read cycle is exact. Result files
are flat ``key=value`` lines.
"""
from __future__ import annotations

import csv
import os
from pathlib import Path

import numpy as np

from .conditions import UncertainEdgeList
from .problems import (
    CliqueCoverInstance,
    CoverageInstance,
    FacilityInstance,
    LayeredTreeInstance,
    Problem,
    RobustCliqueInstance,
    RobustColoringInstance,
    RobustDominatingInstance,
)

FORMAT_VERSION = 1
MAGIC = "#UCOM2"


class FormatError(ValueError):
    """Malformed instance or result file."""


# ---------------------------------------------------------------- generators


def gen_fl_random(n: int, seed=None, k: int = 1) -> FacilityInstance:
    """``n`` points uniform in the unit square, squared Euclidean distances."""
    rng = np.random.default_rng(seed)
    return FacilityInstance.from_points(rng.random((n, 2)), k)


def gen_mc_random(n: int, m: int, seed=None, k: int = 1, size_range=(10, 30),
                  weight_range=(1, 100)) -> CoverageInstance:
    """``n`` sets over ``m`` items; set sizes and integer item weights are
    uniform over the inclusive ranges (sizes are capped at ``m``)."""
    rng = np.random.default_rng(seed)
    lo, hi = size_range
    weights = rng.integers(weight_range[0], weight_range[1] + 1, size=m).astype(float)
    sets = []
    for _ in range(n):
        size = min(int(rng.integers(lo, hi + 1)), m)
        sets.append(np.sort(rng.choice(m, size=size, replace=False)))
    return CoverageInstance(weights, sets, k)


def is_colorable(n: int, edges, c: int, node_limit: int = 1_000_000) -> bool:
    """Exact c-colorability by DSATUR-ordered backtracking.

    Raises ``RuntimeError`` if the search exceeds ``node_limit`` nodes.
    """
    adj = [set() for _ in range(n)]
    for u, v in np.asarray(edges, dtype=np.int64).reshape(-1, 2):
        adj[u].add(int(v))
        adj[v].add(int(u))
    color = [-1] * n
    budget = [node_limit]

    def pick():
        best, key = -1, None
        for v in range(n):
            if color[v] < 0:
                sat = len({color[u] for u in adj[v] if color[u] >= 0})
                k = (sat, len(adj[v]))
                if key is None or k > key:
                    best, key = v, k
        return best

    def rec(done):
        if done == n:
            return True
        budget[0] -= 1
        if budget[0] < 0:
            raise RuntimeError("colorability search exceeded its node limit")
        v = pick()
        used = {color[u] for u in adj[v]}
        top = max(color) + 1
        for r in range(min(c, top + 1)):
            if r not in used:
                color[v] = r
                if rec(done + 1):
                    return True
        color[v] = -1
        return False

    return rec(0)


def gen_rc_random(n: int, edge_prob: float, hard_frac: float, seed=None, c: int = 4,
                  require_colorable: bool = False, max_tries: int = 100) -> RobustColoringInstance:
    """Random graph with uniform edge weights in (0, 1); the ``hard_frac``
    heaviest edges become hard (``P = 1``), the rest are soft with ``P`` equal
    to their weight. With ``require_colorable`` the draw is repeated until the
    hard subgraph is ``c``-colorable."""
    if not 0.0 <= hard_frac <= 1.0:
        raise ValueError("hard_frac must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    iu, ju = np.triu_indices(n, k=1)
    for _ in range(max_tries):
        keep = rng.random(iu.shape[0]) < edge_prob
        edges = np.stack([iu[keep], ju[keep]], axis=1)
        w = 1.0 - rng.random(edges.shape[0])  # in (0, 1]
        probs = w.copy()
        n_hard = int(round(hard_frac * edges.shape[0]))
        if n_hard:
            probs[np.argsort(-w, kind="stable")[:n_hard]] = 1.0
        soft = probs < 1.0
        probs[soft] = np.minimum(probs[soft], np.nextafter(1.0, 0.0))
        inst = RobustColoringInstance.of(n, edges, probs, c)
        if not require_colorable or is_colorable(n, inst.edges.hard, c):
            return inst
    raise RuntimeError("no colorable hard subgraph found")


# ---------------------------------------------------------------- instance files


def _fmt(x) -> str:
    return repr(float(x))


def _header(kind: str, meta: dict) -> str:
    toks = [MAGIC, kind, str(FORMAT_VERSION)] + [f"{k}={v}" for k, v in meta.items()]
    return " ".join(toks)


def dumps_instance(inst: Problem, **meta) -> str:
    kind = inst.kind
    lines = []
    if kind == "fl":
        if inst.points is not None and "mode" not in meta:
            lines.append(f"{inst.n} {inst.k}")
            lines += [" ".join(_fmt(x) for x in row) for row in inst.points]
        else:
            meta["mode"] = "matrix"
            lines.append(f"{inst.n} {inst.k}")
            lines += [" ".join(_fmt(x) for x in row) for row in inst.W]
    elif kind == "mc":
        lines.append(f"{inst.n} {inst.m} {inst.k}")
        lines += [_fmt(w) for w in inst.weights]
        lines += [" ".join(str(int(j)) for j in s) for s in inst.sets]
    elif kind in ("rc", "rkc", "rds"):
        ue = inst.edges
        third = inst.c if kind == "rc" else inst.k
        lines.append(f"{ue.n} {ue.edges.shape[0]} {third}")
        lines += [f"{u} {v} {_fmt(P)}" for (u, v), P in zip(ue.edges, ue.probs)]
    elif kind == "cc":
        lines.append(f"{inst.n} {inst.edges.shape[0]} {inst.c}")
        lines += [f"{u} {v}" for u, v in inst.edges]
    elif kind == "mst":
        lines.append(f"{inst.n} {inst.edges.shape[0]} {inst.c}")
        lines += [f"{u} {v} {_fmt(w)}" for (u, v), w in zip(inst.edges, inst.weights)]
    else:
        raise ValueError(f"unknown instance kind {kind!r}")
    return "\n".join([_header(kind, meta)] + lines) + "\n"


def save_instance(path, inst: Problem, **meta) -> None:
    Path(path).write_text(dumps_instance(inst, **meta))


def parse_header(line: str) -> tuple[str, int, dict]:
    toks = line.split()
    if len(toks) < 3 or toks[0] != MAGIC:
        raise FormatError("missing '#UCOM2 <kind> <version>' header")
    try:
        version = int(toks[2])
    except ValueError as exc:
        raise FormatError("bad format version") from exc
    meta = {}
    for t in toks[3:]:
        if "=" not in t:
            raise FormatError(f"bad header token {t!r}")
        k, v = t.split("=", 1)
        meta[k] = v
    return toks[1], version, meta


def loads_instance(text: str) -> tuple[Problem, dict]:
    """Parse an instance; returns ``(instance, header metadata)``."""
    rows = [ln for ln in text.splitlines() if ln.strip()]
    if not rows:
        raise FormatError("empty instance file")
    kind, version, meta = parse_header(rows[0])
    if version != FORMAT_VERSION:
        raise FormatError(f"unsupported format version {version}")
    body = [ln.split() for ln in rows[1:]]
    try:
        return _build(kind, body, meta), meta
    except (IndexError, ValueError) as exc:
        if isinstance(exc, FormatError):
            raise
        raise FormatError(f"malformed {kind} body: {exc}") from exc


def _ints(tok, count):
    if len(tok) != count:
        raise FormatError(f"expected {count} integers, got {len(tok)}")
    return [int(t) for t in tok]


def _build(kind: str, body, meta) -> Problem:
    if kind == "fl":
        n, k = _ints(body[0], 2)
        arr = np.array([[float(x) for x in r] for r in body[1 : 1 + n]])
        if arr.shape[0] != n:
            raise FormatError("wrong number of rows")
        if meta.get("mode") == "matrix":
            return FacilityInstance(arr, k)
        return FacilityInstance.from_points(arr, k)
    if kind == "mc":
        n, m, k = _ints(body[0], 3)
        weights = [float(r[0]) for r in body[1 : 1 + m]]
        sets = [[int(x) for x in r] for r in body[1 + m : 1 + m + n]]
        if len(weights) != m or len(sets) != n:
            raise FormatError("wrong number of rows")
        return CoverageInstance(np.array(weights), sets, k)
    n, m, third = _ints(body[0], 3)
    rows = body[1 : 1 + m]
    if len(rows) != m:
        raise FormatError("wrong number of edge rows")
    edges = np.array([[int(r[0]), int(r[1])] for r in rows], dtype=np.int64).reshape(-1, 2)
    if kind == "cc":
        return CliqueCoverInstance(n, edges, third)
    vals = np.array([float(r[2]) for r in rows])
    if kind == "mst":
        return LayeredTreeInstance(n, edges, vals, third)
    ue = UncertainEdgeList.of(n, edges, vals)
    if kind == "rc":
        return RobustColoringInstance(ue, third)
    if kind == "rkc":
        return RobustCliqueInstance(ue, third)
    if kind == "rds":
        return RobustDominatingInstance(ue, third)
    raise FormatError(f"unknown instance kind {kind!r}")


def load_instance(path) -> tuple[Problem, dict]:
    return loads_instance(Path(path).read_text())


# ---------------------------------------------------------------- result files


def _val(v) -> str:
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (list, tuple, np.ndarray)):
        return ",".join(_val(x) for x in v)
    return str(v)


def save_result(path, problem: Problem, decision, **fields) -> dict:
    """Write one solve as ``key=value`` lines.

    ``objective`` and ``feasible`` are recomputed from the decision here, and
    ``checksum`` repeats the objective so a reader can detect edits to it.
    Returns the record as written (all values as strings).
    """
    rep = problem.evaluate(decision)
    record = {"kind": problem.kind, **{k: _val(v) for k, v in fields.items()}}
    record["objective"] = _val(float(rep.objective))
    record["checksum"] = _val(float(rep.objective))
    record["feasible"] = str(rep.feasible)
    for name, count in rep.violations.items():
        record[f"violations.{name}"] = str(count)
    record["decision"] = ",".join(str(int(x)) for x in decision)
    text = "".join(f"{k}={v}\n" for k, v in record.items())
    if path is None or str(path) == "-":
        print(text, end="")
    else:
        Path(path).write_text(text)
    return record


def loads_result(text: str) -> dict:
    out = {}
    for ln in text.splitlines():
        if not ln.strip():
            continue
        if "=" not in ln:
            raise FormatError(f"bad result line {ln!r}")
        k, v = ln.split("=", 1)
        out[k] = v
    return out


def load_result(path) -> dict:
    return loads_result(Path(path).read_text())


def result_decision(record: dict) -> np.ndarray:
    return np.array([int(x) for x in record["decision"].split(",") if x], dtype=np.int64)


def check_result(problem: Problem, record: dict, tol: float = 1e-9) -> bool:
    """True when the stored objective and checksum match a recomputation."""
    obj = problem.evaluate(result_decision(record)).objective
    stored = float(record["objective"])
    if float(record.get("checksum", "nan")) != stored:
        return False
    if np.isinf(obj) or np.isinf(stored):
        return obj == stored
    return abs(obj - stored) <= tol


# ---------------------------------------------------------------- real-data adapters


def load_points_csv(path, k: int, columns=(0, 1), skip_header: bool | None = None) -> FacilityInstance:
    """Coordinates from a CSV file, min-max normalized per column to [0, 1]."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if skip_header is None:
        try:
            [float(rows[0][c]) for c in columns]
            skip_header = False
        except (ValueError, IndexError):
            skip_header = True
    data = np.array([[float(r[c]) for c in columns] for r in rows[int(skip_header):] if r])
    lo, hi = data.min(axis=0), data.max(axis=0)
    span = np.where(hi > lo, hi - lo, 1.0)
    return FacilityInstance.from_points((data - lo) / span, k)


def load_set_system(path, k: int, item_weights=None) -> CoverageInstance:
    """Railway-style set system: first ``n_rows n_cols``, then per column
    ``cost count row_1 ... row_count`` with 1-based rows (lines may wrap).
    Columns become sets and rows become items (unit weights by default)."""
    toks = Path(path).read_text().split()
    pos = 0

    def nxt():
        nonlocal pos
        if pos >= len(toks):
            raise FormatError("unexpected end of set-system file")
        pos += 1
        return toks[pos - 1]

    m, n = int(nxt()), int(nxt())
    sets = []
    for _ in range(n):
        float(nxt())
        cnt = int(nxt())
        sets.append([int(nxt()) - 1 for _ in range(cnt)])
    weights = np.ones(m) if item_weights is None else np.asarray(item_weights, dtype=float)
    return CoverageInstance(weights, sets, k)


def threads_from_env(default: int = 1) -> int:
    try:
        return max(1, int(os.environ.get("UCOM2_THREADS", default)))
    except ValueError:
        return default
