"""Time the compiled kernels against their numpy fallbacks.

Usage: python3 benchmarks/bench_kernels.py [--sizes 100 500 2000] [--repeat 5]

Each kernel is run on the same random inputs under both backends; the table
reports the best-of-``repeat`` time per call and the largest absolute
disagreement between the two outputs.
"""
from __future__ import annotations

import argparse
import timeit

import numpy as np

from ucom2._kernels import backends


def _inputs(n: int, rng):
    p = np.clip(rng.uniform(0.0, 1.0, n), 1e-6, 1 - 1e-6)
    d = rng.uniform(0.0, 2.0, (n, n))
    W = (d + d.T) / 2
    np.fill_diagonal(W, 0.0)
    order = np.ascontiguousarray(np.argsort(W, axis=1, kind="stable"), dtype=np.int64)
    dsorted = np.ascontiguousarray(np.take_along_axis(W, order, axis=1))
    dist = np.abs(np.arange(n + 1) - n // 10).astype(float)
    return p, order, dsorted, dist


def _cases(mod, n, inputs, q):
    p, order, dsorted, dist = inputs
    return {
        "pmf_dft": lambda: mod.pmf_dft(p),
        "pmf_dp": lambda: mod.pmf_dp(p),
        "card_remove_sums": lambda: mod.card_remove_sums(q, p, dist),
        "ms_value": lambda: mod.ms_value(order, dsorted, p),
        "ms_grad": lambda: mod.ms_grad(order, dsorted, p),
    }


def _diff(a, b) -> float:
    if isinstance(a, tuple):
        return max(_diff(x, y) for x, y in zip(a, b))
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b))))


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[100, 500, 2000])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    mods = backends()
    if "cython" not in mods:
        print("compiled backend not built; only the numpy fallback is available")
    rng = np.random.default_rng(args.seed)
    print(f"{'kernel':<18}{'n':>6}{'python ms':>12}{'cython ms':>12}{'speedup':>9}{'max diff':>11}")
    for n in args.sizes:
        inputs = _inputs(n, rng)
        q = np.maximum(mods["python"].pmf_dp(inputs[0]), 0.0)
        per_backend = {name: _cases(mod, n, inputs, q) for name, mod in mods.items()}
        for kernel in per_backend["python"]:
            times, outs = {}, {}
            for name, cases in per_backend.items():
                fn = cases[kernel]
                outs[name] = fn()
                times[name] = min(timeit.repeat(fn, number=1, repeat=args.repeat)) * 1e3
            py = times["python"]
            cy = times.get("cython", float("nan"))
            diff = _diff(outs["python"], outs["cython"]) if "cython" in outs else float("nan")
            print(f"{kernel:<18}{n:>6}{py:>12.3f}{cy:>12.3f}{py / cy:>9.1f}{diff:>11.1e}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
