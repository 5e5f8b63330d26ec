"""Command-line front end: ``ucom2 {gen,solve,bench,verify}``.

Exit codes: 0 success, 2 usage error, 3 I/O or format error, 4 numeric
failure, 5 verification failure. ``UCOM2_THREADS`` sets how many trials
``bench`` runs concurrently.
"""
from __future__ import annotations

import argparse
import dataclasses
import sys
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import _kernels, data_io
from .baselines import greedy_fl, greedy_mc, greedy_rd_coloring, random_select
from .core import clamp
from .derand import DerandError
from .optim import optimize_binary, optimize_nonbinary
from .poibin import PMFError
from .problems import DERAND_METHODS, KINDS, default_config, derandomize, solve
from .verify import bundled_toys, run_suites

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_NUMERIC, EXIT_VERIFY = 0, 2, 3, 4, 5
METHODS = ("ucom2", "greedy", "random", "greedy-rd")


class UsageError(Exception):
    pass


def _add_optim_flags(sp):
    sp.add_argument("--lr", type=float, help="learning rate")
    sp.add_argument("--beta", type=float, help="constraint coefficient")
    sp.add_argument("--iters", type=int, help="maximum optimizer iterations")
    sp.add_argument("--restarts", type=int, help="optimizer restarts")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--no-backtrack", action="store_true", help="plain fixed-step descent")
    sp.add_argument("--no-polish", action="store_true",
                    help="stop greedy derandomization once every row is discrete")
    sp.add_argument("--samples", type=int, default=100, help="draws for --derand sample")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ucom2", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="write a generated instance")
    g.add_argument("kind", choices=["fl", "mc", "rc"])
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--m", type=int, help="items (mc)")
    g.add_argument("--k", type=int, default=1)
    g.add_argument("--c", type=int, default=4, help="colors (rc)")
    g.add_argument("--edge-prob", type=float, default=0.2)
    g.add_argument("--hard-frac", type=float, default=0.2)
    g.add_argument("--colorable", action="store_true", help="resample until the hard subgraph is c-colorable")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)

    s = sub.add_parser("solve", help="solve one instance and write a result file")
    s.add_argument("instance")
    s.add_argument("--method", choices=METHODS, default="ucom2")
    s.add_argument("--derand", choices=DERAND_METHODS, default="greedy")
    s.add_argument("--time-budget", type=float, default=1.0, help="seconds for random / greedy-rd")
    s.add_argument("--out", default="-")
    _add_optim_flags(s)

    b = sub.add_parser("bench", help="compare methods over trials")
    b.add_argument("instances", nargs="+")
    b.add_argument("--methods", default="ucom2:greedy,ucom2:greedy-naive",
                   help="comma list of ucom2:<derand> and baseline names")
    b.add_argument("--trials", type=int, default=1)
    b.add_argument("--time-budget", type=float, default=1.0)
    b.add_argument("--out", default="-")
    _add_optim_flags(b)

    v = sub.add_parser("verify", help="run the self-check suites")
    v.add_argument("instance", nargs="?")
    v.add_argument("--seed", type=int, default=0)
    return ap


def _config(problem, args):
    over = {}
    if args.lr is not None:
        over["learning_rate"] = args.lr
    if args.iters is not None:
        over["max_iters"] = args.iters
    if args.restarts is not None:
        over["restarts"] = args.restarts
    if args.no_backtrack:
        over["backtrack"] = False
    over["seed"] = args.seed
    beta = problem.default_beta() if args.beta is None else args.beta
    over["beta"] = beta
    try:
        return default_config(problem, **over), beta
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _echo(cfg) -> dict:
    return {f"config.{k}": v for k, v in dataclasses.asdict(cfg).items()}


def run_baseline(problem, method: str, budget: float, seed: int):
    kind = problem.kind
    if method == "greedy":
        if kind == "fl":
            return greedy_fl(problem)
        if kind == "mc":
            return greedy_mc(problem)
        raise UsageError(f"no greedy baseline for {kind}")
    if method == "greedy-rd":
        if kind != "rc":
            raise UsageError("greedy-rd applies to rc instances only")
        return greedy_rd_coloring(problem, budget, seed)
    if method == "random":
        return random_select(problem, budget, seed)
    raise UsageError(f"unknown method {method!r}")


def cmd_gen(args) -> int:
    if args.n < 1:
        raise UsageError("--n must be positive")
    if args.kind == "fl":
        inst = data_io.gen_fl_random(args.n, args.seed, args.k)
    elif args.kind == "mc":
        if args.m is None:
            raise UsageError("--m is required for mc")
        inst = data_io.gen_mc_random(args.n, args.m, args.seed, args.k)
    else:
        inst = data_io.gen_rc_random(args.n, args.edge_prob, args.hard_frac, args.seed, args.c,
                                     require_colorable=args.colorable)
    data_io.save_instance(args.out, inst, seed=args.seed, generator=f"random-{args.kind}")
    return EXIT_OK


def cmd_solve(args) -> int:
    problem, _ = data_io.load_instance(args.instance)
    cfg, beta = _config(problem, args)
    fields = {"method": args.method, "instance": args.instance, "seed": args.seed,
              "backend": _kernels.BACKEND}
    if args.method == "ucom2":
        res = solve(problem, cfg, beta, args.derand, args.seed, args.samples, not args.no_polish)
        fields.update(derand=args.derand, derand_beta=res.derand_beta,
                      optimize_time=res.optimize_time, derandomize_time=res.derandomize_time,
                      wall_time=res.wall_time, steps=len(res.trace.steps),
                      polish_steps=res.trace.polish_steps,
                      relaxed_objective=res.trace.initial_value,
                      derandomized_objective=res.trace.final_value, **_echo(cfg))
        decision = res.decision
    else:
        out = run_baseline(problem, args.method, args.time_budget, args.seed)
        fields.update(wall_time=out.wall_time, runs=out.runs, time_budget=args.time_budget)
        decision = out.decision
    data_io.save_result(args.out, problem, decision, **fields)
    return EXIT_OK


def _bench_trial(problem, methods, cfg, beta, budget, polish, samples, trial):
    """One trial: a shared optimized state, then every requested method."""
    rows = {}
    derands = [m.split(":", 1)[1] for m in methods if m.startswith("ucom2:")]
    if derands:
        tcfg = dataclasses.replace(cfg, seed=(cfg.seed or 0) + trial)
        obj = problem.build(beta)
        t0 = time.perf_counter()
        res = optimize_nonbinary(obj, tcfg) if problem.categorical else optimize_binary(obj, tcfg)
        opt_time = time.perf_counter() - t0
        dbeta = problem.derand_beta(beta)
        dobj = obj if dbeta == beta else problem.build(dbeta)
        p0 = clamp(res.best_p, cfg.eps)
        for d in derands:
            tr = derandomize(dobj, p0, d, trial, samples, polish)
            rep = problem.evaluate(tr.final)
            rows[f"ucom2:{d}"] = (rep.objective, opt_time + tr.wall_time, tr.wall_time, tr.final)
    for m in methods:
        if not m.startswith("ucom2:"):
            out = run_baseline(problem, m, budget, trial)
            rows[m] = (problem.evaluate(out.decision).objective, out.wall_time, float("nan"), out.decision)
    return rows


def cmd_bench(args) -> int:
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    for m in methods:
        if m.startswith("ucom2:"):
            if m.split(":", 1)[1] not in DERAND_METHODS:
                raise UsageError(f"unknown derandomization in {m!r}")
        elif m not in METHODS or m == "ucom2":
            raise UsageError(f"unknown bench method {m!r}")
    if args.trials < 1:
        raise UsageError("--trials must be at least 1")
    records = []
    for path in args.instances:
        problem, _ = data_io.load_instance(path)
        cfg, beta = _config(problem, args)
        job = lambda t: _bench_trial(problem, methods, cfg, beta, args.time_budget,
                                     not args.no_polish, args.samples, t)
        with ThreadPoolExecutor(max_workers=data_io.threads_from_env()) as pool:
            trials = list(pool.map(job, range(args.trials)))
        for m in methods:
            vals = np.array([t[m][0] for t in trials])
            records.append({"instance": path, "method": m, "trials": args.trials,
                            "mean_objective": float(vals.mean()),
                            "mean_time": float(np.mean([t[m][1] for t in trials])),
                            "mean_derandomize_time": float(np.mean([t[m][2] for t in trials]))})
        if "ucom2:greedy" in methods and "ucom2:greedy-naive" in methods:
            inc = sum(t["ucom2:greedy"][2] for t in trials)
            naive = sum(t["ucom2:greedy-naive"][2] for t in trials)
            same = all(np.array_equal(t["ucom2:greedy"][3], t["ucom2:greedy-naive"][3]) for t in trials)
            records.append({"instance": path, "speedup_ratio": naive / inc if inc > 0 else float("inf"),
                            "identical_finals": same})
    text = "\n".join("".join(f"{k}={data_io._val(v)}\n" for k, v in r.items()) for r in records)
    if args.out == "-":
        print(text, end="")
    else:
        with open(args.out, "w") as fh:
            fh.write(text)
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.instance:
        problem, _ = data_io.load_instance(args.instance)
        cases = [(args.instance, problem)]
    else:
        cases = list(bundled_toys())
    failed = False
    for name, problem in cases:
        for r in run_suites(problem.build(), args.seed):
            status = "skip" if r.skipped else ("pass" if r.passed else "FAIL")
            note = f" ({r.detail})" if r.detail else ""
            print(f"{name:>10} {r.name:<16} {status} worst={r.worst:.3e}{note}")
            failed |= not r.passed
    return EXIT_VERIFY if failed else EXIT_OK


COMMANDS = {"gen": cmd_gen, "solve": cmd_solve, "bench": cmd_bench, "verify": cmd_verify}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"ucom2: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, data_io.FormatError) as exc:
        print(f"ucom2: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (PMFError, DerandError, FloatingPointError) as exc:
        print(f"ucom2: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
