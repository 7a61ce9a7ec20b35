"""Command line front end.

Subcommands: gen (emit an instance file), solve (one algorithm on one
instance), bench (sweep a grid and tabulate), verify-bounds (Monte Carlo
check of the iteration bounds), trace (replay one run and dump its log).

Instances are named by a path (native format, or MPS when the name ends
in .mps) or by a builtin alias: "fractional-stall" and
"zero-frac-stall:T" give the two stalling counterexamples.
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional

import numpy as np

from . import bench as benchmod
from .errors import PumpLabError
from .formats import parse_mps, read_native, write_mps, write_native
from .gen import (
    BlockSpec,
    fractional_stall_instance,
    gen_decomposable,
    gen_subset_sum,
    gen_two_stage,
    zero_frac_stall_instance,
)
from .model import MixedBinaryInstance
from .perturb import DEFAULT_TT_RANGE, make_rng
from . import pump


def _parse_seeds(text: str) -> list[int]:
    text = text.strip()
    for sep in ("..", ":"):
        if sep in text and "," not in text:
            lo, hi = text.split(sep, 1)
            return list(range(int(lo), int(hi) + 1))
    return [int(tok) for tok in text.split(",") if tok]


def _parse_ints(text: str) -> tuple[int, ...]:
    return tuple(int(tok) for tok in text.split(",") if tok)


def _parse_tt(text: str) -> tuple[int, int]:
    lo, hi = text.split(":" if ":" in text else ",", 1)
    return (int(lo), int(hi))


def load_instance(spec: str) -> MixedBinaryInstance:
    if spec == "fractional-stall":
        return fractional_stall_instance()
    if spec.startswith("zero-frac-stall"):
        _, _, arg = spec.partition(":")
        return zero_frac_stall_instance(int(arg) if arg else 3)
    with open(spec, "r", encoding="utf-8") as fh:
        text = fh.read()
    if spec.endswith(".mps"):
        return parse_mps(text)
    return read_native(text)


def _drive(alg: str, instance: MixedBinaryInstance, *, seed: int, flips: int,
           max_iter: int, tt_range, record: bool):
    rng = make_rng(seed)
    if alg == "naive":
        return pump.run_naive_fp(instance, max_iter=max_iter, record=record)
    if alg == "orig":
        return pump.run_original_fp(
            instance, max_iter=max_iter, rng=rng, tt_range=tt_range, record=record
        )
    if alg == "origzf":
        return pump.run_original_fp(
            instance, max_iter=max_iter, rng=rng, zero_frac_flips=True,
            tt_range=tt_range, record=record,
        )
    if alg == "mbwalksat":
        return pump.run_mb_walksat(instance, flips, max_iter=max_iter, rng=rng, record=record)
    if alg == "wfp":
        return pump.run_wfp(instance, flips, max_iter, rng, record=record)
    if alg == "wfpc":
        return pump.run_wfp_compressed(instance, flips, max_iter, rng, record=record)
    if alg == "wfpbase":
        return pump.run_wfpbase_fp(
            instance, max_iter=max_iter, rng=rng, tt_range=tt_range, record=record
        )
    raise ValueError(f"unknown algorithm {alg!r}")


def _point_lines(point) -> list[str]:
    x = " ".join(str(int(v)) for v in point.x)
    lines = [f"x: {x}"]
    if point.y.size:
        lines.append("y: " + " ".join(repr(float(v)) for v in point.y))
    return lines


def cmd_gen(args) -> int:
    witness = None
    if args.family == "subset-sum":
        res = gen_subset_sum(args.k, args.n, make_rng(args.seed), coeff_max=args.coeff_max)
        inst, witness = res.instance, res.witness
    elif args.family == "decomposable":
        block = BlockSpec(n=args.n, d=args.d, rows=args.rows, s=args.s, coeff_max=args.coeff_max)
        res = gen_decomposable(args.k, block, make_rng(args.seed))
        inst, witness = res.instance, res.witness
    elif args.family == "two-stage":
        res = gen_two_stage(
            args.k, args.p, args.q, make_rng(args.seed), rows_per_scenario=args.rows_per_scenario
        )
        inst, witness = res.instance, res.witness
    elif args.family == "fractional-stall":
        inst = fractional_stall_instance()
    elif args.family == "zero-frac-stall":
        inst = zero_frac_stall_instance(args.t_max)
    else:
        raise ValueError(f"unknown family {args.family!r}")
    text = write_mps(inst) if args.format == "mps" else write_native(inst)
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.witness and witness is not None:
        for line in _point_lines(witness):
            print(f"witness {line}", file=sys.stderr)
    return 0


def cmd_solve(args) -> int:
    instance = load_instance(args.instance)
    trace = _drive(
        args.alg, instance, seed=args.seed, flips=args.flips,
        max_iter=args.max_iter, tt_range=args.tt, record=False,
    )
    print(f"outcome: {trace.outcome}")
    print(
        f"iterations: {trace.iterations} perturbations: {trace.perturbations} "
        f"restarts: {trace.restarts}"
    )
    if trace.found and trace.point is not None:
        for line in _point_lines(trace.point):
            print(line)
    return 0 if trace.found else 1


def cmd_trace(args) -> int:
    instance = load_instance(args.instance)
    trace = _drive(
        args.alg, instance, seed=args.seed, flips=args.flips,
        max_iter=args.max_iter, tt_range=args.tt, record=True,
    )
    trace.seed = args.seed
    sys.stdout.write("\n".join(trace.to_lines()) + "\n")
    return 0


def cmd_bench(args) -> int:
    if args.instances:
        instances = [load_instance(p) for p in args.instances]
    elif args.family == "two-stage":
        instances = benchmod.two_stage_suite(
            base_seed=args.base_seed,
            ks=_parse_ints(args.ks) if args.ks else (5, 15, 25, 35, 45),
            ps=_parse_ints(args.ps) if args.ps else (10, 20),
            q=args.q,
            per_config=args.per_config,
            rows_per_scenario=args.rows_per_scenario,
        )
    elif args.family == "subset-sum":
        instances = benchmod.subset_sum_suite(
            base_seed=args.base_seed,
            ks=_parse_ints(args.ks) if args.ks else (1, 2, 3),
            ns=_parse_ints(args.ns) if args.ns else (3, 4, 5),
            per_config=args.per_config,
            coeff_max=args.coeff_max,
        )
    else:
        print("bench needs --instances or --family", file=sys.stderr)
        return 2
    cfg = benchmod.BenchConfig(
        instances=instances,
        algorithms=tuple(args.algs.split(",")),
        seeds=_parse_seeds(args.seeds),
        max_iter=args.max_iter,
        tt_range=args.tt,
        flips=args.flips,
        time_limit=args.time_limit,
        **({"workers": args.workers} if args.workers else {}),
    )
    result = benchmod.run_benchmark(cfg)
    sys.stdout.write(result.text)
    if args.csv:
        benchmod.write_csv(result.rows, args.csv)
        print(f"wrote {len(result.rows)} rows to {args.csv}", file=sys.stderr)
    return 0


def cmd_verify_bounds(args) -> int:
    if args.ks is None:
        args.ks = "2,3" if args.theorem == "1" else "1,2,3"
    if args.ns is None:
        args.ns = "3,4,5,6" if args.theorem == "1" else "3,4,5"
    res = benchmod.run_bound_suite(
        str(args.theorem),
        runs=args.runs,
        delta=args.delta,
        ks=_parse_ints(args.ks),
        ns=_parse_ints(args.ns),
        base_seed=args.base_seed,
        coeff_max=args.coeff_max,
        cap_limit=args.cap_limit,
    )
    sys.stdout.write(res.render())
    return 0 if res.passed else 1


def _add_run_flags(p, max_iter_default: int):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--flips", "--l", dest="flips", type=int, default=2,
                   help="certificate flips per perturbation")
    p.add_argument("--max-iter", type=int, default=max_iter_default)
    p.add_argument("--tt", type=_parse_tt, default=DEFAULT_TT_RANGE, metavar="LO:HI",
                   help="flip-count range for the fractionality rules")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pumplab", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate an instance file")
    p.add_argument("--family", required=True,
                   choices=["subset-sum", "decomposable", "two-stage",
                            "fractional-stall", "zero-frac-stall"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--k", type=int, default=1, help="block or scenario count")
    p.add_argument("--n", type=int, default=4, help="binaries per block")
    p.add_argument("--d", type=int, default=0, help="continuous columns per block")
    p.add_argument("--rows", type=int, default=2, help="rows per block")
    p.add_argument("--s", type=int, default=2, help="binary support per row")
    p.add_argument("--p", type=int, default=10, help="first-stage binaries")
    p.add_argument("--q", type=int, default=10, help="second-stage columns per scenario")
    p.add_argument("--rows-per-scenario", type=int, default=5)
    p.add_argument("--coeff-max", type=int, default=20)
    p.add_argument("--t-max", type=int, default=3, help="trap depth for zero-frac-stall")
    p.add_argument("--format", choices=["native", "mps"], default="native")
    p.add_argument("-o", "--output")
    p.add_argument("--witness", action="store_true",
                   help="print the planted feasible point to stderr")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("solve", help="run one algorithm on one instance")
    p.add_argument("--alg", required=True, choices=list(benchmod.KNOWN_ALGORITHMS))
    p.add_argument("instance")
    _add_run_flags(p, 10_000)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("trace", help="replay one run and dump its event log")
    p.add_argument("--alg", required=True, choices=list(benchmod.KNOWN_ALGORITHMS))
    p.add_argument("instance")
    _add_run_flags(p, 50)
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("bench", help="sweep instances x algorithms x seeds")
    p.add_argument("--instances", nargs="*", help="instance files (overrides --family)")
    p.add_argument("--family", choices=["two-stage", "subset-sum"])
    p.add_argument("--algs", default="orig,wfpbase", help="comma list")
    p.add_argument("--seeds", default="1..10", help="list 1,2,3 or range 1..10")
    p.add_argument("--max-iter", type=int, default=400)
    p.add_argument("--flips", "--l", dest="flips", type=int, default=2)
    p.add_argument("--tt", type=_parse_tt, default=DEFAULT_TT_RANGE, metavar="LO:HI")
    p.add_argument("--time-limit", type=float, default=60.0)
    p.add_argument("--base-seed", type=int, default=12345, help="instance generation seed")
    p.add_argument("--ks", help="comma list of block or scenario counts")
    p.add_argument("--ps", help="comma list of first-stage sizes (two-stage)")
    p.add_argument("--ns", help="comma list of block sizes (subset-sum)")
    p.add_argument("--q", type=int, default=10)
    p.add_argument("--per-config", type=int, default=5)
    p.add_argument("--rows-per-scenario", type=int, default=5)
    p.add_argument("--coeff-max", type=int, default=20)
    p.add_argument("--csv", help="also write per-run rows to this path")
    p.add_argument("--workers", type=int, help="worker processes (default: PUMPLAB_WORKERS or 1)")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("verify-bounds", help="Monte Carlo check of the iteration bounds")
    p.add_argument("--theorem", required=True, choices=["1", "2", "5"])
    p.add_argument("--runs", type=int, default=200)
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--ks", "--k", dest="ks", help="comma list of block counts")
    p.add_argument("--ns", "--n", dest="ns", help="comma list of block sizes")
    p.add_argument("--base-seed", type=int, default=0)
    p.add_argument("--coeff-max", type=int, default=10)
    p.add_argument("--cap-limit", type=int, default=1_000_000)
    p.set_defaults(func=cmd_verify_bounds)

    return ap


def main(argv: Optional[list] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except PumpLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
