"""Benchmark harness: run pump variants over instance sets and tabulate.

Each (instance, algorithm, seed) triple is one run. Run RNGs are derived
from the seed plus the instance and algorithm positions in the config, so
results do not depend on execution order and the worker pool (if any)
produces the same rows as a serial sweep. Rows are sorted by
(instance, algorithm, seed) before reporting.

Wall time is recorded per run. Runs are never interrupted mid-flight; a
run whose wall time exceeds the time limit gets outcome "timeout" after
the fact. Everything except the wall_time_s column is deterministic for
a fixed config (assuming no run straddles the time limit).

CSV columns, in order: instance, algorithm, seed, outcome, iterations,
perturbations, restarts, wall_time_s. Header row, UTF-8, LF endings.
"""

from __future__ import annotations

import csv
import io
import math
import os
import time
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import PumpLabError
from .gen import gen_subset_sum, gen_two_stage
from .model import MixedBinaryInstance
from .perturb import DEFAULT_TT_RANGE
from . import pump

CSV_COLUMNS = (
    "instance",
    "algorithm",
    "seed",
    "outcome",
    "iterations",
    "perturbations",
    "restarts",
    "wall_time_s",
)

KNOWN_ALGORITHMS = ("naive", "orig", "origzf", "mbwalksat", "wfp", "wfpc", "wfpbase")


def shifted_geomean(values, shift: float = 1.0) -> float:
    """Shifted geometric mean exp(mean(log(v + s))) - s.

    Standard aggregate for run times and iteration counts; the shift
    keeps zeros from collapsing the mean. Values must be nonnegative and
    the shift positive. Empty input gives 0.
    """
    if shift <= 0:
        raise ValueError("shift must be positive")
    arr = np.asarray(list(values), dtype=float)
    if arr.size == 0:
        return 0.0
    if np.any(arr < 0) or not np.all(np.isfinite(arr)):
        raise ValueError("values must be finite and nonnegative")
    return float(np.exp(np.mean(np.log(arr + shift))) - shift)


def _default_workers() -> int:
    try:
        return max(1, int(os.environ.get("PUMPLAB_WORKERS", "1")))
    except ValueError:
        return 1


@dataclass
class BenchConfig:
    instances: Sequence[MixedBinaryInstance]
    algorithms: Sequence[str] = ("orig", "wfpbase")
    seeds: Sequence[int] = tuple(range(1, 11))
    max_iter: int = 400
    tt_range: tuple = DEFAULT_TT_RANGE
    flips: int = 2
    time_limit: float = 60.0
    workers: int = field(default_factory=_default_workers)
    time_shift: float = 1.0
    iter_shift: float = 1.0

    def __post_init__(self):
        if not self.algorithms or not self.seeds:
            raise ValueError("need at least one algorithm and one seed")
        for alg in self.algorithms:
            if alg not in KNOWN_ALGORITHMS:
                raise ValueError(f"unknown algorithm {alg!r}")
        names = [inst.name for inst in self.instances]
        if len(set(names)) != len(names):
            raise ValueError("instance names must be unique within a benchmark")


@dataclass(frozen=True)
class BenchRow:
    instance: str
    algorithm: str
    seed: int
    outcome: str
    iterations: int
    perturbations: int
    restarts: int
    wall_time_s: float


def _run_rng(seed: int, inst_idx: int, alg_idx: int):
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(inst_idx, alg_idx))
    return np.random.Generator(np.random.PCG64(ss))


def _dispatch(alg: str, instance: MixedBinaryInstance, rng, cfg: BenchConfig):
    if alg == "naive":
        return pump.run_naive_fp(instance, max_iter=cfg.max_iter, record=False)
    if alg == "orig":
        return pump.run_original_fp(
            instance, max_iter=cfg.max_iter, rng=rng, tt_range=cfg.tt_range, record=False
        )
    if alg == "origzf":
        return pump.run_original_fp(
            instance,
            max_iter=cfg.max_iter,
            rng=rng,
            zero_frac_flips=True,
            tt_range=cfg.tt_range,
            record=False,
        )
    if alg == "mbwalksat":
        return pump.run_mb_walksat(instance, cfg.flips, max_iter=cfg.max_iter, rng=rng, record=False)
    if alg == "wfp":
        return pump.run_wfp(instance, cfg.flips, max_iter=cfg.max_iter, rng=rng, record=False)
    if alg == "wfpc":
        return pump.run_wfp_compressed(
            instance, cfg.flips, max_iter=cfg.max_iter, rng=rng, record=False
        )
    if alg == "wfpbase":
        return pump.run_wfpbase_fp(
            instance, max_iter=cfg.max_iter, rng=rng, tt_range=cfg.tt_range, record=False
        )
    raise ValueError(f"unknown algorithm {alg!r}")


def _run_one(task) -> BenchRow:
    cfg, inst_idx, alg_idx, seed = task
    instance = cfg.instances[inst_idx]
    alg = cfg.algorithms[alg_idx]
    rng = _run_rng(seed, inst_idx, alg_idx)
    start = time.perf_counter()
    try:
        trace = _dispatch(alg, instance, rng, cfg)
        outcome = trace.outcome
        iters, perts, restarts = trace.iterations, trace.perturbations, trace.restarts
    except PumpLabError:
        outcome, iters, perts, restarts = "error", 0, 0, 0
    wall = time.perf_counter() - start
    if wall > cfg.time_limit:
        outcome = "timeout"
    return BenchRow(
        instance=instance.name,
        algorithm=alg,
        seed=seed,
        outcome=outcome,
        iterations=iters,
        perturbations=perts,
        restarts=restarts,
        wall_time_s=wall,
    )


@dataclass(frozen=True)
class BenchTable:
    """Aggregates in the found-count / time-sgm / iteration-sgm layout.

    by_seed maps (algorithm, seed) to a dict with keys runs, found,
    time_sgm, iter_sgm. Iteration sgm runs over all runs of the group,
    capped runs included, which is what makes the numbers comparable
    between a variant that solves much and one that mostly hits the cap.
    means are cross-seed averages per algorithm; ratios divide each
    algorithm's means by the first algorithm's.
    """

    algorithms: tuple
    seeds: tuple
    by_seed: dict
    means: dict
    ratios: dict
    time_shift: float
    iter_shift: float

    def render(self) -> str:
        algs, seeds = self.algorithms, self.seeds
        if not algs or not seeds or not self.by_seed:
            return "(no runs)\n"
        width = max(9, max(len(a) for a in algs) + 2)
        groups = [
            ("# found", "found", "{:d}"),
            ("time sgm", "time_sgm", "{:.3f}"),
            ("itr sgm", "iter_sgm", "{:.2f}"),
        ]
        out = [f"sgm shifts: time {self.time_shift:g}, iterations {self.iter_shift:g}"]
        header1 = "seed".ljust(6)
        header2 = " " * 6
        for label, _, _ in groups:
            header1 += " " + label.center(width * len(algs))
            header2 += " " + "".join(a.rjust(width) for a in algs)
        out.append(header1.rstrip())
        out.append(header2.rstrip())
        for seed in seeds:
            line = str(seed).ljust(6)
            for _, key, fmt in groups:
                line += " " + "".join(
                    fmt.format(self.by_seed[(alg, seed)][key]).rjust(width) for alg in algs
                )
            out.append(line.rstrip())
        line = "mean".ljust(6)
        for _, key, _ in groups:
            line += " " + "".join(
                "{:.2f}".format(self.means[(alg, key)]).rjust(width) for alg in algs
            )
        out.append(line.rstrip())
        if len(algs) > 1:
            line = "ratio".ljust(6)
            for _, key, _ in groups:
                line += " " + "".join(
                    "{:.2f}".format(self.ratios[(alg, key)]).rjust(width) for alg in algs
                )
            out.append(line.rstrip() + f"   (vs {algs[0]})")
        return "\n".join(out) + "\n"


def make_table(rows: Sequence[BenchRow], time_shift: float = 1.0, iter_shift: float = 1.0) -> BenchTable:
    algs = tuple(sorted(set(r.algorithm for r in rows)))
    seeds = tuple(sorted(set(r.seed for r in rows)))
    by_seed: dict = {}
    for alg in algs:
        for seed in seeds:
            group = [r for r in rows if r.algorithm == alg and r.seed == seed]
            found = [r for r in group if r.outcome == "found"]
            by_seed[(alg, seed)] = {
                "runs": len(group),
                "found": len(found),
                "time_sgm": shifted_geomean([r.wall_time_s for r in group], time_shift),
                "iter_sgm": shifted_geomean([r.iterations for r in group], iter_shift),
            }
    means = {
        (alg, key): float(np.mean([by_seed[(alg, s)][key] for s in seeds])) if seeds else 0.0
        for alg in algs
        for key in ("found", "time_sgm", "iter_sgm")
    }
    ratios = {}
    if algs:
        base = algs[0]
        for alg in algs:
            for key in ("found", "time_sgm", "iter_sgm"):
                ref = means[(base, key)]
                ratios[(alg, key)] = means[(alg, key)] / ref if ref else math.nan
    return BenchTable(
        algorithms=algs,
        seeds=seeds,
        by_seed=by_seed,
        means=means,
        ratios=ratios,
        time_shift=time_shift,
        iter_shift=iter_shift,
    )


@dataclass(frozen=True)
class BenchResult:
    rows: list
    table: BenchTable

    @property
    def csv_text(self) -> str:
        return write_csv(self.rows)

    @property
    def text(self) -> str:
        return self.table.render()


def run_benchmark(cfg: BenchConfig) -> BenchResult:
    tasks = [
        (cfg, i, a, seed)
        for i in range(len(cfg.instances))
        for a in range(len(cfg.algorithms))
        for seed in cfg.seeds
    ]
    if cfg.workers > 1 and len(tasks) > 1:
        import multiprocessing

        ctx = multiprocessing.get_context("fork")
        with ctx.Pool(cfg.workers) as pool:
            rows = pool.map(_run_one, tasks, chunksize=1)
    else:
        rows = [_run_one(t) for t in tasks]
    rows.sort(key=lambda r: (r.instance, r.algorithm, r.seed))
    return BenchResult(rows=rows, table=make_table(rows, cfg.time_shift, cfg.iter_shift))


def write_csv(rows: Sequence[BenchRow], path=None, include_timing: bool = True) -> str:
    cols = CSV_COLUMNS if include_timing else CSV_COLUMNS[:-1]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(cols)
    for row in rows:
        rec = [getattr(row, c) for c in cols]
        if include_timing:
            rec[-1] = f"{row.wall_time_s:.6f}"
        writer.writerow(rec)
    text = buf.getvalue()
    if path is not None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return text


def read_csv(path_or_text: str) -> list[BenchRow]:
    if "\n" in path_or_text:
        text = path_or_text
    else:
        with open(path_or_text, "r", encoding="utf-8") as fh:
            text = fh.read()
    rows = []
    reader = csv.DictReader(io.StringIO(text))
    for rec in reader:
        rows.append(
            BenchRow(
                instance=rec["instance"],
                algorithm=rec["algorithm"],
                seed=int(rec["seed"]),
                outcome=rec["outcome"],
                iterations=int(rec["iterations"]),
                perturbations=int(rec["perturbations"]),
                restarts=int(rec["restarts"]),
                wall_time_s=float(rec.get("wall_time_s", 0.0) or 0.0),
            )
        )
    return rows


# ---------------------------------------------------------------------------
# Monte Carlo checks of the high-probability iteration bounds


@dataclass(frozen=True)
class BoundSuiteResult:
    theorem: str
    runs: int
    failures: int
    delta: float
    threshold: float
    caps: tuple
    details: tuple

    @property
    def rate(self) -> float:
        return self.failures / self.runs if self.runs else 0.0

    @property
    def passed(self) -> bool:
        return self.rate <= self.threshold

    def render(self) -> str:
        lines = [
            f"theorem {self.theorem}: {self.runs} runs, delta {self.delta:g}",
            f"iteration caps used: {', '.join(str(c) for c in self.caps)}",
            f"failures beyond cap: {self.failures} (rate {self.rate:.4f})",
            f"allowed rate delta + 3 sigma: {self.threshold:.4f}",
            "PASS" if self.passed else "FAIL",
        ]
        return "\n".join(lines) + "\n"


def run_bound_suite(
    theorem: str,
    runs: int = 200,
    delta: float = 0.1,
    ks=(2, 3),
    ns=(3, 4, 5, 6),
    base_seed: int = 0,
    coeff_max: int = 10,
    cap_limit: int = 1_000_000,
) -> BoundSuiteResult:
    """Empirical check that the stated success probability holds.

    Spreads `runs` round-robin over the (k, n) grid. Each run generates a
    fresh k-block subset-sum instance and drives the matching algorithm
    (theorem 1: single-flip certificate walk; 2 and 5: pump with pair
    flips) up to min(bound, cap_limit) iterations. A failure is a run
    that does not finish within its cap; with caps at the theoretical
    bound the failure rate should stay near or below delta.
    """
    from .certificate import cert_supp_bound
    from .pump import run_mb_walksat, run_wfp, theorem_bound

    name = theorem.upper().lstrip("T")
    if name not in ("1", "2", "5"):
        raise ValueError("theorem must be one of 1, 2, 5")
    configs = [(k, n) for k in ks for n in ns]
    if not configs:
        raise ValueError("empty (k, n) grid")
    failures = 0
    caps = []
    details = []
    for r in range(runs):
        k, n = configs[r % len(configs)]
        gen_rng = np.random.Generator(
            np.random.PCG64(np.random.SeedSequence(entropy=base_seed, spawn_key=(0, r)))
        )
        run_rng = np.random.Generator(
            np.random.PCG64(np.random.SeedSequence(entropy=base_seed, spawn_key=(1, r)))
        )
        inst = gen_subset_sum(k, n, gen_rng, coeff_max=coeff_max).instance
        if name == "1":
            bound = theorem_bound(
                "T1",
                block_sizes=[n] * k,
                cert_bounds=cert_supp_bound(inst),
                delta=delta,
            ).iterations
            cap = min(bound, cap_limit)
            trace = run_mb_walksat(inst, 1, max_iter=cap, rng=run_rng, record=False)
        elif name == "2":
            bound = theorem_bound("T2", block_sizes=[n] * k, delta=delta).iterations
            cap = min(bound, cap_limit)
            trace = run_wfp(inst, 2, cap, run_rng, record=False)
        else:
            bound = theorem_bound("T5", n=inst.n, delta=delta).iterations
            cap = min(bound, cap_limit)
            trace = run_wfp(inst, 2, cap, run_rng, record=False)
        if cap not in caps:
            caps.append(cap)
        ok = trace.outcome == "found"
        failures += 0 if ok else 1
        details.append((k, n, cap, trace.outcome, trace.iterations))
    sigma = math.sqrt(delta * (1.0 - delta) / runs)
    return BoundSuiteResult(
        theorem=f"T{name}",
        runs=runs,
        failures=failures,
        delta=delta,
        threshold=delta + 3.0 * sigma,
        caps=tuple(sorted(caps)),
        details=tuple(details),
    )


# ---------------------------------------------------------------------------
# Instance suites


def _suite_rng(base_seed: int, idx: int):
    ss = np.random.SeedSequence(entropy=base_seed, spawn_key=(idx,))
    return np.random.Generator(np.random.PCG64(ss))


def _renamed(inst: MixedBinaryInstance, name: str) -> MixedBinaryInstance:
    return MixedBinaryInstance(
        name=name,
        n=inst.n,
        d=inst.d,
        rows=inst.rows,
        objective=inst.objective,
        blocks=inst.blocks,
    )


def two_stage_suite(base_seed: int = 12345, ks=(5, 15, 25, 35, 45), ps=(10, 20), q: int = 10,
                    per_config: int = 5, rows_per_scenario: int = 5):
    """Two-stage grid: len(ks) * len(ps) * per_config instances.

    Defaults give the 50-instance sweep: scenario counts 5 through 45 in
    steps of 10, first-stage sizes 10 and 20, 10 second-stage columns
    per scenario, five repetitions per cell.
    """
    instances = []
    idx = 0
    for k in ks:
        for p in ps:
            for rep in range(per_config):
                res = gen_two_stage(
                    k, p, q, _suite_rng(base_seed, idx), rows_per_scenario=rows_per_scenario
                )
                instances.append(_renamed(res.instance, f"{res.instance.name}-r{rep}"))
                idx += 1
    return instances


def subset_sum_suite(base_seed: int, ks, ns, per_config: int = 1, coeff_max: int = 20):
    instances = []
    idx = 0
    for k in ks:
        for n in ns:
            for rep in range(per_config):
                res = gen_subset_sum(k, n, _suite_rng(base_seed, idx), coeff_max=coeff_max)
                instances.append(_renamed(res.instance, f"{res.instance.name}-r{rep}"))
                idx += 1
    return instances
