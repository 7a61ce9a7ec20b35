"""Pump drivers: the alternating-projection loop and its randomized escapes.

Five drivers share the same skeleton (project, round, compare against the
previous rounded point) and differ in what happens on a stall:

- run_naive_fp        nothing; the loop just runs out
- run_original_fp     fractionality-guided flips (optionally ranking
                      zero-fractionality coordinates too)
- run_wfp             flips drawn from a minimal certificate's support
- run_wfp_compressed  collapses projection sequences to their fixpoint
                      first, then perturbs every iteration
- run_wfpbase_fp      fractionality flips extended into violated-row
                      supports, plus randomized restarts on longer cycles

Every driver returns a PumpTrace; `iterations` counts projection steps
(perturbation rounds for the walk driver), and Found outcomes carry a
point that satisfies the instance rows at LP tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .certificate import CertificateOracle
from .errors import NoFixpoint, NotACertificate
from .lp import lift
from .model import MixedBinaryInstance, MixedPoint
from .perturb import (
    DEFAULT_TT_RANGE,
    original_perturb,
    original_perturb_zero_frac,
    perturb_l,
    restart_perturb,
    wfpbase_perturb,
)
from .projection import ProjectionOracle, round_binary

HISTORY_CAP = 10_000


@dataclass
class TraceRecord:
    t: int
    event: str
    kind: str = ""
    flipped: tuple[int, ...] = ()
    distance: Optional[float] = None


@dataclass
class PumpTrace:
    algorithm: str
    instance: str
    seed: Optional[int]
    outcome: str = "iter_limit"          # found | iter_limit | error
    point: Optional[MixedPoint] = None
    iterations: int = 0
    perturbations: int = 0
    restarts: int = 0
    records: list[TraceRecord] = field(default_factory=list)
    cycle: Optional[tuple[str, int]] = None
    message: str = ""

    @property
    def found(self) -> bool:
        return self.outcome == "found"

    def to_lines(self) -> list[str]:
        head = (
            f"# algorithm={self.algorithm} instance={self.instance} seed={self.seed}"
            f" outcome={self.outcome} iterations={self.iterations}"
            f" perturbations={self.perturbations} restarts={self.restarts}"
        )
        lines = [head]
        for r in self.records:
            parts = [f"t={r.t}", f"event={r.event}"]
            if r.kind:
                parts.append(f"kind={r.kind}")
            if r.flipped:
                parts.append("flipped=" + ",".join(str(j) for j in r.flipped))
            if r.distance is not None:
                parts.append(f"distance={r.distance!r}")
            lines.append(" ".join(parts))
        return lines


class _Run:
    """Bookkeeping shared by the drivers."""

    def __init__(self, algorithm: str, instance: MixedBinaryInstance, seed, record: bool):
        self.trace = PumpTrace(algorithm, instance.name, seed)
        self.record = record

    def note(self, t, event, kind="", flipped=(), distance=None):
        if self.record:
            self.trace.records.append(TraceRecord(t, event, kind, flipped, distance))

    def found(self, t, point: MixedPoint):
        self.trace.outcome = "found"
        self.trace.point = point
        self.trace.iterations = t
        self.note(t, "return")
        return self.trace

    def limit(self, max_iter):
        self.trace.outcome = "iter_limit"
        self.trace.iterations = max_iter
        return self.trace


def run_naive_fp(instance: MixedBinaryInstance, max_iter: int = 10_000, record: bool = True) -> PumpTrace:
    """Project and round until the projection is integral; no escapes.

    The first revisited rounded point is classified into trace.cycle as
    ("one", 1) or ("long", gap).
    """
    oracle = ProjectionOracle(instance)
    run = _Run("naive", instance, None, record)
    x_bar, y_bar = oracle.relaxation()
    rounded = round_binary(x_bar)
    if instance.n == 0 or np.max(np.abs(x_bar - rounded)) <= oracle.int_tol:
        return run.found(0, MixedPoint(x_bar, y_bar))
    run.note(0, "round")
    cur = rounded
    prev_key = cur.tobytes()
    visited = {prev_key: 0}
    for t in range(1, max_iter + 1):
        e = oracle.entry(cur)
        run.note(t, "project", distance=e.distance)
        if e.integral:
            return run.found(t, MixedPoint(e.x_bar.copy(), e.y_bar.copy()))
        run.note(t, "round")
        new_key = e.rounded_key
        if new_key == prev_key:
            run.note(t, "stall")
        if run.trace.cycle is None:
            seen = visited.get(new_key)
            if seen is not None:
                gap = t - seen
                run.trace.cycle = ("one" if gap == 1 else "long", gap)
            else:
                visited[new_key] = t
        cur, prev_key = e.rounded, new_key
    return run.limit(max_iter)


def run_original_fp(
    instance: MixedBinaryInstance,
    max_iter: int,
    rng: np.random.Generator,
    zero_frac_flips: bool = False,
    tt_range=DEFAULT_TT_RANGE,
    record: bool = True,
) -> PumpTrace:
    """Naive loop plus fractionality-guided flips whenever the rounded point
    repeats the previous iterate."""
    oracle = ProjectionOracle(instance)
    rule = original_perturb_zero_frac if zero_frac_flips else original_perturb
    run = _Run("origzf" if zero_frac_flips else "orig", instance, None, record)
    x_bar, y_bar = oracle.relaxation()
    rounded = round_binary(x_bar)
    if instance.n == 0 or np.max(np.abs(x_bar - rounded)) <= oracle.int_tol:
        return run.found(0, MixedPoint(x_bar, y_bar))
    run.note(0, "round")
    cur = rounded
    prev_key = cur.tobytes()
    for t in range(1, max_iter + 1):
        e = oracle.entry(cur)
        run.note(t, "project", distance=e.distance)
        if e.integral:
            return run.found(t, MixedPoint(e.x_bar.copy(), e.y_bar.copy()))
        run.note(t, "round")
        nxt, new_key = e.rounded, e.rounded_key
        if new_key == prev_key:
            run.note(t, "stall")
            out = rule(nxt, e.x_bar, rng, tt_range)
            run.trace.perturbations += 1
            run.note(t, "perturb", kind=out.kind, flipped=out.flipped)
            nxt, new_key = out.x_new, out.x_new.tobytes()
        cur, prev_key = nxt, new_key
    return run.limit(max_iter)


def _feasible_lift(instance, oracle: ProjectionOracle, x: np.ndarray, cache: dict):
    """Lift of a binary point against its instance, memoized by bytes."""
    key = x.tobytes()
    if key in cache:
        return cache[key]
    if instance.d == 0:
        ok = oracle.pair_feasible(x.astype(float), np.zeros(0))
        res = MixedPoint(x.astype(float), np.zeros(0)) if ok else None
    else:
        res = lift(instance, x.astype(float))
    cache[key] = res
    return res


def run_mb_walksat(
    instance: MixedBinaryInstance,
    l: int,
    start=None,
    max_iter: int = 10_000,
    rng: Optional[np.random.Generator] = None,
    record: bool = True,
) -> PumpTrace:
    """Pure certificate walk: while the point has no feasible lift, flip
    within a minimal certificate's support. iterations == perturbations.
    start=None draws a uniform 0/1 point from rng."""
    if rng is None:
        raise ValueError("rng is required")
    oracle = ProjectionOracle(instance)  # validates feasibility, serves row checks
    certs = CertificateOracle(instance)
    run = _Run("mbwalksat", instance, None, record)
    if start is None:
        x = rng.integers(0, 2, size=instance.n).astype(np.int8)
    else:
        x = np.ascontiguousarray(start, dtype=np.int8).reshape(-1)
    if x.shape != (instance.n,):
        raise ValueError("start point length does not match instance")
    lifts: dict = {}
    for t in range(max_iter + 1):
        lifted = _feasible_lift(instance, oracle, x, lifts)
        if lifted is not None:
            run.trace.perturbations = t
            return run.found(t, lifted)
        if t == max_iter:
            break
        cert = certs.min_certificate(x.astype(float))
        out = perturb_l(x, cert, l, rng)
        run.note(t + 1, "perturb", kind=out.kind, flipped=out.flipped)
        x = out.x_new
    run.trace.perturbations = max_iter
    return run.limit(max_iter)


def run_wfp(
    instance: MixedBinaryInstance,
    l: int,
    max_iter: int,
    rng: np.random.Generator,
    record: bool = True,
) -> PumpTrace:
    """Pump whose stalls are escaped by certificate-support flips."""
    oracle = ProjectionOracle(instance)
    certs: Optional[CertificateOracle] = None
    run = _Run("wfp", instance, None, record)
    x_bar, _ = oracle.relaxation()
    cur = round_binary(x_bar)
    run.note(0, "round")
    prev_key = cur.tobytes()
    for t in range(1, max_iter + 1):
        e = oracle.entry(cur)
        run.note(t, "project", distance=e.distance)
        x_t = e.rounded
        run.note(t, "round")
        if oracle.pair_feasible(x_t.astype(float), e.y_bar):
            return run.found(t, MixedPoint(x_t.astype(float), e.y_bar.copy()))
        nxt, new_key = x_t, e.rounded_key
        if new_key == prev_key:
            run.note(t, "stall")
            if certs is None:
                certs = CertificateOracle(instance)
            try:
                cert = certs.min_certificate(x_t.astype(float))
            except NotACertificate:
                # the rounded point is in the projection after all (possible
                # only with continuous columns); lift it and return
                lifted = lift(instance, x_t.astype(float))
                if lifted is not None:
                    return run.found(t, lifted)
                raise
            out = perturb_l(x_t, cert, l, rng)
            run.trace.perturbations += 1
            run.note(t, "perturb", kind=out.kind, flipped=out.flipped)
            nxt, new_key = out.x_new, out.x_new.tobytes()
        cur, prev_key = nxt, new_key
    return run.limit(max_iter)


def run_wfp_compressed(
    instance: MixedBinaryInstance,
    l: int,
    max_iter: int,
    rng: np.random.Generator,
    cap: Optional[int] = None,
    record: bool = True,
) -> PumpTrace:
    """Collapse each projection sequence to its fixpoint, then perturb.

    Raises NoFixpoint when the alternating projection fails to settle
    within the cap (cannot happen on single-row subset-sum instances).
    """
    oracle = ProjectionOracle(instance)
    certs = CertificateOracle(instance)
    run = _Run("wfpc", instance, None, record)
    if cap is None:
        cap = 2 * instance.n + 10
    x_bar, _ = oracle.relaxation()
    z = round_binary(x_bar)
    run.note(0, "round")
    lifts: dict = {}
    for t in range(1, max_iter + 1):
        key = z.tobytes()
        for _ in range(cap):
            e = oracle.entry(z)
            if e.rounded_key == key:
                break
            z, key = e.rounded, e.rounded_key
        else:
            run.trace.outcome = "error"
            run.trace.iterations = t
            run.trace.message = f"no fixpoint within {cap} projections"
            raise NoFixpoint(run.trace.message)
        run.note(t, "altproj", distance=oracle.entry(z).distance)
        lifted = _feasible_lift(instance, oracle, z, lifts)
        if lifted is not None:
            return run.found(t, lifted)
        cert = certs.min_certificate(z.astype(float))
        out = perturb_l(z, cert, l, rng)
        run.trace.perturbations += 1
        run.note(t, "perturb", kind=out.kind, flipped=out.flipped)
        z = out.x_new
    return run.limit(max_iter)


def run_wfpbase_fp(
    instance: MixedBinaryInstance,
    max_iter: int,
    rng: np.random.Generator,
    tt_range=DEFAULT_TT_RANGE,
    record: bool = True,
    history_cap: int = HISTORY_CAP,
) -> PumpTrace:
    """Hybrid pump: fractionality flips widened into violated-row supports
    on stalls, randomized restarts when an older rounded point recurs."""
    oracle = ProjectionOracle(instance)
    dense_ctx = (oracle.A, oracle.B, oracle.b)
    run = _Run("wfpbase", instance, None, record)
    x_bar, y_bar = oracle.relaxation()
    rounded = round_binary(x_bar)
    if instance.n == 0 or np.max(np.abs(x_bar - rounded)) <= oracle.int_tol:
        return run.found(0, MixedPoint(x_bar, y_bar))
    run.note(0, "round")
    cur = rounded
    prev_key = cur.tobytes()
    visited = {prev_key: 0}
    for t in range(1, max_iter + 1):
        e = oracle.entry(cur)
        run.note(t, "project", distance=e.distance)
        if e.integral:
            return run.found(t, MixedPoint(e.x_bar.copy(), e.y_bar.copy()))
        run.note(t, "round")
        nxt, new_key = e.rounded, e.rounded_key
        if new_key == prev_key:
            run.note(t, "stall")
            out = wfpbase_perturb(nxt, e.x_bar, e.y_bar, instance, rng, tt_range, dense_ctx)
            run.trace.perturbations += 1
            run.note(t, "perturb", kind=out.kind, flipped=out.flipped)
            nxt, new_key = out.x_new, out.x_new.tobytes()
        elif new_key in visited:
            out = restart_perturb(nxt, e.x_bar, rng)
            run.trace.restarts += 1
            run.note(t, "restart", kind=out.kind, flipped=out.flipped)
            visited = {}
            nxt, new_key = out.x_new, out.x_new.tobytes()
        if len(visited) >= history_cap:
            visited.pop(next(iter(visited)))
        visited[new_key] = t
        cur, prev_key = nxt, new_key
    return run.limit(max_iter)


def detect_cycle(history: Iterable) -> Optional[tuple[str, int]]:
    """First revisit in a sequence of binary points (arrays or bytes).

    Returns ("one", 1), ("long", gap) or None.
    """
    seen: dict[bytes, int] = {}
    for t, item in enumerate(history):
        key = item if isinstance(item, bytes) else np.ascontiguousarray(item, dtype=np.int8).tobytes()
        if key in seen:
            gap = t - seen[key]
            return ("one" if gap == 1 else "long", gap)
        seen[key] = t
    return None


@dataclass(frozen=True)
class BoundReport:
    theorem: str
    iterations: int
    delta: Optional[float]
    tail: Optional[float]
    params: dict


def _ceil_log(v: float) -> int:
    # guard against 1.0000000000000002-style float noise at integer points
    return max(1, math.ceil(math.log(v) - 1e-12))


def theorem_bound(
    theorem: str,
    *,
    block_sizes: Optional[Sequence[int]] = None,
    cert_bounds: Optional[Sequence[int]] = None,
    n: Optional[int] = None,
    cert_supp: Optional[int] = None,
    T: Optional[int] = None,
    delta: Optional[float] = None,
) -> BoundReport:
    """High-probability iteration bounds for the certificate-walk drivers.

    T1: blockwise walk needs ceil(ln(k/delta)) * sum_i n_i * c_i^{n_i}
        draws, c_i the per-block certificate-support cap.
    T2: same with c_i = n_i^2 (separable subset-sum).
    T3: failure tail (1 - cert_supp^-n)^floor(T/n) after T draws; given
        delta instead, T = n * cert_supp^n * ceil(ln(1/delta)).
    T5: pump iterations 2T with T = n * n^(2n) * ceil(ln(1/delta)).
    """
    name = "T" + theorem.upper().lstrip("T")
    if name == "T1":
        if not block_sizes or not cert_bounds or delta is None:
            raise ValueError("T1 needs block_sizes, cert_bounds, delta")
        if len(block_sizes) != len(cert_bounds):
            raise ValueError("block_sizes and cert_bounds must align")
        k = len(block_sizes)
        total = sum(int(ni) * int(ci) ** int(ni) for ni, ci in zip(block_sizes, cert_bounds))
        iters = _ceil_log(k / delta) * total
        return BoundReport("T1", iters, delta, None, {"block_sizes": tuple(block_sizes), "cert_bounds": tuple(cert_bounds)})
    if name == "T2":
        if not block_sizes or delta is None:
            raise ValueError("T2 needs block_sizes, delta")
        k = len(block_sizes)
        total = sum(int(ni) * int(ni) ** (2 * int(ni)) for ni in block_sizes)
        iters = _ceil_log(k / delta) * total
        return BoundReport("T2", iters, delta, None, {"block_sizes": tuple(block_sizes)})
    if name == "T3":
        if n is None or cert_supp is None:
            raise ValueError("T3 needs n and cert_supp")
        if T is None:
            if delta is None:
                raise ValueError("T3 needs T or delta")
            T = int(n) * int(cert_supp) ** int(n) * _ceil_log(1.0 / delta)
        tail = (1.0 - float(cert_supp) ** (-int(n))) ** (int(T) // int(n))
        return BoundReport("T3", int(T), delta, tail, {"n": int(n), "cert_supp": int(cert_supp)})
    if name == "T5":
        if n is None or delta is None:
            raise ValueError("T5 needs n and delta")
        T_half = int(n) * int(n) ** (2 * int(n)) * _ceil_log(1.0 / delta)
        tail = (1.0 - (1.0 / int(n) ** 2) ** int(n)) ** (T_half // int(n)) if n > 1 else 0.0
        return BoundReport("T5", 2 * T_half, delta, tail, {"n": int(n)})
    raise ValueError(f"unknown theorem id {theorem!r}")
