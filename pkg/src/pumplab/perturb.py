"""Randomized flip rules used on stalls and restarts.

All randomness flows through numpy Generators created by make_rng /
spawn_rng so that every run is replayable from (seed, run index). Each
rule documents exactly how many draws it consumes; the hybrid rule
deliberately consumes the same draws as the original rule whenever
TT <= |F| so traces of the two coincide on such runs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .certificate import ProjectedCertificate
from .errors import DimensionMismatch, EmptyCertificateSupport
from .model import MixedBinaryInstance, dense_rows, normalize

DEFAULT_TT_RANGE = (10, 30)
FRAC_TOL = 1e-9


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def spawn_rng(base_seed: int, index: int) -> np.random.Generator:
    """Independent stream #index derived from one base seed."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy=base_seed, spawn_key=(index,))))


@dataclass(frozen=True)
class PerturbOutcome:
    x_new: np.ndarray
    flipped: tuple[int, ...]
    kind: str
    tt: Optional[int] = None


def _flip(x_tilde: np.ndarray, idx) -> np.ndarray:
    out = np.asarray(x_tilde, dtype=np.int8).copy()
    idx = np.asarray(idx, dtype=np.int64)
    out[idx] = 1 - out[idx]
    return out


def perturb_l(x_tilde, cert: ProjectedCertificate, l: int, rng: np.random.Generator) -> PerturbOutcome:
    """Flip the distinct outcomes of l uniform draws from the certificate's
    binary support (draws are independent, so 1 <= |flipped| <= l)."""
    if l < 1:
        raise ValueError("l must be at least 1")
    support = np.array(sorted(cert.a), dtype=np.int64)
    if support.size == 0:
        raise EmptyCertificateSupport("certificate has no binary support to flip")
    draws = rng.integers(0, support.size, size=l)
    idx = np.unique(support[draws])
    return PerturbOutcome(_flip(x_tilde, idx), tuple(int(j) for j in idx), "walksat")


def _fractionality(x_tilde, x_bar) -> np.ndarray:
    xt = np.asarray(x_tilde, dtype=float).reshape(-1)
    xb = np.asarray(x_bar, dtype=float).reshape(-1)
    if xt.shape != xb.shape:
        raise DimensionMismatch("fractionality needs equal-length vectors")
    return np.abs(xb - xt)


def _draw_tt(rng: np.random.Generator, tt_range) -> int:
    lo, hi = int(tt_range[0]), int(tt_range[1])
    if lo > hi or lo < 0:
        raise ValueError(f"bad TT range {tt_range!r}")
    return int(rng.integers(lo, hi + 1))


def _by_fractionality(f: np.ndarray) -> np.ndarray:
    # descending fractionality, ties to the smaller index
    return np.argsort(-f, kind="stable")


def original_perturb(x_tilde, x_bar, rng, tt_range=DEFAULT_TT_RANGE) -> PerturbOutcome:
    """Flip the min(TT, NN) most fractional coordinates, TT uniform in the
    range, NN the number of strictly fractional ones."""
    f = _fractionality(x_tilde, x_bar)
    tt = _draw_tt(rng, tt_range)
    order = _by_fractionality(f)
    positive = order[f[order] > FRAC_TOL]
    idx = positive[: min(tt, positive.size)]
    return PerturbOutcome(_flip(x_tilde, idx), tuple(int(j) for j in sorted(idx)), "original", tt)


def original_perturb_zero_frac(x_tilde, x_bar, rng, tt_range=DEFAULT_TT_RANGE) -> PerturbOutcome:
    """Variant that ranks all coordinates, zero fractionality included: flips
    exactly min(TT, n) of them in (fractionality desc, index asc) order."""
    f = _fractionality(x_tilde, x_bar)
    tt = _draw_tt(rng, tt_range)
    order = _by_fractionality(f)
    idx = order[: min(tt, order.size)]
    return PerturbOutcome(_flip(x_tilde, idx), tuple(int(j) for j in sorted(idx)), "original-zf", tt)


def wfpbase_perturb(
    x_tilde,
    x_bar,
    y_bar,
    instance: MixedBinaryInstance,
    rng: np.random.Generator,
    tt_range=DEFAULT_TT_RANGE,
    dense_ctx=None,
) -> PerturbOutcome:
    """Original rule while TT <= |F|; otherwise flip all of F plus
    min(|S|, TT - |F|) indices drawn without replacement from S, the union
    of binary supports of rows violated at (x~, y).

    dense_ctx may carry precomputed (A, B, b) of the normalized instance so
    pump loops avoid rebuilding them every stall.
    """
    f = _fractionality(x_tilde, x_bar)
    tt = _draw_tt(rng, tt_range)
    order = _by_fractionality(f)
    positive = order[f[order] > FRAC_TOL]
    if tt <= positive.size:
        idx = positive[:tt]
        return PerturbOutcome(_flip(x_tilde, idx), tuple(int(j) for j in sorted(idx)), "wfpbase", tt)
    if dense_ctx is None:
        A, B, _, b = dense_rows(normalize(instance))
    else:
        A, B, b = dense_ctx
    x = np.asarray(x_tilde, dtype=float).reshape(-1)
    lhs = A @ x if A.size else np.zeros(len(b))
    if B.size:
        lhs = lhs + B @ np.asarray(y_bar, dtype=float).reshape(-1)
    violated = np.flatnonzero(lhs > b + 1e-9)
    s_union: set[int] = set()
    for r in violated:
        s_union.update(int(j) for j in np.flatnonzero(A[r]))
    s_sorted = np.array(sorted(s_union), dtype=np.int64)
    k = min(s_sorted.size, tt - positive.size)
    extra = rng.choice(s_sorted, size=k, replace=False) if k else np.zeros(0, dtype=np.int64)
    chosen = sorted(set(int(j) for j in positive) | set(int(j) for j in extra))
    return PerturbOutcome(_flip(x_tilde, chosen), tuple(chosen), "wfpbase", tt)


def restart_mask(f: np.ndarray, r: np.ndarray) -> np.ndarray:
    """Flip rule for restarts: coordinate j flips iff f_j + max(r_j - 0.3, 0) > 0.5."""
    return f + np.maximum(r - 0.3, 0.0) > 0.5


def restart_perturb(x_tilde, x_bar, rng: np.random.Generator) -> PerturbOutcome:
    """Randomized restart: one uniform draw per coordinate, flip where the
    fractionality-plus-noise score clears 0.5."""
    f = _fractionality(x_tilde, x_bar)
    r = rng.random(f.size)
    mask = restart_mask(f, r)
    idx = np.flatnonzero(mask)
    return PerturbOutcome(_flip(x_tilde, idx), tuple(int(j) for j in idx), "restart")
