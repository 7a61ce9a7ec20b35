"""Rounding, l1 projection, and the alternating-projection operator.

The projection of a binary point x~ is the LP

    min ||x~ - x||_1  over  (x, y) in P,

whose objective is linear on [0,1]^n: coefficient (1 - 2*x~_j) on x_j plus
the constant sum(x~). One :class:`ProjectionOracle` per instance keeps a
single warm simplex (the constraint system never changes, only the cost
row) and memoizes every distinct x~ it has projected, so pump loops that
revisit a rounded point pay a dict lookup instead of an LP solve.
"""

from __future__ import annotations

from typing import NamedTuple, Optional

import numpy as np

from .errors import InstanceInfeasible, NoFixpoint, NonBinaryVector
from .lp import LpProblem, LpStatus, SimplexSolver
from .model import (
    MixedBinaryInstance,
    MixedPoint,
    Sense,
    dense_objective,
    dense_rows,
    normalize,
)

ROUND_SNAP = 1e-9
INT_TOL = 1e-6


def round_binary(v, snap: float = ROUND_SNAP) -> np.ndarray:
    """Componentwise nearest 0/1 with ties at 0.5 going up.

    Values within `snap` of 0.5 are treated as exactly 0.5 first, so solver
    noise cannot flip the tie direction.
    """
    arr = np.asarray(v, dtype=float).reshape(-1)
    if arr.size and (arr.min() < -1e-6 or arr.max() > 1.0 + 1e-6):
        raise NonBinaryVector("rounding expects values in [0, 1]")
    arr = arr.copy()
    arr[np.abs(arr - 0.5) <= snap] = 0.5
    return (arr >= 0.5).astype(np.int8)


def as_binary(v) -> np.ndarray:
    arr = np.ascontiguousarray(v, dtype=np.int8).reshape(-1)
    src = np.asarray(v, dtype=float).reshape(-1)
    if not np.all((src == 0.0) | (src == 1.0)):
        raise NonBinaryVector("expected an exact 0/1 vector")
    return arr


class ProjectionEntry(NamedTuple):
    x_bar: np.ndarray      # projected binary part (floats in [0,1])
    y_bar: np.ndarray      # continuous part of the projection
    distance: float        # ||x~ - x_bar||_1
    rounded: np.ndarray    # round_binary(x_bar), int8
    rounded_key: bytes
    integral: bool         # x_bar within INT_TOL of rounded


class ProjectionOracle:
    """Warm LP engine + memo table for one instance's l1 projections."""

    def __init__(self, instance: MixedBinaryInstance, int_tol: float = INT_TOL):
        self.instance = instance
        self.norm = normalize(instance)
        self.int_tol = int_tol
        A, B, _, b = dense_rows(self.norm)
        self.A, self.B, self.b = A, B, b
        n, d = instance.n, instance.d
        self.n, self.d = n, d
        coeffs = np.hstack([A, B]) if self.norm.m else np.zeros((0, n + d))
        problem = LpProblem(
            coeffs=coeffs,
            senses=[Sense.LE] * self.norm.m,
            rhs=b,
            objective=np.zeros(n + d),
            lower=np.concatenate([np.zeros(n), np.full(d, -np.inf)]),
            upper=np.concatenate([np.ones(n), np.full(d, np.inf)]),
        )
        self.solver = SimplexSolver(problem)
        if not self.solver.ensure_phase1():
            raise InstanceInfeasible(f"instance {instance.name!r} has an empty relaxation")
        self.cache: dict[bytes, ProjectionEntry] = {}
        self.lp_solves = 0

    def relaxation(self) -> tuple[np.ndarray, np.ndarray]:
        """An optimal vertex of the relaxation (zero objective when absent).

        Falls back to a zero-objective vertex if the stated objective is
        unbounded over the relaxation.
        """
        cb, cc = dense_objective(self.instance)
        c = np.concatenate([cb, cc])
        sol = self.solver.resolve(c, maximize=True)
        if sol.status is not LpStatus.OPTIMAL:
            sol = self.solver.resolve(np.zeros(self.n + self.d), maximize=False)
        self.lp_solves += 1
        return sol.x[: self.n].copy(), sol.x[self.n :].copy()

    def entry(self, x_tilde) -> ProjectionEntry:
        arr = np.ascontiguousarray(x_tilde, dtype=np.int8).reshape(-1)
        key = arr.tobytes()
        hit = self.cache.get(key)
        if hit is not None:
            return hit
        return self._solve(arr, key)

    def _solve(self, arr: np.ndarray, key: bytes) -> ProjectionEntry:
        c = np.concatenate([1.0 - 2.0 * arr, np.zeros(self.d)])
        sol = self.solver.resolve(c, maximize=False)
        # bounded objective over [0,1]^n, so OPTIMAL is the only possibility
        x_bar = sol.x[: self.n]
        y_bar = sol.x[self.n :]
        distance = float(sol.objective + int(arr.sum()))
        rounded = round_binary(x_bar)
        integral = bool(self.n == 0 or np.max(np.abs(x_bar - rounded)) <= self.int_tol)
        entry = ProjectionEntry(x_bar, y_bar, distance, rounded, rounded.tobytes(), integral)
        self.cache[key] = entry
        self.lp_solves += 1
        return entry

    def rows_violated(self, x, y, tol: float = 1e-9) -> np.ndarray:
        """Indices of normalized rows violated at (x, y)."""
        lhs = self.A @ x if self.norm.m else np.zeros(0)
        if self.d:
            lhs = lhs + self.B @ y
        return np.flatnonzero(lhs > self.b + tol)

    def pair_feasible(self, x, y, tol: float = 1e-9) -> bool:
        return self.rows_violated(x, y, tol).size == 0


def l1_proj(instance: MixedBinaryInstance, x_tilde, oracle: Optional[ProjectionOracle] = None):
    """The closest point of the relaxation in binary l1 distance.

    Returns (MixedPoint, distance). Pass an oracle to share the warm solver
    and memo table across calls on the same instance.
    """
    oracle = oracle if oracle is not None else ProjectionOracle(instance)
    e = oracle.entry(as_binary(x_tilde))
    return MixedPoint(e.x_bar.copy(), e.y_bar.copy()), e.distance


def alt_proj(instance: MixedBinaryInstance, x_tilde, oracle: Optional[ProjectionOracle] = None) -> np.ndarray:
    """round(l1_proj(x~)): one step of the alternating projection map."""
    oracle = oracle if oracle is not None else ProjectionOracle(instance)
    return oracle.entry(as_binary(x_tilde)).rounded.copy()


def alt_proj_star(
    instance: MixedBinaryInstance,
    x_tilde,
    cap: Optional[int] = None,
    oracle: Optional[ProjectionOracle] = None,
) -> np.ndarray:
    """Iterate alt_proj to its fixpoint.

    The cap defaults to 2n + 10 applications; running out raises NoFixpoint.
    """
    oracle = oracle if oracle is not None else ProjectionOracle(instance)
    if cap is None:
        cap = 2 * instance.n + 10
    z = as_binary(x_tilde)
    key = z.tobytes()
    for _ in range(cap):
        e = oracle.entry(z)
        if e.rounded_key == key:
            return z.copy()
        z, key = e.rounded, e.rounded_key
    raise NoFixpoint(f"no alternating-projection fixpoint within {cap} applications")


def is_stalling(instance: MixedBinaryInstance, x_tilde, oracle: Optional[ProjectionOracle] = None) -> bool:
    """True when x~ is a fixpoint of round(l1_proj(.)) and not feasible itself.

    Feasible binary points project to themselves, so they are fixpoints too;
    a stalling point is an infeasible one.
    """
    oracle = oracle if oracle is not None else ProjectionOracle(instance)
    z = as_binary(x_tilde)
    e = oracle.entry(z)
    if e.rounded_key != z.tobytes():
        return False
    return e.distance > 1e-9
