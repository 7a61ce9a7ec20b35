"""Bounded-variable two-phase simplex on a dense tableau.

Layout: for m rows and n structural columns the working matrix holds
n structural + m slack + m artificial columns. Every row is an equality
a@x + s = b where the slack's bounds encode the sense (<= gives s >= 0,
>= gives s <= 0, = pins s to 0). Phase 1 minimizes the signed sum of the
artificial columns that were needed to complete the initial basis; phase 2
runs the caller's objective with the artificials pinned to zero.

The solver object keeps its factorized state alive so callers can re-enter
phase 2 with a fresh objective (`resolve`). The projection and certificate
oracles depend on that: the constraint system never changes inside a pump
run, only the cost vector does.

Determinism: entering column is the most violating reduced cost with ties
to the smallest index (plain argmax), leaving row is the smallest basis
index among minimum-ratio rows with an acceptable pivot magnitude, and a
Bland fallback takes over after a run of degenerate steps.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from typing import Optional, Sequence

import numpy as np

from .errors import DimensionMismatch, InvalidInstance, SolverFailure
from .model import MixedBinaryInstance, MixedPoint, Sense, dense_rows, normalize

FEAS_TOL = 1e-9      # phase-1 acceptance threshold
COST_TOL = 1e-9      # reduced-cost optimality threshold
PIVOT_TOL = 1e-8     # preferred minimum pivot magnitude
DEGEN_TOL = 1e-12    # steps at or below this count as degenerate
_REFRESH_EVERY = 200


class LpStatus(IntEnum):
    OPTIMAL = 0
    INFEASIBLE = 1
    UNBOUNDED = 2


class ColStatus(IntEnum):
    BASIC = 0
    AT_LOWER = 1
    AT_UPPER = 2
    FREE = 3


@dataclass
class LpProblem:
    """min or max objective @ x over {lower <= x <= upper, rows}."""

    coeffs: np.ndarray
    senses: Sequence[Sense]
    rhs: np.ndarray
    objective: np.ndarray
    maximize: bool = False
    lower: Optional[np.ndarray] = None
    upper: Optional[np.ndarray] = None

    def __post_init__(self):
        self.coeffs = np.atleast_2d(np.asarray(self.coeffs, dtype=float))
        m, n = self.coeffs.shape if self.coeffs.size else (0, np.asarray(self.objective).size)
        if self.coeffs.size == 0:
            self.coeffs = np.zeros((0, n))
            m = 0
        self.rhs = np.asarray(self.rhs, dtype=float).reshape(-1)
        self.objective = np.asarray(self.objective, dtype=float).reshape(-1)
        self.senses = tuple(Sense(s) for s in self.senses)
        self.lower = np.zeros(n) if self.lower is None else np.asarray(self.lower, dtype=float).reshape(-1)
        self.upper = np.full(n, np.inf) if self.upper is None else np.asarray(self.upper, dtype=float).reshape(-1)
        if self.rhs.shape != (m,) or len(self.senses) != m:
            raise DimensionMismatch("rhs/senses length does not match row count")
        if self.objective.shape != (n,) or self.lower.shape != (n,) or self.upper.shape != (n,):
            raise DimensionMismatch("objective/bounds length does not match column count")
        if not (np.all(np.isfinite(self.coeffs)) and np.all(np.isfinite(self.rhs)) and np.all(np.isfinite(self.objective))):
            raise InvalidInstance("coefficients, rhs and objective must be finite")
        if np.any(np.isnan(self.lower)) or np.any(np.isnan(self.upper)):
            raise InvalidInstance("bounds must not be NaN")
        if np.any(self.lower > self.upper):
            raise InvalidInstance("lower bound above upper bound")

    @property
    def ncols(self) -> int:
        return self.objective.size

    @property
    def nrows(self) -> int:
        return self.rhs.size


@dataclass
class LpSolution:
    status: LpStatus
    x: Optional[np.ndarray]
    objective: Optional[float]
    col_status: Optional[np.ndarray]
    is_vertex: bool = False


class SimplexSolver:
    def __init__(self, problem: LpProblem):
        self.problem = problem
        A = problem.coeffs
        m, n = problem.nrows, problem.ncols
        self.m, self.nstruct = m, n
        N = n + 2 * m
        self.N = N

        W = np.zeros((m, N))
        if m:
            W[:, :n] = A
            idx = np.arange(m)
            W[idx, n + idx] = 1.0          # slack
            W[idx, n + m + idx] = 1.0      # artificial
        self.W = W

        lower = np.full(N, 0.0)
        upper = np.full(N, 0.0)
        lower[:n] = problem.lower
        upper[:n] = problem.upper
        for r, s in enumerate(problem.senses):
            if s is Sense.LE:
                lower[n + r], upper[n + r] = 0.0, np.inf
            elif s is Sense.GE:
                lower[n + r], upper[n + r] = -np.inf, 0.0
            else:
                lower[n + r] = upper[n + r] = 0.0
        self.lower, self.upper = lower, upper

        self.T = W.copy()
        self.rhs_col = problem.rhs.astype(float).copy()
        self.val = np.zeros(N)
        self.vstat = np.full(N, int(ColStatus.AT_LOWER), dtype=np.int8)
        self.basis = np.zeros(m, dtype=np.int64)
        self.phase1_cost = np.zeros(N)
        self._phase1_done = False
        self._feasible = False
        self._bland = False
        self._degen_run = 0
        self._since_refresh = 0
        self._init_basis()

    # -- setup ---------------------------------------------------------------

    def _init_basis(self):
        n, m = self.nstruct, self.m
        val, vstat = self.val, self.vstat
        for j in range(n):
            lo, up = self.lower[j], self.upper[j]
            if np.isfinite(lo):
                val[j], vstat[j] = lo, ColStatus.AT_LOWER
            elif np.isfinite(up):
                val[j], vstat[j] = up, ColStatus.AT_UPPER
            else:
                val[j], vstat[j] = 0.0, ColStatus.FREE
        resid = self.rhs_col - self.W[:, :n] @ val[:n] if m else np.zeros(0)
        for r in range(m):
            s_col, a_col = n + r, n + m + r
            x = resid[r]
            lo_s, up_s = self.lower[s_col], self.upper[s_col]
            if lo_s - 1e-12 <= x <= up_s + 1e-12:
                # slack absorbs the residual, artificial stays pinned at zero
                self.basis[r] = s_col
                vstat[s_col] = ColStatus.BASIC
                val[s_col] = min(max(x, lo_s), up_s) if np.isfinite(lo_s) and np.isfinite(up_s) else x
                self.lower[a_col] = self.upper[a_col] = 0.0
                val[a_col], vstat[a_col] = 0.0, ColStatus.AT_LOWER
            else:
                # slack parks at the violated (finite) bound, artificial is basic
                sb = up_s if x > up_s else lo_s
                val[s_col] = sb
                vstat[s_col] = ColStatus.AT_UPPER if sb == up_s else ColStatus.AT_LOWER
                a_val = x - sb
                self.basis[r] = a_col
                vstat[a_col] = ColStatus.BASIC
                val[a_col] = a_val
                if a_val >= 0:
                    self.lower[a_col], self.upper[a_col] = 0.0, np.inf
                    self.phase1_cost[a_col] = 1.0
                else:
                    self.lower[a_col], self.upper[a_col] = -np.inf, 0.0
                    self.phase1_cost[a_col] = -1.0

    # -- core ----------------------------------------------------------------

    def _refresh(self, cost: np.ndarray) -> np.ndarray:
        if self.m:
            vnb = self.val.copy()
            vnb[self.basis] = 0.0
            self.val[self.basis] = self.rhs_col - self.T @ vnb
            d = cost - cost[self.basis] @ self.T
        else:
            d = cost.copy()
        self._since_refresh = 0
        return d

    def _optimize(self, cost: np.ndarray, phase1: bool) -> LpStatus:
        m, n, N = self.m, self.nstruct, self.N
        T, val, vstat = self.T, self.val, self.vstat
        d = self._refresh(cost)
        max_pivots = 10000 + 200 * (m + n)
        pivots = 0
        while True:
            if self._since_refresh >= _REFRESH_EVERY:
                d = self._refresh(cost)
            fixed = self.lower == self.upper
            basic = vstat == ColStatus.BASIC
            can_up = (vstat == ColStatus.AT_LOWER) | (vstat == ColStatus.FREE)
            can_dn = (vstat == ColStatus.AT_UPPER) | (vstat == ColStatus.FREE)
            score = np.maximum(np.where(can_up, -d, 0.0), np.where(can_dn, d, 0.0))
            score[fixed | basic] = 0.0
            if self._bland:
                viol = np.flatnonzero(score > COST_TOL)
                if viol.size == 0:
                    return LpStatus.OPTIMAL
                j = int(viol[0])
            else:
                j = int(np.argmax(score))
                if score[j] <= COST_TOL:
                    return LpStatus.OPTIMAL
            if vstat[j] == ColStatus.AT_LOWER:
                sigma = 1.0
            elif vstat[j] == ColStatus.AT_UPPER:
                sigma = -1.0
            else:
                sigma = 1.0 if d[j] < 0 else -1.0

            col = T[:, j].copy() if m else np.zeros(0)
            delta = sigma * col
            if m:
                vb = val[self.basis]
                lob = self.lower[self.basis]
                upb = self.upper[self.basis]
                limits = np.full(m, np.inf)
                pos = delta > 1e-11
                neg = delta < -1e-11
                with np.errstate(invalid="ignore"):
                    limits[pos] = (vb[pos] - lob[pos]) / delta[pos]
                    limits[neg] = (upb[neg] - vb[neg]) / (-delta[neg])
                np.maximum(limits, 0.0, out=limits)
                t_row = float(limits.min()) if m else np.inf
            else:
                limits = np.zeros(0)
                t_row = np.inf
            rng_j = self.upper[j] - self.lower[j]
            t_bnd = rng_j if np.isfinite(rng_j) else np.inf
            t = min(t_row, t_bnd)
            if not np.isfinite(t):
                if phase1:
                    raise SolverFailure("phase 1 claims an unbounded direction")
                return LpStatus.UNBOUNDED

            if t <= DEGEN_TOL:
                self._degen_run += 1
                if self._degen_run > 10 * (m + n):
                    self._bland = True
            else:
                self._degen_run = 0

            if t_bnd <= t_row:
                # bound flip: no basis change
                if m:
                    val[self.basis] -= t_bnd * delta
                val[j] = self.upper[j] if vstat[j] == ColStatus.AT_LOWER else self.lower[j]
                vstat[j] = ColStatus.AT_UPPER if vstat[j] == ColStatus.AT_LOWER else ColStatus.AT_LOWER
            else:
                cands = np.flatnonzero(limits <= t + DEGEN_TOL)
                good = cands[np.abs(delta[cands]) >= PIVOT_TOL]
                if good.size:
                    r = int(good[np.argmin(self.basis[good])])
                else:
                    r = int(cands[np.argmax(np.abs(delta[cands]))])
                step = sigma * t
                val[self.basis] -= step * col
                val[j] += step
                k = int(self.basis[r])
                if delta[r] > 0:
                    val[k], vstat[k] = self.lower[k], ColStatus.AT_LOWER
                else:
                    val[k], vstat[k] = self.upper[k], ColStatus.AT_UPPER
                piv = T[r, j]
                colv = col.copy()
                colv[r] = 0.0
                T[r] /= piv
                self.rhs_col[r] /= piv
                T -= np.outer(colv, T[r])
                self.rhs_col -= colv * self.rhs_col[r]
                dj = d[j]
                d -= dj * T[r]
                d[j] = 0.0
                self.basis[r] = j
                vstat[j] = ColStatus.BASIC

            pivots += 1
            self._since_refresh += 1
            if pivots > max_pivots:
                raise SolverFailure(f"pivot limit exceeded ({max_pivots})")

    def ensure_phase1(self) -> bool:
        """Run phase 1 once; True when the constraint system is feasible."""
        if self._phase1_done:
            return self._feasible
        status = self._optimize(self.phase1_cost, phase1=True)
        if status is not LpStatus.OPTIMAL:
            raise SolverFailure("phase 1 ended in a non-optimal state")
        self._refresh(self.phase1_cost)
        obj1 = float(self.phase1_cost @ self.val)
        self._phase1_done = True
        self._feasible = obj1 <= FEAS_TOL
        if self._feasible:
            arts = slice(self.nstruct + self.m, self.N)
            self.lower[arts] = 0.0
            self.upper[arts] = 0.0
            self.val[arts] = 0.0
            self.phase1_cost[arts] = 0.0
        return self._feasible

    def resolve(self, objective: np.ndarray, maximize: bool = False) -> LpSolution:
        """Phase 2 with a fresh objective over the structural columns."""
        if not self.ensure_phase1():
            return LpSolution(LpStatus.INFEASIBLE, None, None, None)
        c_user = np.asarray(objective, dtype=float).reshape(-1)
        if c_user.shape != (self.nstruct,):
            raise DimensionMismatch("objective length does not match column count")
        cost = np.zeros(self.N)
        cost[: self.nstruct] = -c_user if maximize else c_user
        status = self._optimize(cost, phase1=False)
        x = self._snapped_x()
        cstat = self.vstat[: self.nstruct].copy()
        if status is LpStatus.OPTIMAL:
            return LpSolution(LpStatus.OPTIMAL, x, float(c_user @ x), cstat, is_vertex=True)
        return LpSolution(LpStatus.UNBOUNDED, x, None, cstat, is_vertex=False)

    def solve(self) -> LpSolution:
        return self.resolve(self.problem.objective, self.problem.maximize)

    def _snapped_x(self) -> np.ndarray:
        x = self.val[: self.nstruct].copy()
        lo, up = self.problem.lower, self.problem.upper
        hit = np.isfinite(lo) & (np.abs(x - lo) <= 1e-9)
        x[hit] = lo[hit]
        hit = np.isfinite(up) & (np.abs(x - up) <= 1e-9)
        x[hit] = up[hit]
        return x


def solve_lp(problem: LpProblem) -> LpSolution:
    return SimplexSolver(problem).solve()


def lift(instance: MixedBinaryInstance, x_tilde, tol: float = 1e-9) -> Optional[MixedPoint]:
    """A full point (x_tilde, y) of the instance, or None when none exists.

    For d = 0 this is a direct row check; otherwise a feasibility LP in the
    continuous columns with the binary part fixed.
    """
    norm = normalize(instance)
    x = np.asarray(x_tilde, dtype=float).reshape(-1)
    if x.shape != (instance.n,):
        raise DimensionMismatch("binary point length does not match instance")
    A, B, _, b = dense_rows(norm)
    resid = b - A @ x if norm.m else np.zeros(0)
    if instance.d == 0:
        if np.all(resid >= -tol):
            return MixedPoint(x.copy(), np.zeros(0))
        return None
    problem = LpProblem(
        coeffs=B,
        senses=[Sense.LE] * norm.m,
        rhs=resid,
        objective=np.zeros(instance.d),
        lower=np.full(instance.d, -np.inf),
        upper=np.full(instance.d, np.inf),
    )
    sol = solve_lp(problem)
    if sol.status is LpStatus.OPTIMAL:
        return MixedPoint(x.copy(), sol.x)
    return None
