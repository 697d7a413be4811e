"""Dense linear programming used by the polytope and shareability tests.

Solves are delegated to HiGHS via scipy; feasibility questions go through an
explicit elastic phase-one program so that infeasible systems come back with
the minimized total (L1) constraint violation as a certificate value rather
than a bare status.  Every optimal solution is re-verified by independent
constraint evaluation before it is returned.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

FEASIBILITY_TOL = 1e-7


class LpStatus(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    FAILED = "failed"


Bound = tuple[float | None, float | None]


@dataclass(frozen=True, eq=False)
class LinearProgram:
    """Maximize ``objective @ x`` subject to equalities, inequalities
    (rows mean ``a @ x <= rhs``), and per-variable bounds (default x >= 0)."""

    objective: np.ndarray
    eq_lhs: np.ndarray | None = None
    eq_rhs: np.ndarray | None = None
    ub_lhs: np.ndarray | None = None
    ub_rhs: np.ndarray | None = None
    bounds: list[Bound] | None = None

    def __post_init__(self):
        obj = np.atleast_1d(np.asarray(self.objective, dtype=float))
        object.__setattr__(self, "objective", obj)
        n = obj.size
        for name in ("eq", "ub"):
            lhs = getattr(self, f"{name}_lhs")
            rhs = getattr(self, f"{name}_rhs")
            if (lhs is None) != (rhs is None):
                raise ValueError(f"{name} constraints need both sides")
            if lhs is not None:
                lhs = np.atleast_2d(np.asarray(lhs, dtype=float))
                rhs = np.atleast_1d(np.asarray(rhs, dtype=float))
                if lhs.shape != (rhs.size, n):
                    raise ValueError(
                        f"{name} constraint matrix must be (rows, {n})"
                    )
                if not (np.all(np.isfinite(lhs)) and np.all(np.isfinite(rhs))):
                    raise ValueError(f"{name} constraints must be finite")
                object.__setattr__(self, f"{name}_lhs", lhs)
                object.__setattr__(self, f"{name}_rhs", rhs)
        if not np.all(np.isfinite(obj)):
            raise ValueError("objective must be finite")
        if self.bounds is not None and len(self.bounds) != n:
            raise ValueError("need one bound pair per variable")

    @property
    def n_variables(self) -> int:
        return self.objective.size

    def effective_bounds(self) -> list[Bound]:
        if self.bounds is None:
            return [(0.0, None)] * self.n_variables
        return list(self.bounds)


@dataclass(frozen=True, eq=False)
class LpOutcome:
    status: LpStatus
    x: np.ndarray | None = None
    value: float | None = None
    max_residual: float = 0.0
    # Minimized total L1 constraint violation; positive only when infeasible.
    violation: float = 0.0
    message: str = ""


def constraint_residual(lp: LinearProgram, x: np.ndarray) -> float:
    """Largest violation of any constraint or bound at ``x``."""
    res = 0.0
    if lp.eq_lhs is not None:
        res = max(res, float(np.max(np.abs(lp.eq_lhs @ x - lp.eq_rhs))))
    if lp.ub_lhs is not None:
        res = max(res, float(max(0.0, np.max(lp.ub_lhs @ x - lp.ub_rhs))))
    for xi, (lo, hi) in zip(x, lp.effective_bounds()):
        if lo is not None:
            res = max(res, lo - xi)
        if hi is not None:
            res = max(res, xi - hi)
    return float(res)


def solve(lp: LinearProgram, tol: float = FEASIBILITY_TOL) -> LpOutcome:
    """Maximize the objective; statuses are Optimal / Infeasible / Unbounded,
    with numerical breakdowns reported as a distinct Failed status."""
    result = linprog(
        -lp.objective,
        A_ub=lp.ub_lhs,
        b_ub=lp.ub_rhs,
        A_eq=lp.eq_lhs,
        b_eq=lp.eq_rhs,
        bounds=lp.effective_bounds(),
        method="highs",
    )
    if result.status == 0:
        x = np.asarray(result.x, dtype=float)
        residual = constraint_residual(lp, x)
        if residual > 10 * tol:
            return LpOutcome(
                LpStatus.FAILED,
                x=x,
                max_residual=residual,
                message=f"solution residual {residual:.3e} exceeds 10*tol",
            )
        return LpOutcome(
            LpStatus.OPTIMAL,
            x=x,
            value=float(lp.objective @ x),
            max_residual=residual,
        )
    if result.status == 2:
        # Confirm with the elastic phase-one so callers get a violation score.
        phase1 = feasibility(
            eq=(lp.eq_lhs, lp.eq_rhs) if lp.eq_lhs is not None else None,
            ub=(lp.ub_lhs, lp.ub_rhs) if lp.ub_lhs is not None else None,
            bounds=lp.bounds,
            n_variables=lp.n_variables,
            tol=tol,
        )
        if phase1.status == LpStatus.OPTIMAL:
            return LpOutcome(
                LpStatus.FAILED,
                message="solver reported infeasible but phase-one found a point",
            )
        return phase1
    if result.status == 3:
        return LpOutcome(LpStatus.UNBOUNDED, message=result.message)
    return LpOutcome(LpStatus.FAILED, message=result.message)


def feasibility(
    eq: tuple[np.ndarray, np.ndarray] | None = None,
    ub: tuple[np.ndarray, np.ndarray] | None = None,
    bounds: list[Bound] | None = None,
    n_variables: int | None = None,
    tol: float = FEASIBILITY_TOL,
) -> LpOutcome:
    """Phase-one only: find a point satisfying the constraints and bounds.

    Elastic slacks are added to every equality (two-sided) and inequality
    (one-sided) row and their total is minimized; bounds stay hard.  An
    optimum above ``tol`` means Infeasible, and that optimum is returned as
    the violation certificate.
    """
    if eq is None and ub is None and n_variables is None:
        raise ValueError("cannot infer the number of variables")
    if n_variables is None:
        n_variables = (eq[0].shape[1] if eq is not None else ub[0].shape[1])
    n = int(n_variables)

    eq_lhs = np.asarray(eq[0], dtype=float) if eq is not None else np.zeros((0, n))
    eq_rhs = np.asarray(eq[1], dtype=float) if eq is not None else np.zeros(0)
    ub_lhs = np.asarray(ub[0], dtype=float) if ub is not None else np.zeros((0, n))
    ub_rhs = np.asarray(ub[1], dtype=float) if ub is not None else np.zeros(0)
    m_eq, m_ub = eq_rhs.size, ub_rhs.size

    # Variables: [x, s_plus, s_minus, s_ub], all slack blocks >= 0.
    cost = np.concatenate([
        np.zeros(n), np.ones(m_eq), np.ones(m_eq), np.ones(m_ub)
    ])
    a_eq = np.hstack([
        eq_lhs, np.eye(m_eq), -np.eye(m_eq), np.zeros((m_eq, m_ub))
    ]) if m_eq else None
    a_ub = np.hstack(
        [ub_lhs, np.zeros((m_ub, 2 * m_eq)), -np.eye(m_ub)]
    ) if m_ub else None
    var_bounds = (bounds if bounds is not None else [(0.0, None)] * n)
    var_bounds = list(var_bounds) + [(0.0, None)] * (2 * m_eq + m_ub)

    result = linprog(
        cost,
        A_ub=a_ub,
        b_ub=ub_rhs if m_ub else None,
        A_eq=a_eq,
        b_eq=eq_rhs if m_eq else None,
        bounds=var_bounds,
        method="highs",
    )
    if result.status != 0:
        return LpOutcome(
            LpStatus.FAILED,
            message=f"elastic phase-one did not solve: {result.message}",
        )
    total_violation = float(result.fun)
    x = np.asarray(result.x[:n], dtype=float)
    if total_violation > tol:
        return LpOutcome(
            LpStatus.INFEASIBLE,
            violation=total_violation,
            message=f"minimum total violation {total_violation:.3e}",
        )
    check = LinearProgram(
        np.zeros(n),
        eq_lhs=eq_lhs if m_eq else None,
        eq_rhs=eq_rhs if m_eq else None,
        ub_lhs=ub_lhs if m_ub else None,
        ub_rhs=ub_rhs if m_ub else None,
        bounds=bounds,
    )
    residual = constraint_residual(check, x)
    return LpOutcome(LpStatus.OPTIMAL, x=x, value=0.0, max_residual=residual)
