"""Linear-programming wrapper: statuses, certificates, duality."""

import numpy as np
import pytest

from monogamy.lp import LinearProgram, LpStatus, constraint_residual, feasibility, solve


def test_bounded_maximum():
    out = solve(LinearProgram(np.array([1.0]), ub_lhs=[[1.0]], ub_rhs=[3.0]))
    assert out.status == LpStatus.OPTIMAL
    assert out.value == pytest.approx(3.0, abs=1e-9)


def test_infeasible_with_violation_certificate():
    # x <= -1 against the default bound x >= 0.
    out = solve(LinearProgram(np.array([1.0]), ub_lhs=[[1.0]], ub_rhs=[-1.0]))
    assert out.status == LpStatus.INFEASIBLE
    assert out.violation == pytest.approx(1.0, abs=1e-7)


def test_unbounded():
    out = solve(LinearProgram(np.array([1.0])))
    assert out.status == LpStatus.UNBOUNDED


def test_feasibility_simplex():
    eq = (np.ones((1, 4)), np.array([1.0]))
    out = feasibility(eq=eq)
    assert out.status == LpStatus.OPTIMAL
    assert out.x.sum() == pytest.approx(1.0, abs=1e-9)
    assert np.all(out.x >= -1e-12)


def test_feasibility_contradictory_sums():
    eq = (np.vstack([np.ones(4), np.ones(4)]), np.array([1.0, 2.0]))
    out = feasibility(eq=eq)
    assert out.status == LpStatus.INFEASIBLE
    assert out.violation >= 1.0 - 1e-9


def test_feasibility_empty_constraints():
    out = feasibility(n_variables=3)
    assert out.status == LpStatus.OPTIMAL
    assert np.all(out.x >= -1e-12)


def test_malformed_rows_rejected():
    with pytest.raises(ValueError):
        LinearProgram(np.array([1.0, 2.0]), eq_lhs=[[1.0]], eq_rhs=[1.0])
    with pytest.raises(ValueError):
        LinearProgram(np.array([np.inf]))


def test_optimal_solutions_reverified(rng):
    for _ in range(20):
        n, m = 6, 4
        a = rng.standard_normal((m, n))
        b = rng.random(m) + 0.5
        c = rng.standard_normal(n)
        cap = np.vstack([a, np.ones(n)])
        rhs = np.concatenate([b, [10.0]])
        program = LinearProgram(c, ub_lhs=cap, ub_rhs=rhs)
        out = solve(program)
        assert out.status == LpStatus.OPTIMAL
        assert out.max_residual <= 10 * 1e-7
        assert constraint_residual(program, out.x) <= 1e-6


def test_deterministic_repeat():
    program = LinearProgram(
        np.array([1.0, 2.0, 0.5]),
        ub_lhs=[[1.0, 1.0, 1.0], [2.0, 0.5, 1.0]],
        ub_rhs=[4.0, 3.0],
    )
    first = solve(program)
    second = solve(program)
    assert first.status == second.status
    assert first.value == second.value
    assert np.array_equal(first.x, second.x)


def test_duality_spot_check(rng):
    # Primal: max c.x, A x <= b, x >= 0.  Dual (built here, not by the
    # solver): min b.y, A^T y >= c, y >= 0.
    for _ in range(25):
        n, m = 5, 7
        a = rng.random((m, n))
        b = rng.random(m) + 0.5
        c = rng.random(n)
        primal = solve(LinearProgram(c, ub_lhs=a, ub_rhs=b))
        assert primal.status == LpStatus.OPTIMAL
        dual = solve(
            LinearProgram(-b, ub_lhs=-a.T, ub_rhs=-c)
        )
        assert dual.status == LpStatus.OPTIMAL
        assert primal.value == pytest.approx(-dual.value, abs=1e-6)
