"""Trade-off inequalities between overlapping Bell values, polytope support
sweeps, and violation searches.

Conventions: in a three-party scenario a = party 0, b = party 1, c = party 2;
the two CHSH values chsh_ab and chsh_ac share party a's settings, which is
what creates the trade-offs.  All searches are deterministic given the
caller's random generator.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from . import lp
from .bell import BellFunctional, collins_gisin
from .bell import chsh_value as _behavior_chsh
from .localpoly import deterministic_strategies
from .model import (
    Behavior,
    Scenario,
    correlator,
    flat_index,
    marginal_behavior,
    no_signalling_constraints,
    normalization_constraints,
)
from .quantum import (
    SIGMA_Y,
    DensityMatrix,
    cg_state,
    planar_observable,
    tensor,
)

TSIRELSON = 2.0 * math.sqrt(2.0)
DEFAULT_CHECK_TOL = 1e-9

_CHSH_WEIGHTS = np.array([[1.0, 1.0], [1.0, -1.0]])


def _thread_cap() -> int:
    value = os.environ.get("MONOGAMY_THREADS", "")
    try:
        return max(1, int(value))
    except ValueError:
        return 1


def _grid_map(fn, items):
    """Apply fn over grid items, optionally on a thread pool; results keep
    the grid order regardless of worker count."""
    workers = _thread_cap()
    if workers == 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# Points and check reports
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TradeoffPoint:
    """A pair or triple of CHSH values with optional context scalars.

    ``sigma_y`` holds per-party sigma_y expectations, ``corr_ac`` the plain
    a-c correlator at the first settings.
    """

    chsh_ab: float
    chsh_ac: float
    chsh_bc: float | None = None
    sigma_y: tuple[float, float, float] | None = None
    corr_ac: float | None = None

    def __post_init__(self):
        values = [self.chsh_ab, self.chsh_ac]
        if self.chsh_bc is not None:
            values.append(self.chsh_bc)
        for v in values:
            if not math.isfinite(v):
                raise ValueError("CHSH values must be finite")
            if abs(v) > 4.0 + 1e-9:
                raise ValueError(f"CHSH value {v} outside [-4, 4]")


@dataclass(frozen=True)
class CheckReport:
    """One inequality evaluation: passes iff slack = bound - lhs >= -tol."""

    inequality: str
    lhs: float
    bound: float
    slack: float
    passed: bool


@dataclass(frozen=True)
class TripleReport:
    """Three-value trade-off bundle.

    ``main`` is the sigma_y-weighted bound on the sum of the three squared
    CHSH values; ``cylinders`` are the three pairwise square bounds; the
    naive flat bound of 8 on the squared sum is reported as well because it
    is a documented non-theorem (product states reach 12).
    """

    main: CheckReport
    cylinders: tuple[CheckReport, CheckReport, CheckReport]
    naive_lhs: float
    naive_bound: float
    naive_holds: bool


def _report(inequality: str, lhs: float, bound: float, tol: float) -> CheckReport:
    slack = bound - lhs
    return CheckReport(inequality, float(lhs), float(bound), float(slack), slack >= -tol)


def check_ns_tradeoff(p: TradeoffPoint, tol: float = DEFAULT_CHECK_TOL) -> CheckReport:
    """No-signalling trade-off: |chsh_ab| + |chsh_ac| <= 4."""
    return _report("NS-13", abs(p.chsh_ab) + abs(p.chsh_ac), 4.0, tol)


def check_tv_tradeoff(p: TradeoffPoint, tol: float = DEFAULT_CHECK_TOL) -> CheckReport:
    """Quantum trade-off: chsh_ab^2 + chsh_ac^2 <= 8."""
    return _report("TV-14", p.chsh_ab ** 2 + p.chsh_ac ** 2, 8.0, tol)


def check_strengthened(p: TradeoffPoint, tol: float = DEFAULT_CHECK_TOL) -> CheckReport:
    """Strengthened quantum trade-off:
    chsh_ab^2 + chsh_ac^2 <= 8 (1 - <sigma_y>_a^2)."""
    if p.sigma_y is None:
        raise ValueError("the strengthened check needs sigma_y context scalars")
    sy_a = p.sigma_y[0]
    return _report(
        "STRONG-21", p.chsh_ab ** 2 + p.chsh_ac ** 2, 8.0 * (1.0 - sy_a ** 2), tol
    )


def check_triple(p: TradeoffPoint, tol: float = DEFAULT_CHECK_TOL) -> TripleReport:
    """Trade-off for all three pair CHSH values.

    Main bound: sum of squares <= 12 - 4 (sum of squared sigma_y
    expectations); whether it is attainable everywhere is open, so only the
    inequality direction is checked.
    """
    if p.chsh_bc is None:
        raise ValueError("the triple check needs chsh_bc")
    if p.sigma_y is None:
        raise ValueError("the triple check needs sigma_y context scalars")
    squares = (p.chsh_ab ** 2, p.chsh_ac ** 2, p.chsh_bc ** 2)
    lhs = sum(squares)
    sy_sq = sum(v ** 2 for v in p.sigma_y)
    main = _report("TRIPLE-25", lhs, 12.0 - 4.0 * sy_sq, tol)
    cylinders = (
        _report("TV-14", squares[0] + squares[1], 8.0, tol),
        _report("TV-14", squares[0] + squares[2], 8.0, tol),
        _report("TV-14", squares[1] + squares[2], 8.0, tol),
    )
    return TripleReport(
        main=main,
        cylinders=cylinders,
        naive_lhs=float(lhs),
        naive_bound=8.0,
        naive_holds=lhs <= 8.0 + tol,
    )


def check_key_corollary(
    chsh_ab: float, corr_ac: float, tol: float = DEFAULT_CHECK_TOL
) -> CheckReport:
    """Key-rate corollary: chsh_ab^2 + 4 <AC>^2 <= 8."""
    return _report("KEY-31", chsh_ab ** 2 + 4.0 * corr_ac ** 2, 8.0, tol)


def report_to_json_dict(report: CheckReport) -> dict:
    return {
        "inequality": report.inequality,
        "lhs": report.lhs,
        "bound": report.bound,
        "slack": report.slack,
        "passed": report.passed,
    }


def behavior_checks(b: Behavior, tol: float = DEFAULT_CHECK_TOL) -> list[CheckReport]:
    """Trade-off checks derivable from a three-party behavior alone.

    The no-signalling and quantum pair bounds apply directly; the key-rate
    corollary uses the plain a-c correlator at the first settings.  Bounds
    that need state context (sigma_y expectations) are not evaluated here.
    """
    point = pair_values(b)
    corr_ac = correlator(marginal_behavior(b, (0, 2), (0, 0, 0)), (0, 0))
    return [
        check_ns_tradeoff(point, tol),
        check_tv_tradeoff(point, tol),
        check_key_corollary(point.chsh_ab, corr_ac, tol),
    ]


# ---------------------------------------------------------------------------
# Pair values from behaviors and quantum states
# ---------------------------------------------------------------------------

def triple_scenario() -> Scenario:
    return Scenario(3, (2, 2, 2), (2, 2, 2))


def pair_values(b: Behavior) -> TradeoffPoint:
    """CHSH on the (a, b) and (a, c) marginals of a three-party behavior,
    with party a's settings shared between the two evaluations."""
    s = b.scenario
    if s.parties != 3 or s.settings != (2, 2, 2) or not s.is_dichotomic():
        raise ValueError("pair values need a 3-party, 2-setting, 2-outcome behavior")
    fill = (0, 0, 0)
    ab = _behavior_chsh(marginal_behavior(b, (0, 1), fill))
    ac = _behavior_chsh(marginal_behavior(b, (0, 2), fill))
    return TradeoffPoint(chsh_ab=ab, chsh_ac=ac)


def triple_values(b: Behavior) -> TradeoffPoint:
    """Pair values plus CHSH on the (b, c) marginal."""
    p = pair_values(b)
    bc = _behavior_chsh(marginal_behavior(b, (1, 2), (0, 0, 0)))
    return TradeoffPoint(chsh_ab=p.chsh_ab, chsh_ac=p.chsh_ac, chsh_bc=bc)


def chsh_operator(angles_1: tuple[float, float], angles_2: tuple[float, float]) -> np.ndarray:
    """Two-qubit CHSH operator for planar observables at the given angles."""
    ops_1 = [planar_observable(a) for a in angles_1]
    ops_2 = [planar_observable(a) for a in angles_2]
    out = np.zeros((4, 4), dtype=complex)
    for x in range(2):
        for y in range(2):
            out += _CHSH_WEIGHTS[x, y] * tensor(ops_1[x], ops_2[y])
    return out


def _pure_vector(rho: DensityMatrix) -> np.ndarray:
    values, vectors = np.linalg.eigh(rho.matrix)
    if values[-1] < 1.0 - 1e-9:
        raise ValueError("state is not pure")
    return vectors[:, -1]


def _pair_density(t: np.ndarray, pair: tuple[int, int]) -> np.ndarray:
    """4x4 reduced matrix of two qubits of a pure 3-qubit tensor (no
    validation; hot path for sweeps)."""
    keep = sorted(pair)
    drop = [q for q in range(3) if q not in keep][0]
    spec = {2: "abc,xyc->abxy", 1: "abc,xbz->acxz", 0: "abc,ayz->bcyz"}[drop]
    reduced = np.einsum(spec, t, t.conj())
    return reduced.reshape(4, 4)


def _single_density(t: np.ndarray, qubit: int) -> np.ndarray:
    spec = {0: "abc,xbc->ax", 1: "abc,ayc->by", 2: "abc,abz->cz"}[qubit]
    return np.einsum(spec, t, t.conj())


def state_pair_point(
    psi: DensityMatrix | np.ndarray,
    a_angles: tuple[float, float],
    b_angles: tuple[float, float],
    c_angles: tuple[float, float],
) -> TradeoffPoint:
    """All trade-off data of a pure 3-qubit state under planar measurements.

    Party a's two angles are shared by every pair value.  Fills the three
    CHSH values, per-party sigma_y expectations, and the plain a-c
    correlator at the first settings.
    """
    if isinstance(psi, DensityMatrix):
        vec = _pure_vector(psi)
    else:
        vec = np.asarray(psi, dtype=complex).reshape(-1)
        vec = vec / np.linalg.norm(vec)
    if vec.size != 8:
        raise ValueError("state must be a pure 3-qubit state")
    t = vec.reshape(2, 2, 2)

    rho_ab = _pair_density(t, (0, 1))
    rho_ac = _pair_density(t, (0, 2))
    rho_bc = _pair_density(t, (1, 2))
    ab = float(np.trace(chsh_operator(a_angles, b_angles) @ rho_ab).real)
    ac = float(np.trace(chsh_operator(a_angles, c_angles) @ rho_ac).real)
    bc = float(np.trace(chsh_operator(b_angles, c_angles) @ rho_bc).real)

    sigma_y = tuple(
        float(np.trace(SIGMA_Y @ _single_density(t, q)).real) for q in range(3)
    )
    corr_op = tensor(planar_observable(a_angles[0]), planar_observable(c_angles[0]))
    corr_ac = float(np.trace(corr_op @ rho_ac).real)
    return TradeoffPoint(
        chsh_ab=ab, chsh_ac=ac, chsh_bc=bc, sigma_y=sigma_y, corr_ac=corr_ac
    )


# ---------------------------------------------------------------------------
# Support functions over the correlation classes
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SupportPoint:
    theta: float
    value: float
    behavior: Behavior | None = None
    params: dict | None = None


def chsh_pair_objective(scenario: Scenario, pair: tuple[int, int], fixed: int = 0) -> np.ndarray:
    """Flattened-table coefficients of the CHSH value on one pair of parties,
    with the remaining parties' settings pinned (immaterial under the
    no-signalling equalities)."""
    p1, p2 = pair
    obj = np.zeros(scenario.table_size)
    for x in range(2):
        for y in range(2):
            w = _CHSH_WEIGHTS[x, y]
            ctx = [fixed] * scenario.parties
            ctx[p1], ctx[p2] = x, y
            for outs in scenario.outcome_tuples():
                sign = -1.0 if (outs[p1] + outs[p2]) % 2 else 1.0
                obj[flat_index(scenario, tuple(ctx), outs)] += w * sign
    return obj


def ns_maximum(
    scenario: Scenario, objective: np.ndarray, tol: float = lp.FEASIBILITY_TOL
) -> tuple[float, Behavior]:
    """Maximize a linear functional over the no-signalling polytope."""
    norm = normalization_constraints(scenario)
    ns = no_signalling_constraints(scenario)
    eq_lhs = np.vstack([norm[0], ns[0]])
    eq_rhs = np.concatenate([norm[1], ns[1]])
    outcome = lp.solve(lp.LinearProgram(objective, eq_lhs=eq_lhs, eq_rhs=eq_rhs), tol)
    if outcome.status != lp.LpStatus.OPTIMAL:
        raise RuntimeError(f"support LP failed: {outcome.status} {outcome.message}")
    table = np.clip(outcome.x.reshape(scenario.table_shape), 0.0, None)
    return float(outcome.value), Behavior(scenario, table)


def ns_support(thetas: np.ndarray, tol: float = lp.FEASIBILITY_TOL) -> list[SupportPoint]:
    """Support function of the no-signalling region in the
    (chsh_ab, chsh_ac) plane: per direction, the LP maximum of
    cos(theta) chsh_ab + sin(theta) chsh_ac."""
    scenario = triple_scenario()
    obj_ab = chsh_pair_objective(scenario, (0, 1))
    obj_ac = chsh_pair_objective(scenario, (0, 2))
    norm = normalization_constraints(scenario)
    ns = no_signalling_constraints(scenario)
    eq_lhs = np.vstack([norm[0], ns[0]])
    eq_rhs = np.concatenate([norm[1], ns[1]])

    def solve_theta(theta: float) -> SupportPoint:
        objective = math.cos(theta) * obj_ab + math.sin(theta) * obj_ac
        outcome = lp.solve(
            lp.LinearProgram(objective, eq_lhs=eq_lhs, eq_rhs=eq_rhs), tol
        )
        if outcome.status != lp.LpStatus.OPTIMAL:
            raise RuntimeError(f"support LP failed at theta={theta}")
        table = np.clip(outcome.x.reshape(scenario.table_shape), 0.0, None)
        return SupportPoint(float(theta), float(outcome.value), Behavior(scenario, table))

    return _grid_map(solve_theta, [float(t) for t in thetas])


def _local_vertex_values() -> tuple[list, np.ndarray, np.ndarray]:
    scenario = triple_scenario()
    strategies = deterministic_strategies(scenario)
    ab, ac = [], []
    for strat in strategies:
        point = pair_values(strat.to_behavior(scenario))
        ab.append(point.chsh_ab)
        ac.append(point.chsh_ac)
    return strategies, np.array(ab), np.array(ac)


def local_support(thetas: np.ndarray) -> list[SupportPoint]:
    """Support function of the local region: exact maximum over the
    deterministic-strategy vertices."""
    scenario = triple_scenario()
    strategies, ab, ac = _local_vertex_values()
    points = []
    for theta in thetas:
        values = math.cos(theta) * ab + math.sin(theta) * ac
        best = int(np.argmax(values))
        points.append(
            SupportPoint(
                float(theta),
                float(values[best]),
                strategies[best].to_behavior(scenario),
            )
        )
    return points


def _nelder_mead_max(objective, x0: np.ndarray, max_iter: int = 400) -> tuple[float, np.ndarray]:
    result = minimize(
        lambda x: -objective(x),
        x0,
        method="Nelder-Mead",
        options={"maxiter": max_iter, "xatol": 1e-9, "fatol": 1e-12},
    )
    return float(-result.fun), np.asarray(result.x)


def _quantum_direction_value(params: np.ndarray, cos_t: float, sin_t: float) -> float:
    state = params[:8] + 1j * params[8:16]
    norm = np.linalg.norm(state)
    if norm < 1e-8:
        return -1e6
    t = (state / norm).reshape(2, 2, 2)
    a_angles = (params[16], params[17])
    b_angles = (params[18], params[19])
    c_angles = (params[20], params[21])
    ab = np.trace(chsh_operator(a_angles, b_angles) @ _pair_density(t, (0, 1))).real
    ac = np.trace(chsh_operator(a_angles, c_angles) @ _pair_density(t, (0, 2))).real
    return float(cos_t * ab + sin_t * ac)


def _quantum_seeds() -> list[np.ndarray]:
    """Warm starts: the two maximally violating pair witnesses and every
    deterministic strategy realized as a product state with +-sigma_z
    angles."""
    seeds = []

    def pack(state8: np.ndarray, a, b, c) -> np.ndarray:
        return np.concatenate([state8.real, state8.imag, a, b, c])

    bell_ab = np.zeros(8)
    bell_ab[0b000] = bell_ab[0b110] = 1 / math.sqrt(2)
    seeds.append(pack(bell_ab, [0, math.pi / 2], [math.pi / 4, -math.pi / 4],
                      [math.pi / 2, math.pi / 2]))
    bell_ac = np.zeros(8)
    bell_ac[0b000] = bell_ac[0b101] = 1 / math.sqrt(2)
    seeds.append(pack(bell_ac, [0, math.pi / 2], [math.pi / 2, math.pi / 2],
                      [math.pi / 4, -math.pi / 4]))

    scenario = triple_scenario()
    zero_state = np.zeros(8)
    zero_state[0] = 1.0
    for strat in deterministic_strategies(scenario):
        angles = []
        for p in range(3):
            angles.append([
                math.pi / 2 if strat.assignment[p][x] == 0 else -math.pi / 2
                for x in range(2)
            ])
        seeds.append(pack(zero_state, *angles))
    return seeds


def quantum_boundary_search(
    thetas: np.ndarray, restarts: int, rng: np.random.Generator
) -> list[SupportPoint]:
    """Lower bound on the quantum support function by multi-start simplex
    search over pure 3-qubit states and planar angles (a's settings shared).

    Values are reported as found and never exceed 2*sqrt(2) within 1e-9.
    """
    seeds = _quantum_seeds()
    points = []
    for theta in thetas:
        cos_t, sin_t = math.cos(theta), math.sin(theta)

        def objective(x, c=cos_t, s=sin_t):
            return _quantum_direction_value(x, c, s)

        seed_values = [(objective(s), s) for s in seeds]
        seed_values.sort(key=lambda pair: -pair[0])
        best_value, best_x = seed_values[0]
        starts = [s for _, s in seed_values[:3]]
        for _ in range(restarts):
            x0 = np.concatenate([
                rng.standard_normal(16),
                rng.uniform(-math.pi, math.pi, 6),
            ])
            starts.append(x0)
        for x0 in starts:
            value, x = _nelder_mead_max(objective, x0)
            if value > best_value:
                best_value, best_x = value, x
        if best_value > TSIRELSON + 1e-9:
            raise RuntimeError(
                f"quantum search exceeded the Tsirelson ceiling: {best_value}"
            )
        points.append(
            SupportPoint(
                float(theta),
                float(best_value),
                params={"x": np.asarray(best_x)},
            )
        )
    return points


def _separable_orthogonal_pair(beta_1: float, beta_2: float) -> float:
    """CHSH of a planar product state with sigma_x / sigma_z settings on
    both sides; <sigma_x> = sin(beta), <sigma_z> = cos(beta)."""
    u1 = (math.sin(beta_1), math.cos(beta_1))
    u2 = (math.sin(beta_2), math.cos(beta_2))
    return (
        u1[0] * u2[0] + u1[0] * u2[1] + u1[1] * u2[0] - u1[1] * u2[1]
    )


def separable_orthogonal_max(restarts: int, rng: np.random.Generator) -> float:
    """Numerical maximum of |CHSH| over product two-qubit states with fixed
    orthogonal sigma_x / sigma_z settings on both sides."""
    best = 0.0
    for sign in (1.0, -1.0):
        def objective(x, s=sign):
            return s * _separable_orthogonal_pair(x[0], x[1])

        for _ in range(restarts):
            x0 = rng.uniform(-math.pi, math.pi, 2)
            value, _ = _nelder_mead_max(objective, x0)
            best = max(best, value)
    return best


def separable_orthogonal_support(
    thetas: np.ndarray, restarts: int, rng: np.random.Generator
) -> list[SupportPoint]:
    """Support trace of the product-state region under orthogonal settings:
    per direction, maximize over planar Bloch angles of three product
    qubits."""
    points = []
    for theta in thetas:
        cos_t, sin_t = math.cos(theta), math.sin(theta)

        def objective(x, c=cos_t, s=sin_t):
            ab = _separable_orthogonal_pair(x[0], x[1])
            ac = _separable_orthogonal_pair(x[0], x[2])
            return c * ab + s * ac

        best = -np.inf
        for _ in range(restarts):
            x0 = rng.uniform(-math.pi, math.pi, 3)
            value, _ = _nelder_mead_max(objective, x0)
            best = max(best, value)
        points.append(SupportPoint(float(theta), float(best)))
    return points


SWEEP_CLASSES = ("local", "quantum", "ns", "separable-orthogonal")


def sweep(
    kind: str,
    grid: int,
    restarts: int,
    rng: np.random.Generator,
    tol: float = lp.FEASIBILITY_TOL,
) -> list[SupportPoint]:
    """Support-function trace of one correlation class over a full-circle
    theta grid."""
    thetas = np.linspace(0.0, 2.0 * math.pi, grid, endpoint=False)
    if kind == "local":
        return local_support(thetas)
    if kind == "quantum":
        return quantum_boundary_search(thetas, restarts, rng)
    if kind == "ns":
        return ns_support(thetas, tol)
    if kind == "separable-orthogonal":
        return separable_orthogonal_support(thetas, restarts, rng)
    raise ValueError(f"unknown sweep class '{kind}'")


# ---------------------------------------------------------------------------
# Double violation of the three-setting functional
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CgSearchResult:
    mu: float
    a_angles: tuple[float, float, float]
    b_angles: tuple[float, float, float]
    c_angles: tuple[float, float, float]
    value_ab: float
    value_ac: float

    @property
    def min_value(self) -> float:
        return min(self.value_ab, self.value_ac)


def cg_pair_value(
    rho_pair: np.ndarray,
    angles_1: tuple[float, float, float],
    angles_2: tuple[float, float, float],
    functional: BellFunctional,
) -> float:
    """Functional value on a two-qubit reduced state under planar angles."""
    ops_1 = [planar_observable(a) for a in angles_1]
    ops_2 = [planar_observable(a) for a in angles_2]
    rho_1 = rho_pair.reshape(2, 2, 2, 2).trace(axis1=1, axis2=3)
    rho_2 = rho_pair.reshape(2, 2, 2, 2).trace(axis1=0, axis2=2)
    value = 0.0
    for x in range(3):
        for y in range(3):
            w = functional.correlators[x, y]
            if w:
                value += w * np.trace(tensor(ops_1[x], ops_2[y]) @ rho_pair).real
    for x in range(3):
        if functional.marginals_a[x]:
            value += functional.marginals_a[x] * np.trace(ops_1[x] @ rho_1).real
    for y in range(3):
        if functional.marginals_b[y]:
            value += functional.marginals_b[y] * np.trace(ops_2[y] @ rho_2).real
    return float(value)


class _PlanarPairEvaluator:
    """Fast planar-angle evaluation of a two-party functional on a fixed
    two-qubit state: precomputes the x/z correlation matrix and local Bloch
    components so each call is a handful of flops."""

    def __init__(self, rho_pair: np.ndarray, functional: BellFunctional):
        paulis = (np.array([[0, 1], [1, 0]], dtype=complex),
                  np.array([[1, 0], [0, -1]], dtype=complex))
        rho = rho_pair.reshape(2, 2, 2, 2)
        rho_1 = rho.trace(axis1=1, axis2=3)
        rho_2 = rho.trace(axis1=0, axis2=2)
        self.corr = np.array([
            [np.trace(np.kron(p, q) @ rho_pair).real for q in paulis]
            for p in paulis
        ])
        self.bloch_1 = np.array([np.trace(p @ rho_1).real for p in paulis])
        self.bloch_2 = np.array([np.trace(p @ rho_2).real for p in paulis])
        self.functional = functional

    def value(self, angles_1: np.ndarray, angles_2: np.ndarray) -> float:
        u = np.stack([np.cos(angles_1), np.sin(angles_1)])  # 2 x n1
        v = np.stack([np.cos(angles_2), np.sin(angles_2)])  # 2 x n2
        pair_terms = u.T @ self.corr @ v
        value = float(np.sum(self.functional.correlators * pair_terms))
        value += float(self.functional.marginals_a @ (u.T @ self.bloch_1))
        value += float(self.functional.marginals_b @ (v.T @ self.bloch_2))
        return value


def cg_values_for_state(
    psi: DensityMatrix,
    a_angles: tuple[float, float, float],
    b_angles: tuple[float, float, float],
    c_angles: tuple[float, float, float],
) -> tuple[float, float]:
    """Three-setting functional values on the (a,b) and (a,c) reduced states
    of a pure 3-qubit state, with party a's angles shared."""
    functional = collins_gisin()
    vec = _pure_vector(psi)
    t = vec.reshape(2, 2, 2)
    value_ab = cg_pair_value(_pair_density(t, (0, 1)), a_angles, b_angles, functional)
    value_ac = cg_pair_value(_pair_density(t, (0, 2)), a_angles, c_angles, functional)
    return value_ab, value_ac


def cg_state_values(
    mu: float,
    a_angles: tuple[float, float, float],
    b_angles: tuple[float, float, float],
    c_angles: tuple[float, float, float],
) -> tuple[float, float]:
    """Functional values on the (a,b) and (a,c) reduced states of the
    three-qubit family mu|000> + sqrt((1-mu^2)/2)(|110> + |101>)."""
    return cg_values_for_state(cg_state(mu), a_angles, b_angles, c_angles)


def _mirror_angles(u: float, w: float) -> np.ndarray:
    """Six planar angles with the first two settings of each side mirrored
    about the -z axis and the third setting at sigma_x; the violating
    optima of the three-setting functional have this shape."""
    a0 = math.atan2(-math.cos(u), math.sin(u))
    a1 = math.atan2(-math.cos(u), -math.sin(u))
    b0 = math.atan2(-math.cos(w), math.sin(w))
    b1 = math.atan2(-math.cos(w), -math.sin(w))
    return np.array([a0, a1, 0.0, b0, b1, 0.0])


def cg_double_violation_search(
    mu_values: np.ndarray, restarts: int, rng: np.random.Generator
) -> CgSearchResult:
    """Search for a family member whose (a,b) and (a,c) correlations both
    exceed the local bound 4 of the three-setting functional.

    The b and c measurement angles are tied together, which makes the two
    values equal by the b-c exchange symmetry of the family; the search then
    maximizes the common value over the remaining six angles per mu.
    """
    functional = collins_gisin()
    best: CgSearchResult | None = None
    for mu in mu_values:
        vec = _pure_vector(cg_state(float(mu)))
        t = vec.reshape(2, 2, 2)
        evaluator = _PlanarPairEvaluator(_pair_density(t, (0, 1)), functional)

        def objective(x, ev=evaluator):
            return ev.value(x[:3], x[3:])

        candidates = [
            _mirror_angles(0.53, 0.25),
            _mirror_angles(0.9, 0.45),
            _mirror_angles(0.2, 0.1),
        ]
        for _ in range(restarts):
            candidates.append(rng.uniform(-math.pi, math.pi, 6))
        local_best, local_x = -np.inf, candidates[0]
        for x0 in candidates:
            value, x = _nelder_mead_max(objective, x0, max_iter=800)
            if value > local_best:
                local_best, local_x = value, x
        a_angles = (float(local_x[0]), float(local_x[1]), float(local_x[2]))
        b_angles = (float(local_x[3]), float(local_x[4]), float(local_x[5]))
        value_ab, value_ac = cg_state_values(float(mu), a_angles, b_angles, b_angles)
        result = CgSearchResult(
            mu=float(mu),
            a_angles=a_angles,
            b_angles=b_angles,
            c_angles=b_angles,
            value_ab=value_ab,
            value_ac=value_ac,
        )
        if best is None or result.min_value > best.min_value:
            best = result
    assert best is not None
    return best


# ---------------------------------------------------------------------------
# Four-party probe for the three-setting functional
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class PbProbeReport:
    """Findings of the four-party no-signalling probe.

    ``max_sum`` is the LP maximum of |C_ab| + |C_ac| + |C_ad| over the
    no-signalling polytope (via the eight sign patterns); the bound of
    3 * local_bound applies to rewritten functionals without negative
    coefficients, so the comparison is reported rather than asserted.
    ``t_star`` is the optimum of max t subject to C_ab + C_ac >= t and
    C_ab + C_ad >= t; a value above 2 * local_bound would realize the
    simultaneous double-violation conjecture.
    """

    sign_values: tuple[tuple[tuple[int, int, int], float], ...]
    max_sum: float
    pb_bound: float
    exceeds_pb_form_bound: bool
    argmax_behavior: Behavior
    t_star: float
    t_threshold: float
    t_exceeds: bool
    t_behavior: Behavior


def pb_scenario() -> Scenario:
    return Scenario(4, (3, 3, 3, 3), (2, 2, 2, 2))


def cg_pair_objective(scenario: Scenario, pair: tuple[int, int], fixed: int = 0) -> np.ndarray:
    """Flattened-table coefficients of the three-setting functional on one
    pair of parties."""
    functional = collins_gisin()
    p1, p2 = pair
    obj = np.zeros(scenario.table_size)
    for x in range(3):
        for y in range(3):
            w = functional.correlators[x, y]
            if not w:
                continue
            ctx = [fixed] * scenario.parties
            ctx[p1], ctx[p2] = x, y
            for outs in scenario.outcome_tuples():
                sign = -1.0 if (outs[p1] + outs[p2]) % 2 else 1.0
                obj[flat_index(scenario, tuple(ctx), outs)] += w * sign
    for party, coeffs in ((p1, functional.marginals_a), (p2, functional.marginals_b)):
        for x in range(3):
            w = coeffs[x]
            if not w:
                continue
            ctx = [fixed] * scenario.parties
            ctx[party] = x
            for outs in scenario.outcome_tuples():
                sign = -1.0 if outs[party] % 2 else 1.0
                obj[flat_index(scenario, tuple(ctx), outs)] += w * sign
    return obj


def pb_probe(tol: float = lp.FEASIBILITY_TOL) -> PbProbeReport:
    """Eight sign-pattern LPs for the maximum of |C_ab| + |C_ac| + |C_ad|
    over the four-party no-signalling polytope, plus the max-min LP for the
    simultaneous double-violation question."""
    scenario = pb_scenario()
    local_bound = 4.0
    objectives = {
        pair: cg_pair_objective(scenario, pair)
        for pair in ((0, 1), (0, 2), (0, 3))
    }
    norm = normalization_constraints(scenario)
    ns = no_signalling_constraints(scenario)
    eq_lhs = np.vstack([norm[0], ns[0]])
    eq_rhs = np.concatenate([norm[1], ns[1]])

    sign_values = []
    best_value, best_behavior = -np.inf, None
    for s1 in (1, -1):
        for s2 in (1, -1):
            for s3 in (1, -1):
                objective = (
                    s1 * objectives[(0, 1)]
                    + s2 * objectives[(0, 2)]
                    + s3 * objectives[(0, 3)]
                )
                outcome = lp.solve(
                    lp.LinearProgram(objective, eq_lhs=eq_lhs, eq_rhs=eq_rhs), tol
                )
                if outcome.status != lp.LpStatus.OPTIMAL:
                    raise RuntimeError(
                        f"sign-pattern LP failed: {outcome.status} {outcome.message}"
                    )
                sign_values.append(((s1, s2, s3), float(outcome.value)))
                if outcome.value > best_value:
                    best_value = float(outcome.value)
                    table = np.clip(outcome.x.reshape(scenario.table_shape), 0.0, None)
                    best_behavior = Behavior(scenario, table)

    # Max-min LP: variables (table, t), maximize t.
    n = scenario.table_size
    eq_lhs_t = np.hstack([eq_lhs, np.zeros((eq_lhs.shape[0], 1))])
    ub_rows = []
    for pair in ((0, 2), (0, 3)):
        row = np.concatenate([-(objectives[(0, 1)] + objectives[pair]), [1.0]])
        ub_rows.append(row)
    objective_t = np.concatenate([np.zeros(n), [1.0]])
    bounds = [(0.0, None)] * n + [(None, None)]
    outcome = lp.solve(
        lp.LinearProgram(
            objective_t,
            eq_lhs=eq_lhs_t,
            eq_rhs=eq_rhs,
            ub_lhs=np.array(ub_rows),
            ub_rhs=np.zeros(2),
            bounds=bounds,
        ),
        tol,
    )
    if outcome.status != lp.LpStatus.OPTIMAL:
        raise RuntimeError(f"max-min LP failed: {outcome.status} {outcome.message}")
    t_star = float(outcome.value)
    t_table = np.clip(outcome.x[:n].reshape(scenario.table_shape), 0.0, None)

    return PbProbeReport(
        sign_values=tuple(sign_values),
        max_sum=best_value,
        pb_bound=3.0 * local_bound,
        exceeds_pb_form_bound=best_value > 3.0 * local_bound + 1e-6,
        argmax_behavior=best_behavior,
        t_star=t_star,
        t_threshold=2.0 * local_bound,
        t_exceeds=t_star > 2.0 * local_bound + 1e-6,
        t_behavior=Behavior(scenario, t_table),
    )
