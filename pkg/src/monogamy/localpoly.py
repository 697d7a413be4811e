"""Local-polytope machinery: deterministic strategies, membership by LP,
and Bell bounds over local models."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import lp
from .bell import BellFunctional, bell_value
from .model import Behavior, Scenario, deterministic_box

STRATEGY_CAP = 1_000_000


@dataclass(frozen=True)
class DeterministicStrategy:
    """Per party, a fixed response outcome for each setting."""

    assignment: tuple[tuple[int, ...], ...]

    def to_behavior(self, scenario: Scenario) -> Behavior:
        return deterministic_box(scenario, self.assignment)


@dataclass(frozen=True, eq=False)
class LocalModel:
    """Weights over the enumerated deterministic strategies reproducing a
    target behavior."""

    scenario: Scenario
    weights: np.ndarray
    reconstruction_error: float

    def behavior(self) -> Behavior:
        strategies = deterministic_strategies(self.scenario)
        table = np.zeros(self.scenario.table_shape)
        for w, strat in zip(self.weights, strategies):
            if w > 0.0:
                table += w * strat.to_behavior(self.scenario).table
        return Behavior(self.scenario, table)


@dataclass(frozen=True)
class NotLocal:
    """LP infeasibility certificate; the score is the minimized total L1
    constraint violation (a diagnostic, not a calibrated distance)."""

    score: float


def strategy_count(scenario: Scenario) -> int:
    count = 1
    for s, o in zip(scenario.settings, scenario.outcomes):
        count *= o ** s
    return count


def deterministic_strategies(scenario: Scenario, cap: int = STRATEGY_CAP) -> list[DeterministicStrategy]:
    """Enumerate all per-party deterministic response functions."""
    total = strategy_count(scenario)
    if total > cap:
        raise ValueError(f"strategy count {total} exceeds cap {cap}")
    per_party = []
    for p in range(scenario.parties):
        responses = list(
            itertools.product(range(scenario.outcomes[p]), repeat=scenario.settings[p])
        )
        per_party.append(responses)
    return [
        DeterministicStrategy(assignment=combo)
        for combo in itertools.product(*per_party)
    ]


def deterministic_behaviors(scenario: Scenario, cap: int = STRATEGY_CAP) -> list[Behavior]:
    return [s.to_behavior(scenario) for s in deterministic_strategies(scenario)]


def strategy_matrix(scenario: Scenario, cap: int = STRATEGY_CAP) -> np.ndarray:
    """Dense matrix with one flattened deterministic table per column."""
    strategies = deterministic_strategies(scenario, cap)
    cols = [s.to_behavior(scenario).table.reshape(-1) for s in strategies]
    return np.stack(cols, axis=1)


def local_decomposition(
    b: Behavior, tol: float = 1e-8, cap: int = STRATEGY_CAP
) -> LocalModel | NotLocal:
    """Find hidden-variable weights reproducing ``b``, or certify none exist.

    Feasibility of  D w = b,  sum(w) = 1,  w >= 0  over the deterministic
    strategy columns D; infeasibility comes back with the minimized L1
    violation as a non-locality score.
    """
    scenario = b.scenario
    matrix = strategy_matrix(scenario, cap)
    n_strats = matrix.shape[1]
    eq_lhs = np.vstack([matrix, np.ones((1, n_strats))])
    eq_rhs = np.concatenate([b.table.reshape(-1), [1.0]])
    outcome = lp.feasibility(eq=(eq_lhs, eq_rhs), n_variables=n_strats, tol=lp.FEASIBILITY_TOL)
    if outcome.status == lp.LpStatus.INFEASIBLE:
        return NotLocal(score=outcome.violation)
    if outcome.status != lp.LpStatus.OPTIMAL:
        raise RuntimeError(f"local membership LP failed: {outcome.message}")
    weights = np.clip(outcome.x, 0.0, None)
    weights = weights / weights.sum()
    reconstruction = matrix @ weights
    err = float(np.max(np.abs(reconstruction - b.table.reshape(-1))))
    if err > tol:
        # Feasible per the LP but imprecise reconstruction: a numerical
        # failure, not evidence of non-locality.
        raise RuntimeError(f"feasible weights reconstruct with error {err:.3e}")
    return LocalModel(scenario=scenario, weights=weights, reconstruction_error=err)


def local_bound(f: BellFunctional, scenario: Scenario, cap: int = STRATEGY_CAP) -> float:
    """Maximum of the functional over all deterministic strategies (the
    vertices of the local polytope); exact up to float evaluation."""
    if scenario.parties != 2:
        raise ValueError("Bell functionals here are two-party")
    if scenario.settings != f.settings:
        raise ValueError("functional settings do not match the scenario")
    best = -np.inf
    for strat in deterministic_strategies(scenario, cap):
        value = bell_value(strat.to_behavior(scenario), f)
        if value > best:
            best = value
    return float(best)
