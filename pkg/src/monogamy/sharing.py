"""N-shareability of two-party behaviors.

Two extension notions are implemented for a bipartite behavior P(a,b|A,B)
extended with N clones of the second party:

- unrestricted: the explicit delta construction forcing all clone outcomes
  equal; it always exists and is generally signalling, and its pair marginals
  (taken at the full setting context) reproduce the base with the first
  clone's setting driving the response;
- no-signalling: LP feasibility for a symmetric no-signalling (N+1)-party
  behavior whose (a, b_i) pair marginals all equal the base.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import lp
from .model import (
    Behavior,
    Scenario,
    flat_index,
    is_no_signalling,
    no_signalling_constraints,
    normalization_constraints,
    validate_behavior,
)

EXTENSION_TABLE_CAP = 200_000


@dataclass(frozen=True)
class ExtensionSpec:
    """What was extended: the base scenario, the clone count, the mode, and
    the feasibility tolerance used."""

    base_settings: tuple[int, int]
    base_outcomes: tuple[int, int]
    clones: int
    mode: str  # "unrestricted" or "ns"
    tol: float = 0.0


@dataclass(frozen=True, eq=False)
class ExtensionCertificate:
    """(N+1)-party extension behavior with its verification residuals.

    ``symmetry_residual`` is the largest deviation from clone-exchange
    symmetry: in ns mode clones are swapped jointly in outcomes and settings;
    in unrestricted mode outcomes are swapped at fixed settings (the delta
    construction's settings enter through the first clone only).
    ``marginal_residual`` is the largest deviation of any clone's pair
    marginal from the base behavior.
    """

    spec: ExtensionSpec
    behavior: Behavior
    symmetry_residual: float
    marginal_residual: float


@dataclass(frozen=True)
class InfeasibleExtension:
    """No extension exists; the score is the LP's minimized total violation."""

    spec: ExtensionSpec
    violation: float


@dataclass(frozen=True)
class ShareabilityResult:
    shareable: bool
    score: float
    certificate: ExtensionCertificate | None


def _extended_scenario(base: Scenario, n_clones: int) -> Scenario:
    settings = (base.settings[0],) + (base.settings[1],) * n_clones
    outcomes = (base.outcomes[0],) + (base.outcomes[1],) * n_clones
    return Scenario(1 + n_clones, settings, outcomes, table_cap=EXTENSION_TABLE_CAP)


def _require_two_party(b: Behavior) -> None:
    if b.scenario.parties != 2:
        raise ValueError("extensions are defined for two-party base behaviors")
    report = validate_behavior(b)
    if not report.passed:
        raise ValueError("base behavior does not validate")


def unrestricted_extension(b: Behavior, n_clones: int) -> ExtensionCertificate:
    """Delta construction: all clones copy the first clone's outcome.

    P(a, b_1..b_N | A, B_1..B_N) = P(a, b_1 | A, B_1) if b_1 = ... = b_N,
    else 0.  Both residuals are exactly zero by construction.
    """
    _require_two_party(b)
    if n_clones < 1:
        raise ValueError("need at least one clone")
    scen = _extended_scenario(b.scenario, n_clones)
    n_out_b = b.scenario.outcomes[1]
    table = np.zeros(scen.table_shape)
    # Axes: [A, B1..BN, a, b1..bN]; broadcast the base over B2..BN.
    base = b.table  # shape (sA, sB, oA, oB)
    for beta in range(n_out_b):
        view_index = (
            (slice(None),) * (1 + n_clones)  # settings
            + (slice(None),)                  # a
            + (beta,) * n_clones              # all clone outcomes equal
        )
        block = base[:, :, :, beta]  # (sA, sB1, oA)
        expand = block[(slice(None), slice(None)) + (None,) * (n_clones - 1) + (slice(None),)]
        table[view_index] = np.broadcast_to(
            expand,
            (scen.settings[0],) + scen.settings[1:] + (scen.outcomes[0],),
        )
    behavior = Behavior(scen, table)
    spec = ExtensionSpec(b.scenario.settings, b.scenario.outcomes, n_clones, "unrestricted")
    sym = _outcome_symmetry_residual(behavior)
    marg = _marginal_residual_unrestricted(behavior, b)
    return ExtensionCertificate(spec, behavior, sym, marg)


def _outcome_symmetry_residual(ext: Behavior) -> float:
    """Max deviation under clone outcome swaps at fixed settings."""
    n_clones = ext.scenario.parties - 1
    residual = 0.0
    for i, j in itertools.combinations(range(n_clones), 2):
        ax_i = ext.scenario.parties + 1 + i
        ax_j = ext.scenario.parties + 1 + j
        swapped = np.swapaxes(ext.table, ax_i, ax_j)
        residual = max(residual, float(np.max(np.abs(ext.table - swapped))))
    return residual


def _joint_symmetry_residual(ext: Behavior) -> float:
    """Max deviation under joint (setting, outcome) clone swaps."""
    n_clones = ext.scenario.parties - 1
    residual = 0.0
    for i, j in itertools.combinations(range(n_clones), 2):
        swapped = np.swapaxes(ext.table, 1 + i, 1 + j)
        swapped = np.swapaxes(
            swapped, ext.scenario.parties + 1 + i, ext.scenario.parties + 1 + j
        )
        residual = max(residual, float(np.max(np.abs(ext.table - swapped))))
    return residual


def _pair_marginal(ext: Behavior, clone: int, clone_context: tuple[int, ...]) -> np.ndarray:
    """Marginal table over (a, b_clone): shape (sA, sB, oA, oB).

    ``clone_context`` fixes the other clones' settings; the kept clone's
    setting varies.
    """
    n_clones = ext.scenario.parties - 1
    others = [i for i in range(n_clones) if i != clone]
    index: list = [slice(None)]  # A
    for i in range(n_clones):
        index.append(slice(None) if i == clone else clone_context[others.index(i)])
    sub = ext.table[tuple(index)]  # axes: A, B_clone, a, b_0..b_{N-1}
    # Sum the other clones' outcome axes.
    sum_axes = tuple(3 + i for i in others)
    reduced = sub.sum(axis=sum_axes) if sum_axes else sub
    # Remaining outcome axes: a, then the kept clone at its original slot.
    return reduced


def _marginal_residual_unrestricted(ext: Behavior, base: Behavior) -> float:
    """Compare every clone's pair marginal against the base, at every
    context of the remaining clones, with the base driven by B_1's value.

    In the delta construction the response of every clone follows the first
    clone's setting, so the pair marginal at full context (A, B_1..B_N)
    must equal base(A, B_1) regardless of which clone is kept.
    """
    n_clones = ext.scenario.parties - 1
    s_b = base.scenario.settings[1]
    residual = 0.0
    for clone in range(n_clones):
        others = [i for i in range(n_clones) if i != clone]
        for other_ctx in itertools.product(*(range(s_b) for _ in others)):
            marg = _pair_marginal(ext, clone, other_ctx)
            if clone == 0:
                # marg[A, B1, a, b] must equal base[A, B1, a, b]
                residual = max(residual, float(np.max(np.abs(marg - base.table))))
            else:
                # The base setting is B_1 = other_ctx[0] (first of the others);
                # the kept clone's own setting does not drive the response.
                b1 = other_ctx[0]
                expected = base.table[:, b1]  # (sA, oA, oB)
                for own in range(s_b):
                    residual = max(
                        residual,
                        float(np.max(np.abs(marg[:, own] - expected))),
                    )
    return residual


def _marginal_residual_ns(ext: Behavior, base: Behavior) -> float:
    """Compare every clone's pair marginal (at its own setting) to the base,
    with the other clones pinned to setting 0."""
    n_clones = ext.scenario.parties - 1
    residual = 0.0
    for clone in range(n_clones):
        zeros = tuple(0 for _ in range(n_clones - 1))
        marg = _pair_marginal(ext, clone, zeros)
        residual = max(residual, float(np.max(np.abs(marg - base.table))))
    return residual


# ---------------------------------------------------------------------------
# No-signalling extension LP
# ---------------------------------------------------------------------------

def clone_symmetry_constraints(scen: Scenario) -> tuple[np.ndarray, np.ndarray]:
    """Equalities for adjacent clone transpositions (they generate the full
    permutation group)."""
    n_clones = scen.parties - 1
    rows = []
    for i in range(n_clones - 1):
        p1, p2 = 1 + i, 2 + i
        for ctx in scen.contexts():
            for outs in scen.outcome_tuples():
                s_ctx = list(ctx)
                s_out = list(outs)
                s_ctx[p1], s_ctx[p2] = s_ctx[p2], s_ctx[p1]
                s_out[p1], s_out[p2] = s_out[p2], s_out[p1]
                pair = (ctx, outs)
                s_pair = (tuple(s_ctx), tuple(s_out))
                if s_pair <= pair:
                    continue  # one row per unordered pair
                row = np.zeros(scen.table_size)
                row[flat_index(scen, *pair)] += 1.0
                row[flat_index(scen, *s_pair)] -= 1.0
                rows.append(row)
    if not rows:
        return np.zeros((0, scen.table_size)), np.zeros(0)
    return np.array(rows), np.zeros(len(rows))


def _pair_marginal_rows(scen: Scenario, base: Behavior) -> tuple[np.ndarray, np.ndarray]:
    """Equalities tying clone 1's pair marginal (others at setting 0) to the
    base; symmetry rows propagate the property to the remaining clones."""
    n_clones = scen.parties - 1
    rows, rhs = [], []
    for sa in range(scen.settings[0]):
        for sb in range(scen.settings[1]):
            ctx = (sa, sb) + (0,) * (n_clones - 1)
            for a in range(scen.outcomes[0]):
                for bb in range(scen.outcomes[1]):
                    row = np.zeros(scen.table_size)
                    rest = [range(scen.outcomes[1 + i]) for i in range(1, n_clones)]
                    for tail in itertools.product(*rest):
                        outs = (a, bb) + tail
                        row[flat_index(scen, ctx, outs)] = 1.0
                    rows.append(row)
                    rhs.append(float(base.table[sa, sb, a, bb]))
    return np.array(rows), np.array(rhs)


def ns_extension(
    b: Behavior, n_clones: int, tol: float = lp.FEASIBILITY_TOL
) -> ExtensionCertificate | InfeasibleExtension:
    """Symmetric no-signalling extension by LP feasibility over the raw
    (N+1)-party table entries."""
    _require_two_party(b)
    if n_clones < 1:
        raise ValueError("need at least one clone")
    report = is_no_signalling(b)
    if not report.is_no_signalling:
        raise ValueError(
            f"base behavior is signalling (violation {report.max_violation:.3e})"
        )
    scen = _extended_scenario(b.scenario, n_clones)
    spec = ExtensionSpec(b.scenario.settings, b.scenario.outcomes, n_clones, "ns", tol)

    blocks = [
        normalization_constraints(scen),
        no_signalling_constraints(scen),
        clone_symmetry_constraints(scen),
        _pair_marginal_rows(scen, b),
    ]
    eq_lhs = np.vstack([blk[0] for blk in blocks if blk[0].size])
    eq_rhs = np.concatenate([blk[1] for blk in blocks if blk[0].size])

    outcome = lp.feasibility(eq=(eq_lhs, eq_rhs), n_variables=scen.table_size, tol=tol)
    if outcome.status == lp.LpStatus.INFEASIBLE:
        return InfeasibleExtension(spec, violation=outcome.violation)
    if outcome.status != lp.LpStatus.OPTIMAL:
        raise RuntimeError(f"extension LP failed: {outcome.message}")

    table = np.clip(outcome.x.reshape(scen.table_shape), 0.0, None)
    behavior = Behavior(scen, table)
    return ExtensionCertificate(
        spec,
        behavior,
        symmetry_residual=_joint_symmetry_residual(behavior),
        marginal_residual=_marginal_residual_ns(behavior, b),
    )


def is_n_shareable(
    b: Behavior, n_clones: int, mode: str = "ns", tol: float = lp.FEASIBILITY_TOL
) -> ShareabilityResult:
    """Thin wrapper over the two extension constructions.

    The score is 0 when an extension exists, otherwise the LP violation.
    """
    if mode == "unrestricted":
        cert = unrestricted_extension(b, n_clones)
        return ShareabilityResult(True, 0.0, cert)
    if mode == "ns":
        result = ns_extension(b, n_clones, tol)
        if isinstance(result, InfeasibleExtension):
            return ShareabilityResult(False, result.violation, None)
        return ShareabilityResult(True, 0.0, result)
    raise ValueError("mode must be 'unrestricted' or 'ns'")


def random_shareable_behavior(
    rng: np.random.Generator, n_vertices: int = 3
) -> tuple[Behavior, Behavior]:
    """Random two-party behavior that is 2-shareable by construction.

    Samples a point of the symmetric no-signalling three-party polytope
    (a random mixture of vertices found by maximizing random objectives) and
    marginalizes it down to the (a, b_1) pair.  Returns (pair, witness),
    the witness being the three-party behavior that certifies shareability.
    """
    base = Scenario(2, (2, 2), (2, 2))
    scen = _extended_scenario(base, 2)
    blocks = [
        normalization_constraints(scen),
        no_signalling_constraints(scen),
        clone_symmetry_constraints(scen),
    ]
    eq_lhs = np.vstack([blk[0] for blk in blocks if blk[0].size])
    eq_rhs = np.concatenate([blk[1] for blk in blocks if blk[0].size])

    vertices = []
    for _ in range(n_vertices):
        objective = rng.standard_normal(scen.table_size)
        outcome = lp.solve(lp.LinearProgram(objective, eq_lhs=eq_lhs, eq_rhs=eq_rhs))
        if outcome.status != lp.LpStatus.OPTIMAL:
            raise RuntimeError(f"vertex sampling LP failed: {outcome.message}")
        vertices.append(np.clip(outcome.x, 0.0, None))
    weights = rng.dirichlet(np.ones(len(vertices)))
    table = sum(w * v for w, v in zip(weights, vertices)).reshape(scen.table_shape)
    witness = Behavior(scen, table)

    pair_table = _pair_marginal(witness, 0, (0,))
    pair = Behavior(base, pair_table)
    return pair, witness


def discard_last_clone(cert: ExtensionCertificate) -> Behavior:
    """Marginalize the last clone out of a certificate behavior (its setting
    pinned to 0); for feasible no-signalling certificates the result is a
    certificate for one fewer clone."""
    ext = cert.behavior
    n = ext.scenario.parties
    if n < 3:
        raise ValueError("certificate has no clone to discard")
    sub = ext.table[(slice(None),) * (n - 1) + (0,)]  # last clone setting = 0
    reduced = sub.sum(axis=-1)  # last clone outcomes
    scen = Scenario(n - 1, ext.scenario.settings[:-1], ext.scenario.outcomes[:-1])
    return Behavior(scen, reduced)
