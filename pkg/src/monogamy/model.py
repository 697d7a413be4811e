"""Measurement scenarios and behaviors (conditional probability tables).

A behavior is the dense table P(a_1..a_N | A_1..A_N) for N parties, each
choosing among a finite number of settings with a finite number of outcomes.
Tables are stored as numpy arrays of shape ``(*settings, *outcomes)``
(settings-major, outcomes-minor when flattened row-major).

Conventions used throughout the package:

- setting and outcome indices are 0-based;
- for dichotomic parties, outcome 0 maps to the value +1 and outcome 1 to -1;
- behaviors are immutable after construction and all operations are pure.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

DEFAULT_TOL = 1e-9

# Refuse to allocate tables beyond this many entries.
DEFAULT_TABLE_CAP = 1_000_000


@dataclass(frozen=True)
class Scenario:
    """Number of parties, settings per party, and outcomes per party.

    Outcome counts are uniform across a party's settings.
    """

    parties: int
    settings: tuple[int, ...]
    outcomes: tuple[int, ...]
    table_cap: int = field(default=DEFAULT_TABLE_CAP, compare=False)

    def __post_init__(self):
        if self.parties < 1:
            raise ValueError("scenario needs at least one party")
        object.__setattr__(self, "settings", tuple(int(s) for s in self.settings))
        object.__setattr__(self, "outcomes", tuple(int(o) for o in self.outcomes))
        if len(self.settings) != self.parties or len(self.outcomes) != self.parties:
            raise ValueError("settings and outcomes must list one count per party")
        if any(s < 1 for s in self.settings):
            raise ValueError("every party needs at least one setting")
        if any(o < 2 for o in self.outcomes):
            raise ValueError("every party needs at least two outcomes")
        if self.table_size > self.table_cap:
            raise ValueError(
                f"table size {self.table_size} exceeds cap {self.table_cap}"
            )

    @property
    def table_shape(self) -> tuple[int, ...]:
        return self.settings + self.outcomes

    @property
    def table_size(self) -> int:
        size = 1
        for n in self.table_shape:
            size *= n
        return size

    @property
    def n_contexts(self) -> int:
        size = 1
        for s in self.settings:
            size *= s
        return size

    def contexts(self):
        """Iterate over all setting vectors in row-major order."""
        return itertools.product(*(range(s) for s in self.settings))

    def outcome_tuples(self):
        """Iterate over all outcome vectors in row-major order."""
        return itertools.product(*(range(o) for o in self.outcomes))

    def is_dichotomic(self) -> bool:
        return all(o == 2 for o in self.outcomes)


@dataclass(frozen=True, eq=False)
class Behavior:
    """A scenario together with its dense probability table.

    Only structural properties (shape, finiteness) are enforced here;
    numerical validity is checked by :func:`validate_behavior` so that
    defective tables can still be constructed and diagnosed.
    """

    scenario: Scenario
    table: np.ndarray

    def __post_init__(self):
        tbl = np.asarray(self.table, dtype=float)
        if tbl.shape != self.scenario.table_shape:
            raise ValueError(
                f"table shape {tbl.shape} does not match scenario "
                f"shape {self.scenario.table_shape}"
            )
        if not np.all(np.isfinite(tbl)):
            raise ValueError("table contains non-finite entries")
        tbl = tbl.copy()
        tbl.setflags(write=False)
        object.__setattr__(self, "table", tbl)

    def context_table(self, context: tuple[int, ...]) -> np.ndarray:
        """Outcome distribution at one setting vector."""
        return self.table[tuple(context)]


@dataclass(frozen=True, eq=False)
class MarginalTable:
    """Distribution over a subset of parties, per subset setting vector."""

    parties: tuple[int, ...]
    settings: tuple[int, ...]
    outcomes: tuple[int, ...]
    table: np.ndarray


@dataclass(frozen=True)
class SignallingWitness:
    """Location of the largest marginal discrepancy.

    ``party`` is the discarded party whose pair of settings shifts the
    marginal of the remaining parties; ``peer_context`` and ``peer_outcomes``
    locate the affected entry (indices of the parties other than ``party``).
    """

    party: int
    settings: tuple[int, int]
    peer_context: tuple[int, ...]
    peer_outcomes: tuple[int, ...]


@dataclass(frozen=True)
class SignallingReport:
    is_no_signalling: bool
    max_violation: float
    witness: SignallingWitness | None


@dataclass(frozen=True)
class ValidationReport:
    """Positivity and normalization diagnostics for a behavior table."""

    passed: bool
    positivity_violations: tuple[tuple[tuple[int, ...], tuple[int, ...], float], ...]
    normalization_deviations: tuple[tuple[tuple[int, ...], float], ...]
    max_positivity_violation: float
    max_normalization_deviation: float


def validate_behavior(b: Behavior, tol: float = DEFAULT_TOL) -> ValidationReport:
    """Check positivity of all entries and per-context normalization.

    Passes iff every entry is >= -tol and every context sums to 1 within tol.
    Structural defects (wrong table shape) raise at `Behavior` construction
    and never reach this function.
    """
    s = b.scenario
    n_out_axes = tuple(range(s.parties, 2 * s.parties))

    positivity = []
    bad = np.argwhere(b.table < -tol)
    for idx in bad:
        idx = tuple(int(i) for i in idx)
        positivity.append((idx[: s.parties], idx[s.parties:], float(b.table[idx])))
    max_pos = float(max(0.0, -b.table.min())) if b.table.size else 0.0

    sums = b.table.sum(axis=n_out_axes)
    deviations = np.abs(sums - 1.0)
    normalization = []
    for ctx in np.argwhere(deviations > tol):
        ctx = tuple(int(i) for i in ctx)
        normalization.append((ctx, float(deviations[ctx])))
    max_norm = float(deviations.max()) if deviations.size else 0.0

    return ValidationReport(
        passed=not positivity and not normalization,
        positivity_violations=tuple(positivity),
        normalization_deviations=tuple(normalization),
        max_positivity_violation=max_pos,
        max_normalization_deviation=max_norm,
    )


def is_no_signalling(b: Behavior, tol: float = DEFAULT_TOL) -> SignallingReport:
    """Compare, for every party and pair of its settings, the marginal of the
    remaining parties; report the largest entry-wise difference."""
    s = b.scenario
    max_violation = 0.0
    witness = None
    for k in range(s.parties):
        # Sum out party k's outcome axis, keeping its setting axis in front.
        reduced = b.table.sum(axis=s.parties + k)
        reduced = np.moveaxis(reduced, k, 0)  # axis 0 = party k's setting
        for s1, s2 in itertools.combinations(range(s.settings[k]), 2):
            diff = np.abs(reduced[s1] - reduced[s2])
            local_max = float(diff.max())
            if local_max > max_violation:
                max_violation = local_max
                flat = np.unravel_index(np.argmax(diff), diff.shape)
                flat = tuple(int(i) for i in flat)
                n_peer = s.parties - 1
                witness = SignallingWitness(
                    party=k,
                    settings=(s1, s2),
                    peer_context=flat[:n_peer],
                    peer_outcomes=flat[n_peer:],
                )
    passed = max_violation <= tol
    return SignallingReport(
        is_no_signalling=passed,
        max_violation=max_violation,
        witness=None if passed else witness,
    )


def marginal(b: Behavior, keep: tuple[int, ...], context: tuple[int, ...]) -> MarginalTable:
    """Marginal distribution of the parties in ``keep``.

    The discarded parties' settings are pinned to the given full setting
    vector; the kept parties' settings range over all values.  For
    no-signalling behaviors the result does not depend on ``context``.
    """
    s = b.scenario
    keep = tuple(sorted(set(int(k) for k in keep)))
    if not keep:
        raise ValueError("keep set must be nonempty")
    if keep[0] < 0 or keep[-1] >= s.parties:
        raise ValueError("keep set out of range")
    if len(context) != s.parties:
        raise ValueError("context must give a setting for every party")
    drop = tuple(p for p in range(s.parties) if p not in keep)

    index = tuple(
        slice(None) if p in keep else int(context[p]) for p in range(s.parties)
    )
    sub = b.table[index]  # axes: kept settings, then all outcomes
    out_offset = len(keep)
    sum_axes = tuple(out_offset + p for p in drop)
    tbl = sub.sum(axis=sum_axes)
    return MarginalTable(
        parties=keep,
        settings=tuple(s.settings[p] for p in keep),
        outcomes=tuple(s.outcomes[p] for p in keep),
        table=tbl,
    )


def marginal_behavior(b: Behavior, keep: tuple[int, ...], context: tuple[int, ...]) -> Behavior:
    """Marginal of ``b`` repackaged as a Behavior on the kept parties."""
    m = marginal(b, keep, context)
    scen = Scenario(len(m.parties), m.settings, m.outcomes)
    return Behavior(scen, m.table)


def _sign_tensor(scenario: Scenario) -> np.ndarray:
    signs = np.ones(())
    for _ in range(scenario.parties):
        signs = np.multiply.outer(signs, np.array([1.0, -1.0]))
    return signs


def correlator(b: Behavior, context: tuple[int, ...]) -> float:
    """Expectation of the product of +-1-valued outcomes at one context.

    Outcome 0 counts as +1 and outcome 1 as -1; requires every party to be
    dichotomic.
    """
    s = b.scenario
    if not s.is_dichotomic():
        raise ValueError("correlator requires dichotomic outcomes for every party")
    if len(context) != s.parties:
        raise ValueError("context must give a setting for every party")
    block = b.table[tuple(int(c) for c in context)]
    return float((block * _sign_tensor(s)).sum())


# ---------------------------------------------------------------------------
# Constructors
# ---------------------------------------------------------------------------

def uniform_box(scenario: Scenario) -> Behavior:
    """All outcomes equally likely in every context."""
    n_out = 1
    for o in scenario.outcomes:
        n_out *= o
    table = np.full(scenario.table_shape, 1.0 / n_out)
    return Behavior(scenario, table)


def deterministic_box(scenario: Scenario, assignment: tuple[tuple[int, ...], ...]) -> Behavior:
    """Each party answers a fixed outcome per setting.

    ``assignment[p][x]`` is party p's outcome under setting x.
    """
    if len(assignment) != scenario.parties:
        raise ValueError("assignment must cover every party")
    for p, row in enumerate(assignment):
        if len(row) != scenario.settings[p]:
            raise ValueError(f"party {p} assignment must cover every setting")
        if any(not 0 <= o < scenario.outcomes[p] for o in row):
            raise ValueError(f"party {p} assignment has out-of-range outcomes")
    table = np.zeros(scenario.table_shape)
    for ctx in scenario.contexts():
        outs = tuple(assignment[p][ctx[p]] for p in range(scenario.parties))
        table[ctx + outs] = 1.0
    return Behavior(scenario, table)


def pr_box() -> Behavior:
    """The extremal no-signalling box: P(a,b|x,y) = 1/2 iff a XOR b = x AND y."""
    scenario = Scenario(2, (2, 2), (2, 2))
    table = np.zeros(scenario.table_shape)
    for x, y, a, bb in itertools.product(range(2), repeat=4):
        if (a ^ bb) == (x & y):
            table[x, y, a, bb] = 0.5
    return Behavior(scenario, table)


def product_box(factors: list[Behavior]) -> Behavior:
    """Independent parties: the product of behaviors on consecutive blocks."""
    if not factors:
        raise ValueError("product needs at least one factor")
    settings: tuple[int, ...] = ()
    outcomes: tuple[int, ...] = ()
    for f in factors:
        settings += f.scenario.settings
        outcomes += f.scenario.outcomes
    parties = len(settings)
    scenario = Scenario(parties, settings, outcomes)
    blocks = []
    start = 0
    for f in factors:
        n = f.scenario.parties
        blocks.append(tuple(range(start, start + n)))
        start += n
    table = _block_product([f.table for f in factors], blocks, scenario)
    return Behavior(scenario, table)


def mixture(behaviors: list[Behavior], weights: list[float]) -> Behavior:
    """Convex combination of behaviors on a common scenario."""
    if len(behaviors) != len(weights) or not behaviors:
        raise ValueError("need one weight per behavior")
    w = np.asarray(weights, dtype=float)
    if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-12:
        raise ValueError("weights must form a probability distribution")
    scenario = behaviors[0].scenario
    for b in behaviors[1:]:
        if b.scenario != scenario:
            raise ValueError("all behaviors must share one scenario")
    table = sum(wi * b.table for wi, b in zip(w, behaviors))
    return Behavior(scenario, table)


def _block_product(tables: list[np.ndarray], blocks: list[tuple[int, ...]],
                   scenario: Scenario) -> np.ndarray:
    """Outer product of block tables, axes rearranged to global party order."""
    combined = np.ones(())
    axis_parties_settings: list[int] = []
    axis_parties_outcomes: list[int] = []
    for tbl, block in zip(tables, blocks):
        combined = np.multiply.outer(combined, tbl)
        axis_parties_settings.extend(block)
        axis_parties_outcomes.extend(block)
    # combined axes: per block, its settings then its outcomes; flatten order:
    # [b0 settings, b0 outcomes, b1 settings, b1 outcomes, ...]
    axes_order = []
    pos = 0
    setting_axis_of: dict[int, int] = {}
    outcome_axis_of: dict[int, int] = {}
    for tbl, block in zip(tables, blocks):
        n = len(block)
        for i, p in enumerate(block):
            setting_axis_of[p] = pos + i
            outcome_axis_of[p] = pos + n + i
        pos += 2 * n
    for p in range(scenario.parties):
        axes_order.append(setting_axis_of[p])
    for p in range(scenario.parties):
        axes_order.append(outcome_axis_of[p])
    return np.transpose(combined, axes_order)


def partial_local_box(
    blocks: tuple[tuple[int, ...], tuple[int, ...]],
    terms: list[tuple[Behavior, Behavior]],
    weights: list[float],
) -> Behavior:
    """Convex mixture of block products over one fixed two-block partition.

    Each term supplies one behavior per block; inside a block the behavior
    may be signalling, but the blocks are uncorrelated within each term.
    """
    block1, block2 = (tuple(sorted(set(blk))) for blk in blocks)
    all_parties = tuple(sorted(block1 + block2))
    if len(block1) + len(block2) != len(all_parties) or not block1 or not block2:
        raise ValueError("blocks must form a two-block partition of the parties")
    if all_parties != tuple(range(len(all_parties))):
        raise ValueError("blocks must cover parties 0..N-1")
    if len(terms) != len(weights) or not terms:
        raise ValueError("need one weight per term")
    w = np.asarray(weights, dtype=float)
    if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-12:
        raise ValueError("weights must form a probability distribution")

    n = len(all_parties)
    settings = [0] * n
    outcomes = [0] * n
    b1, b2 = terms[0]
    for blk, beh in ((block1, b1), (block2, b2)):
        for i, p in enumerate(blk):
            settings[p] = beh.scenario.settings[i]
            outcomes[p] = beh.scenario.outcomes[i]
    scenario = Scenario(n, tuple(settings), tuple(outcomes))

    table = np.zeros(scenario.table_shape)
    for wi, (t1, t2) in zip(w, terms):
        for blk, beh in ((block1, t1), (block2, t2)):
            expected = tuple(scenario.settings[p] for p in blk) + tuple(
                scenario.outcomes[p] for p in blk
            )
            if beh.scenario.table_shape != expected:
                raise ValueError("term behavior does not match its block")
        table += wi * _block_product([t1.table, t2.table], [block1, block2], scenario)
    return Behavior(scenario, table)


# ---------------------------------------------------------------------------
# Polytope constraint rows (dense, over the flattened table)
# ---------------------------------------------------------------------------

def flat_index(scenario: Scenario, context: tuple[int, ...], outcomes: tuple[int, ...]) -> int:
    """Position of a table entry in the row-major flattened table."""
    return int(np.ravel_multi_index(context + outcomes, scenario.table_shape))


def normalization_constraints(scenario: Scenario) -> tuple[np.ndarray, np.ndarray]:
    """Equality rows requiring each context's outcomes to sum to 1."""
    rows = np.zeros((scenario.n_contexts, scenario.table_size))
    for i, ctx in enumerate(scenario.contexts()):
        for outs in scenario.outcome_tuples():
            rows[i, flat_index(scenario, ctx, outs)] = 1.0
    return rows, np.ones(scenario.n_contexts)


def no_signalling_constraints(scenario: Scenario) -> tuple[np.ndarray, np.ndarray]:
    """Equality rows: for every party, pair of its settings, context of the
    other parties, and outcome tuple of the other parties, the summed-out
    marginals agree."""
    rows = []
    n = scenario.parties
    for k in range(n):
        others = [p for p in range(n) if p != k]
        other_settings = [range(scenario.settings[p]) for p in others]
        other_outcomes = [range(scenario.outcomes[p]) for p in others]
        for s1, s2 in itertools.combinations(range(scenario.settings[k]), 2):
            for o_ctx in itertools.product(*other_settings):
                for o_out in itertools.product(*other_outcomes):
                    row = np.zeros(scenario.table_size)
                    ctx1, ctx2, outs = [0] * n, [0] * n, [0] * n
                    for idx, p in enumerate(others):
                        ctx1[p] = ctx2[p] = o_ctx[idx]
                        outs[p] = o_out[idx]
                    ctx1[k], ctx2[k] = s1, s2
                    for ak in range(scenario.outcomes[k]):
                        outs[k] = ak
                        row[flat_index(scenario, tuple(ctx1), tuple(outs))] += 1.0
                        row[flat_index(scenario, tuple(ctx2), tuple(outs))] -= 1.0
                    rows.append(row)
    if not rows:
        return np.zeros((0, scenario.table_size)), np.zeros(0)
    return np.array(rows), np.zeros(len(rows))


# ---------------------------------------------------------------------------
# JSON serialization
# ---------------------------------------------------------------------------

def behavior_to_json_dict(b: Behavior) -> dict:
    """Schema: parties, settings, outcomes, and a table keyed by the
    comma-joined setting vector with flat outcome-major probabilities."""
    s = b.scenario
    table = {}
    for ctx in s.contexts():
        key = ",".join(str(c) for c in ctx)
        table[key] = [float(v) for v in b.table[ctx].reshape(-1)]
    return {
        "parties": s.parties,
        "settings": list(s.settings),
        "outcomes": list(s.outcomes),
        "table": table,
    }


def behavior_from_json_dict(data: dict) -> Behavior:
    """Inverse of :func:`behavior_to_json_dict`; raises ValueError on any
    schema defect (missing keys, wrong lengths, malformed context keys)."""
    if not isinstance(data, dict):
        raise ValueError("behavior JSON must be an object")
    for key in ("parties", "settings", "outcomes", "table"):
        if key not in data:
            raise ValueError(f"behavior JSON is missing the '{key}' field")
    try:
        parties = int(data["parties"])
        settings = tuple(int(x) for x in data["settings"])
        outcomes = tuple(int(x) for x in data["outcomes"])
    except (TypeError, ValueError) as exc:
        raise ValueError(f"malformed scenario fields: {exc}") from None
    scenario = Scenario(parties, settings, outcomes)
    table_data = data["table"]
    if not isinstance(table_data, dict):
        raise ValueError("'table' must map setting vectors to probability lists")
    n_out = 1
    for o in outcomes:
        n_out *= o
    table = np.zeros(scenario.table_shape)
    seen = set()
    for key, values in table_data.items():
        try:
            ctx = tuple(int(part) for part in key.split(","))
        except ValueError:
            raise ValueError(f"malformed context key '{key}'") from None
        if len(ctx) != parties or any(
            not 0 <= c < settings[p] for p, c in enumerate(ctx)
        ):
            raise ValueError(f"context key '{key}' out of range")
        row = np.asarray(values, dtype=float)
        if row.shape != (n_out,):
            raise ValueError(
                f"context '{key}' needs {n_out} probabilities, got {row.size}"
            )
        table[ctx] = row.reshape(tuple(outcomes))
        seen.add(ctx)
    missing = [ctx for ctx in scenario.contexts() if ctx not in seen]
    if missing:
        raise ValueError(f"table is missing context {missing[0]}")
    return Behavior(scenario, table)
