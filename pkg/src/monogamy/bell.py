"""Two-party Bell functionals over correlators and single-party marginals."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import Behavior, correlator, marginal


@dataclass(frozen=True, eq=False)
class BellFunctional:
    """Affine functional on two-party behaviors.

    ``correlators[x, y]`` weights the full correlator at settings (x, y);
    ``marginals_a[x]`` and ``marginals_b[y]`` weight the single-party
    expectation values.  ``local_bound`` is the maximum over deterministic
    strategies (see ``localpoly.local_bound``).
    """

    correlators: np.ndarray
    marginals_a: np.ndarray
    marginals_b: np.ndarray
    local_bound: float
    name: str = ""

    def __post_init__(self):
        corr = np.asarray(self.correlators, dtype=float)
        ma = np.asarray(self.marginals_a, dtype=float)
        mb = np.asarray(self.marginals_b, dtype=float)
        if corr.ndim != 2 or ma.shape != (corr.shape[0],) or mb.shape != (corr.shape[1],):
            raise ValueError("coefficient shapes are inconsistent")
        object.__setattr__(self, "correlators", corr)
        object.__setattr__(self, "marginals_a", ma)
        object.__setattr__(self, "marginals_b", mb)

    @property
    def settings(self) -> tuple[int, int]:
        return self.correlators.shape


def chsh() -> BellFunctional:
    """AB + AB' + A'B - A'B'; local bound 2, quantum bound 2*sqrt(2),
    no-signalling bound 4."""
    return BellFunctional(
        correlators=np.array([[1.0, 1.0], [1.0, -1.0]]),
        marginals_a=np.zeros(2),
        marginals_b=np.zeros(2),
        local_bound=2.0,
        name="chsh",
    )


def collins_gisin() -> BellFunctional:
    """The three-setting two-party functional with local bound 4:
    AB + A'B + A''B + AB' + A'B' + AB'' - A''B' - A'B'' + A + A' - B - B'."""
    return BellFunctional(
        correlators=np.array([
            [1.0, 1.0, 1.0],
            [1.0, 1.0, -1.0],
            [1.0, -1.0, 0.0],
        ]),
        marginals_a=np.array([1.0, 1.0, 0.0]),
        marginals_b=np.array([-1.0, -1.0, 0.0]),
        local_bound=4.0,
        name="collins-gisin",
    )


def single_party_expectation(b: Behavior, party: int, setting: int) -> float:
    """Expectation of the +-1-valued outcome of one party at one setting.

    The other parties' settings are pinned to 0; for no-signalling behaviors
    the choice is immaterial.
    """
    s = b.scenario
    if s.outcomes[party] != 2:
        raise ValueError("single-party expectation requires a dichotomic party")
    context = tuple(setting if p == party else 0 for p in range(s.parties))
    m = marginal(b, (party,), context)
    dist = m.table[(setting,)]
    return float(dist[0] - dist[1])


def bell_value(b: Behavior, f: BellFunctional) -> float:
    """Evaluate the functional on a two-party behavior."""
    s = b.scenario
    if s.parties != 2:
        raise ValueError("Bell functionals act on two-party behaviors")
    if s.settings != f.settings:
        raise ValueError(
            f"behavior has settings {s.settings}, functional needs {f.settings}"
        )
    if not s.is_dichotomic():
        raise ValueError("Bell functionals require dichotomic outcomes")
    value = 0.0
    for x in range(f.settings[0]):
        for y in range(f.settings[1]):
            c = f.correlators[x, y]
            if c != 0.0:
                value += c * correlator(b, (x, y))
    for x in range(f.settings[0]):
        if f.marginals_a[x] != 0.0:
            value += f.marginals_a[x] * single_party_expectation(b, 0, x)
    for y in range(f.settings[1]):
        if f.marginals_b[y] != 0.0:
            value += f.marginals_b[y] * single_party_expectation(b, 1, y)
    return float(value)


def chsh_value(b: Behavior) -> float:
    return bell_value(b, chsh())
