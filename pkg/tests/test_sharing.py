"""Extensions of two-party behaviors: delta construction and symmetric
no-signalling feasibility."""

import numpy as np
import pytest

from monogamy import (
    ExtensionCertificate,
    InfeasibleExtension,
    chsh_value,
    deterministic_box,
    is_n_shareable,
    is_no_signalling,
    mixture,
    ns_extension,
    pr_box,
    random_shareable_behavior,
    uniform_box,
    unrestricted_extension,
    validate_behavior,
)
from monogamy.sharing import (
    _joint_symmetry_residual,
    _marginal_residual_ns,
    discard_last_clone,
)
from monogamy.localpoly import deterministic_behaviors
from conftest import chsh_scenario, random_behavior, tsirelson_behavior


class TestUnrestricted:
    def test_pr_box_three_clones_exact(self):
        cert = unrestricted_extension(pr_box(), 3)
        assert cert.symmetry_residual == 0.0
        assert cert.marginal_residual == 0.0
        assert validate_behavior(cert.behavior, tol=1e-15).passed

    def test_uniform_two_clones(self):
        cert = unrestricted_extension(uniform_box(chsh_scenario()), 2)
        assert cert.symmetry_residual == 0.0
        assert cert.marginal_residual == 0.0

    def test_deterministic_five_clones_binary_table(self):
        base = deterministic_box(chsh_scenario(), ((0, 1), (1, 0)))
        cert = unrestricted_extension(base, 5)
        assert set(np.unique(cert.behavior.table)) <= {0.0, 1.0}
        assert cert.marginal_residual == 0.0

    def test_signalling_base_accepted_and_result_signalling(self, rng):
        # The construction exists for every behavior; for a generic base the
        # output signals (clone marginals depend on the first clone's
        # setting).
        base = random_behavior(rng, chsh_scenario())
        cert = unrestricted_extension(base, 2)
        assert cert.symmetry_residual == 0.0
        assert cert.marginal_residual == 0.0
        assert not is_no_signalling(cert.behavior).is_no_signalling

    def test_random_bases_all_exact(self, rng):
        for _ in range(10):
            base = random_behavior(rng, chsh_scenario())
            for n in (2, 3):
                cert = unrestricted_extension(base, n)
                assert cert.symmetry_residual == 0.0
                assert cert.marginal_residual == 0.0


class TestNsExtension:
    def test_uniform_four_clones_feasible(self):
        result = ns_extension(uniform_box(chsh_scenario()), 4)
        assert isinstance(result, ExtensionCertificate)
        assert result.symmetry_residual <= 1e-7
        assert result.marginal_residual <= 1e-7
        assert is_no_signalling(result.behavior, tol=1e-6).is_no_signalling

    def test_pr_box_two_clones_infeasible(self):
        result = ns_extension(pr_box(), 2)
        assert isinstance(result, InfeasibleExtension)
        assert result.violation > 1e-3

    def test_tsirelson_behavior_infeasible(self):
        result = ns_extension(tsirelson_behavior(), 2)
        assert isinstance(result, InfeasibleExtension)

    def test_signalling_base_rejected(self, rng):
        with pytest.raises(ValueError, match="signalling"):
            ns_extension(random_behavior(rng, chsh_scenario()), 2)

    def test_local_mixture_three_clones_feasible(self, rng):
        vertices = deterministic_behaviors(chsh_scenario())
        picks = rng.choice(len(vertices), size=5, replace=False)
        weights = rng.dirichlet(np.ones(5))
        base = mixture([vertices[i] for i in picks], list(weights))
        result = ns_extension(base, 3)
        assert isinstance(result, ExtensionCertificate)

    def test_monotonicity_via_marginalized_certificate(self, rng):
        # A feasible N=3 certificate marginalizes to a valid N=2 one.
        vertices = deterministic_behaviors(chsh_scenario())
        picks = rng.choice(len(vertices), size=4, replace=False)
        base = mixture([vertices[i] for i in picks], [0.4, 0.3, 0.2, 0.1])
        cert = ns_extension(base, 3)
        assert isinstance(cert, ExtensionCertificate)
        reduced = discard_last_clone(cert)
        assert validate_behavior(reduced, tol=1e-6).passed
        assert is_no_signalling(reduced, tol=1e-6).is_no_signalling
        assert _joint_symmetry_residual(reduced) <= 1e-6
        assert _marginal_residual_ns(reduced, base) <= 1e-6


class TestWrapper:
    def test_unrestricted_always_shareable(self, rng):
        base = random_behavior(rng, chsh_scenario())
        for n in (1, 2, 4):
            result = is_n_shareable(base, n, mode="unrestricted")
            assert result.shareable
            assert result.score == 0.0

    def test_pr_not_two_shareable_ns(self):
        result = is_n_shareable(pr_box(), 2, mode="ns")
        assert not result.shareable
        assert result.score > 0

    def test_unknown_mode_rejected(self):
        with pytest.raises(ValueError):
            is_n_shareable(pr_box(), 2, mode="quantum")


class TestMasanesProperty:
    def test_two_shareable_implies_chsh_bound(self, rng):
        for _ in range(20):
            pair, witness = random_shareable_behavior(rng)
            assert validate_behavior(pair, tol=1e-6).passed
            assert is_no_signalling(pair, tol=1e-6).is_no_signalling
            assert abs(chsh_value(pair)) <= 2 + 1e-6

    def test_sampled_pairs_are_two_shareable(self, rng):
        # The generating witness is symmetric and no-signalling, so the
        # extension LP must also report feasibility.
        pair, _ = random_shareable_behavior(rng)
        result = ns_extension(pair, 2, tol=1e-6)
        assert isinstance(result, ExtensionCertificate)

    def test_contrapositive_on_violating_behaviors(self, rng):
        from conftest import random_violating_behavior

        for _ in range(5):
            b = random_violating_behavior(rng)
            assert isinstance(ns_extension(b, 2), InfeasibleExtension)
