"""Tests for the exact counting layer built on rational arithmetic."""

from fractions import Fraction
import math

import numpy as np
import pytest

import generators
from bayeskit import (
    HYPOTHESIS,
    OTHER,
    RIVAL,
    CasePartition,
    ImpossibleEventError,
    UndefinedFactorError,
    ValidationError,
    odds_from_posteriors,
    posterior_over_causes,
)


class TestConstruction:
    def test_counts_must_be_non_negative_integers(self):
        with pytest.raises(ValidationError):
            CasePartition(-1, 2, 3, 4)
        with pytest.raises(ValidationError):
            CasePartition(1.5, 2, 3, 4)
        with pytest.raises(ValidationError):
            CasePartition(True, 2, 3, 4)

    def test_each_hypothesis_needs_cases(self):
        with pytest.raises(ValidationError):
            CasePartition(0, 0, 3, 4)
        with pytest.raises(ValidationError):
            CasePartition(3, 4, 0, 0)

    def test_dict_round_trip_uses_primed_keys(self):
        part = CasePartition(2, 1, 1, 2, 5, 3)
        data = part.to_dict()
        assert data == {"m": 2, "n": 1, "m'": 1, "n'": 2, "m''": 5, "n''": 3}
        assert CasePartition.from_dict(data) == part

    def test_from_dict_defaults_third_bucket_to_zero(self):
        part = CasePartition.from_dict({"m": 2, "n": 1, "m'": 1, "n'": 2})
        assert part.m_pp == 0 and part.n_pp == 0

    def test_from_dict_requires_primary_keys(self):
        with pytest.raises(ValidationError):
            CasePartition.from_dict({"m": 2, "n": 1, "m'": 1})


class TestExactProbabilities:
    def test_textbook_partition(self):
        """Counts (2,1,1,2): both priors 1/2, likelihood 2/3, posterior 2/3."""
        part = CasePartition(2, 1, 1, 2)
        assert part.prior(HYPOTHESIS) == Fraction(1, 2)
        assert part.prior(RIVAL) == Fraction(1, 2)
        assert part.likelihood(HYPOTHESIS) == Fraction(2, 3)
        assert part.likelihood(RIVAL) == Fraction(1, 3)
        assert part.posterior(HYPOTHESIS) == Fraction(2, 3)
        assert part.posterior(RIVAL) == Fraction(1, 3)

    def test_symmetric_counts_give_even_posterior(self):
        part = CasePartition(1, 9, 1, 9)
        assert part.posterior(HYPOTHESIS) == Fraction(1, 2)

    def test_results_are_fractions_not_floats(self):
        part = CasePartition(1, 2, 3, 4, 5, 6)
        assert isinstance(part.prior(HYPOTHESIS), Fraction)
        assert isinstance(part.posterior(RIVAL), Fraction)

    def test_third_bucket_shifts_priors_but_not_likelihoods(self):
        bare = CasePartition(2, 1, 1, 2)
        padded = CasePartition(2, 1, 1, 2, 6, 6)
        assert padded.prior(HYPOTHESIS) == Fraction(3, 18)
        assert padded.likelihood(HYPOTHESIS) == bare.likelihood(HYPOTHESIS)
        # Extra explainers dilute the posterior as well.
        assert padded.posterior(HYPOTHESIS) == Fraction(2, 2 + 1 + 6)

    def test_joint_probabilities_sum_to_exactly_one(self):
        rng = np.random.default_rng(77)
        for _ in range(200):
            counts = generators.random_partition_counts(rng, high=10_000)
            joint = CasePartition(*counts).joint_probabilities()
            assert sum(joint.values(), Fraction(0)) == Fraction(1)

    def test_other_has_no_conditional_role(self):
        part = CasePartition(2, 1, 1, 2, 3, 3)
        with pytest.raises(ValidationError):
            part.likelihood(OTHER)
        with pytest.raises(ValidationError):
            part.posterior(OTHER)

    def test_unobserved_event_has_no_posterior(self):
        part = CasePartition(0, 2, 0, 2, 0, 1)
        with pytest.raises(ImpossibleEventError):
            part.posterior(HYPOTHESIS)


class TestTheorem:
    def test_textbook_report(self):
        report = CasePartition(2, 1, 1, 2).verify_theorem()
        assert report.equal_priors is True
        assert report.posterior_ratio == Fraction(2)
        assert report.likelihood_ratio == Fraction(2)
        assert report.prior_ratio == Fraction(1)
        assert report.general_identity_residual == Fraction(0)

    def test_third_bucket_does_not_disturb_the_identity(self):
        report = CasePartition(2, 2, 1, 3, 5, 0).verify_theorem()
        assert report.equal_priors is True
        assert report.posterior_ratio == report.likelihood_ratio == Fraction(2)

    def test_residual_is_exactly_zero(self):
        """The identity holds in integer arithmetic, not just approximately."""
        rng = np.random.default_rng(2024)
        for _ in range(500):
            counts = generators.random_partition_counts(rng, high=1_000_000)
            report = CasePartition(*counts).verify_theorem()
            assert report.general_identity_residual == Fraction(0)

    def test_equal_priors_collapse_to_likelihood_ratio(self):
        rng = np.random.default_rng(2025)
        for _ in range(500):
            counts = generators.random_partition_counts(rng, high=100_000, equal_priors=True)
            report = CasePartition(*counts).verify_theorem()
            assert report.equal_priors
            assert report.posterior_ratio == report.likelihood_ratio

    def test_rival_ruled_out_gives_infinite_ratios(self):
        report = CasePartition(2, 1, 0, 3).verify_theorem()
        assert report.posterior_ratio == math.inf
        assert report.likelihood_ratio == math.inf
        assert report.prior_ratio == Fraction(3, 3)
        assert report.general_identity_residual == Fraction(0)

    def test_event_never_observed_is_impossible(self):
        with pytest.raises(ImpossibleEventError):
            CasePartition(0, 3, 0, 3).verify_theorem()

    def test_zero_over_zero_likelihoods_are_undefined(self):
        with pytest.raises(UndefinedFactorError):
            CasePartition(0, 3, 0, 3, 4, 0).verify_theorem()


class TestBridgeToCausalSystem:
    def test_two_cause_bridge_when_third_bucket_empty(self):
        system = CasePartition(2, 1, 1, 2).to_causal_system()
        assert system.labels == (HYPOTHESIS, RIVAL)
        post = posterior_over_causes(system, "E")
        np.testing.assert_allclose(post, [2.0 / 3.0, 1.0 / 3.0], rtol=1e-15)

    def test_three_cause_bridge(self):
        part = CasePartition(2, 1, 1, 2, 5, 1)
        system = part.to_causal_system()
        assert system.labels == (HYPOTHESIS, RIVAL, OTHER)
        post = posterior_over_causes(system, "E")
        assert post[0] == pytest.approx(float(part.posterior(HYPOTHESIS)), rel=1e-12)
        assert post[2] == pytest.approx(5.0 / 8.0, rel=1e-12)

    def test_float_bridge_matches_exact_ratio(self):
        rng = np.random.default_rng(307)
        for _ in range(200):
            counts = generators.random_partition_counts(rng, high=1000)
            part = CasePartition(*counts)
            if part.likelihood(RIVAL) == 0:
                continue  # infinite odds have no meaningful relative error
            state = odds_from_posteriors(part.to_causal_system(), "E", 0, 1)
            exact = part.posterior(HYPOTHESIS) / part.posterior(RIVAL)
            assert state.odds == pytest.approx(float(exact), rel=1e-12)
