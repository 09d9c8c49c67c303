"""Tests for the Gaussian error model and observation handling."""

import io
import math

import numpy as np
import pytest

import oracles
from bayeskit import (
    GaussianError,
    InvalidPredictionError,
    InvertedIntervalError,
    ObservationRecord,
    ObservationSet,
    ValidationError,
    interval_probability,
    log_omega,
    log_phi_density,
    phi_density,
)


class TestGaussianError:
    @pytest.mark.parametrize("sigma", [0.0, -1.0, math.inf, math.nan])
    def test_rejects_bad_sigma(self, sigma):
        with pytest.raises(ValidationError):
            GaussianError(sigma)


class TestDensity:
    def test_peak_value_for_unit_sigma(self):
        assert phi_density(0.0, GaussianError(1.0)) == pytest.approx(
            0.3989422804014327, rel=1e-12
        )

    def test_matches_high_precision_reference(self):
        rng = np.random.default_rng(8)
        for _ in range(200):
            delta = float(rng.uniform(-10.0, 10.0))
            sigma = float(rng.uniform(0.05, 5.0))
            got = phi_density(delta, GaussianError(sigma))
            want = oracles.gaussian_pdf_highprec(delta, sigma)
            assert got == pytest.approx(want, rel=1e-12)

    def test_even_symmetry_is_bit_exact(self):
        err = GaussianError(1.7)
        for delta in (0.3, 1.0, 2.5, 7.0):
            assert phi_density(delta, err) == phi_density(-delta, err)

    def test_strictly_decreasing_in_absolute_deviation(self):
        err = GaussianError(0.8)
        deltas = np.linspace(0.0, 6.0, 50)
        densities = [phi_density(float(d), err) for d in deltas]
        assert all(a > b for a, b in zip(densities, densities[1:]))

    def test_log_density_agrees_where_density_is_representable(self):
        err = GaussianError(2.0)
        for delta in (0.0, 0.5, 3.0, 20.0):
            assert log_phi_density(delta, err) == pytest.approx(
                math.log(phi_density(delta, err)), rel=1e-12
            )

    def test_log_density_survives_where_density_underflows(self):
        err = GaussianError(1.0)
        assert phi_density(300.0, err) == 0.0
        log_value = log_phi_density(300.0, err)
        assert math.isfinite(log_value)
        assert log_value == pytest.approx(-0.5 * 300.0**2 - 0.5 * math.log(2 * math.pi), rel=1e-12)


class TestIntervalProbability:
    def test_one_sigma_interval(self):
        got = interval_probability(-1.0, 1.0, GaussianError(1.0))
        assert got == pytest.approx(0.6826894921370859, rel=1e-12)

    def test_matches_quadrature(self):
        rng = np.random.default_rng(15)
        for _ in range(100):
            sigma = float(rng.uniform(0.1, 4.0))
            a, b = sorted(rng.uniform(-8.0 * sigma, 8.0 * sigma, size=2))
            got = interval_probability(float(a), float(b), GaussianError(sigma))
            want = oracles.gaussian_interval_quad(float(a), float(b), sigma)
            assert got == pytest.approx(want, rel=1e-9, abs=1e-15)

    def test_far_tail_keeps_relative_accuracy(self):
        """Eight to nine sigmas out the probability is ~6e-16; naive CDF
        subtraction would cancel to garbage there."""
        err = GaussianError(1.0)
        for lo, hi in [(8.0, 9.0), (-9.0, -8.0), (10.0, 12.0)]:
            got = interval_probability(lo, hi, err)
            want = oracles.gaussian_interval_highprec(lo, hi, 1.0)
            assert got == pytest.approx(want, rel=1e-12)

    def test_mirror_symmetry(self):
        err = GaussianError(1.3)
        assert interval_probability(-2.0, -0.5, err) == interval_probability(0.5, 2.0, err)

    def test_half_lines_and_whole_line(self):
        err = GaussianError(2.5)
        assert interval_probability(-math.inf, math.inf, err) == 1.0
        assert interval_probability(-math.inf, 0.0, err) == pytest.approx(0.5, rel=1e-15)
        assert interval_probability(0.0, math.inf, err) == pytest.approx(0.5, rel=1e-15)

    def test_degenerate_interval_has_zero_mass(self):
        assert interval_probability(1.5, 1.5, GaussianError(1.0)) == 0.0

    def test_adjoining_intervals_add_up(self):
        rng = np.random.default_rng(33)
        err = GaussianError(1.0)
        for _ in range(200):
            a, b, c = sorted(rng.uniform(-6.0, 6.0, size=3))
            left = interval_probability(float(a), float(b), err)
            right = interval_probability(float(b), float(c), err)
            whole = interval_probability(float(a), float(c), err)
            assert left + right == pytest.approx(whole, rel=1e-12, abs=1e-15)

    def test_inverted_bounds_are_rejected(self):
        with pytest.raises(InvertedIntervalError):
            interval_probability(1.0, -1.0, GaussianError(1.0))

    def test_nan_bounds_are_rejected(self):
        with pytest.raises(ValidationError):
            interval_probability(math.nan, 1.0, GaussianError(1.0))


def make_set(values, sigmas, ts=None):
    records = []
    for k, (v, s) in enumerate(zip(values, sigmas)):
        covs = {} if ts is None else {"t": ts[k]}
        records.append(ObservationRecord(covs, v, GaussianError(s)))
    return ObservationSet(records)


class TestObservationSet:
    def test_basic_accessors(self):
        obs = make_set([1.0, 2.0, 3.0], [0.1, 0.2, 0.3], ts=[0.0, 1.0, 2.0])
        assert obs.nu == 3
        assert obs.covariate_names == ("t",)
        assert obs.values() == (1.0, 2.0, 3.0)
        assert obs.sigmas() == (0.1, 0.2, 0.3)

    def test_rejects_empty_and_mismatched_schemas(self):
        with pytest.raises(ValidationError):
            ObservationSet([])
        a = ObservationRecord({"t": 0.0}, 1.0, GaussianError(1.0))
        b = ObservationRecord({"x": 0.0}, 1.0, GaussianError(1.0))
        with pytest.raises(ValidationError, match="record 1"):
            ObservationSet([a, b])

    def test_rejects_non_finite_values(self):
        with pytest.raises(ValidationError):
            ObservationRecord({}, math.inf, GaussianError(1.0))
        with pytest.raises(ValidationError):
            ObservationRecord({"t": math.nan}, 1.0, GaussianError(1.0))

    def test_csv_round_trip(self, tmp_path):
        path = tmp_path / "obs.csv"
        path.write_text("t,value,sigma\n0.0,1.5,0.1\n1.0,2.5,0.2\n", encoding="utf-8")
        obs = ObservationSet.from_csv(path)
        assert obs.nu == 2
        assert obs.covariate_names == ("t",)
        assert obs.records[1].covariates["t"] == 1.0
        assert obs.records[1].error.sigma == 0.2

    def test_csv_accepts_file_handles_and_unicode_headers(self):
        handle = io.StringIO("température,value,sigma\n20.5,1.0,0.5\n")
        obs = ObservationSet.from_csv(handle)
        assert obs.covariate_names == ("température",)

    def test_csv_requires_value_and_sigma_columns(self):
        with pytest.raises(ValidationError, match="sigma"):
            ObservationSet.from_csv(io.StringIO("t,value\n0.0,1.0\n"))

    def test_csv_reports_bad_cells_by_line(self):
        handle = io.StringIO("t,value,sigma\n0.0,1.0,0.1\noops,2.0,0.1\n")
        with pytest.raises(ValidationError, match="line 3"):
            ObservationSet.from_csv(handle)

    def test_csv_rejects_header_only_files(self):
        with pytest.raises(ValidationError):
            ObservationSet.from_csv(io.StringIO("t,value,sigma\n"))


class TestLogOmega:
    def test_sum_of_logs(self):
        """Three residuals 1, -1, 2 with sigmas 1, 1, 2."""
        obs = make_set([1.0, -1.0, 2.0], [1.0, 1.0, 2.0])
        got = log_omega(obs, [0.0, 0.0, 0.0])
        want = math.fsum(
            [
                -math.log(s) - 0.5 * math.log(2 * math.pi) - 0.5 * (d / s) ** 2
                for d, s in [(1.0, 1.0), (-1.0, 1.0), (2.0, 2.0)]
            ]
        )
        assert got == pytest.approx(want, rel=1e-12)

    def test_translation_invariance(self):
        """Shifting data and predictions together changes nothing."""
        rng = np.random.default_rng(71)
        for _ in range(100):
            nu = int(rng.integers(1, 8))
            values = rng.normal(0.0, 3.0, size=nu)
            sigmas = rng.uniform(0.1, 2.0, size=nu)
            preds = rng.normal(0.0, 3.0, size=nu)
            shift = float(rng.uniform(-50.0, 50.0))
            base = log_omega(make_set(values, sigmas), list(preds))
            moved = log_omega(make_set(values + shift, sigmas), list(preds + shift))
            assert moved == pytest.approx(base, rel=1e-12, abs=1e-12)

    def test_splits_over_disjoint_subsets(self):
        rng = np.random.default_rng(72)
        values = rng.normal(0.0, 1.0, size=9)
        sigmas = rng.uniform(0.2, 1.5, size=9)
        preds = rng.normal(0.0, 1.0, size=9)
        whole = log_omega(make_set(values, sigmas), list(preds))
        first = log_omega(make_set(values[:4], sigmas[:4]), list(preds[:4]))
        second = log_omega(make_set(values[4:], sigmas[4:]), list(preds[4:]))
        assert whole == pytest.approx(first + second, rel=1e-12)

    def test_finite_far_from_the_data(self):
        obs = make_set([0.0], [1.0])
        assert math.isfinite(log_omega(obs, [500.0]))

    def test_prediction_count_must_match(self):
        obs = make_set([1.0, 2.0], [0.1, 0.1])
        with pytest.raises(ValidationError):
            log_omega(obs, [1.0])

    def test_non_finite_prediction_carries_its_index(self):
        obs = make_set([1.0, 2.0, 3.0], [0.1, 0.1, 0.1])
        with pytest.raises(InvalidPredictionError) as info:
            log_omega(obs, [1.0, math.nan, 3.0])
        assert info.value.index == 1
        with pytest.raises(InvalidPredictionError) as info:
            log_omega(obs, [1.0, 2.0, math.inf])
        assert info.value.index == 2
