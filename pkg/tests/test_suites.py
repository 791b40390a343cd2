import numpy as np
import pytest

from lifespan_lab.suites import (
    SuiteResult,
    blend_identity_suite,
    count_violations,
    embedding_suite,
    envelope_derivative_suite,
    nonlinearity_difference_suite,
    profile_identity_suite,
    run_property_suites,
    saturates,
    scalar_inequalities_suite,
    scalar_inequality_samples,
    smoothing_error_suite,
)


class TestScalarInequalities:
    def test_suite_passes(self):
        result = scalar_inequalities_suite(seed=0, n=100_000)
        assert result.passed
        assert result.sample_size > 90_000
        # the mean value theorem gives q - 1 <= 2 for the first family
        assert result.details["power_gap"] <= 2.0 + 1e-9

    def test_harness_detects_perturbed_constant(self):
        rng = np.random.default_rng(0)
        r1, _ = scalar_inequality_samples(rng, 50_000)
        fitted = float(np.max(r1))
        assert count_violations(r1, fitted) == 0
        assert count_violations(r1, fitted / 10.0) > 0


class TestSaturation:
    def test_flat_ladder_ok(self):
        assert saturates([5.0, 5.2, 5.1, 5.05])

    def test_doubling_tail_rejected(self):
        assert not saturates([1.0, 2.0, 4.0, 8.0])

    def test_decreasing_tail_ok(self):
        assert saturates([8.0, 4.0, 2.0, 1.0])


class TestIndividualSuites:
    def test_embedding(self):
        result = embedding_suite()
        assert result.passed
        assert result.fitted_constant < 1.0

    def test_nonlinearity_difference(self):
        result = nonlinearity_difference_suite(seed=1, n=80)
        assert result.passed

    def test_envelope_derivatives(self):
        result = envelope_derivative_suite()
        assert result.passed
        assert "base_l1_m3" in result.details

    def test_smoothing_error(self):
        result = smoothing_error_suite()
        assert result.passed
        assert result.fitted_constant < 1e-3

    def test_profile_identity(self):
        result = profile_identity_suite(seed=2, n=4)
        assert result.passed
        assert result.fitted_constant >= 1.9

    def test_blend_identity(self):
        result = blend_identity_suite()
        assert result.passed


class TestDriver:
    def test_all_suites_pass_and_report(self):
        results = run_property_suites(seed=12345)
        assert all(isinstance(r, SuiteResult) for r in results)
        assert all(r.passed for r in results)
        for r in results:
            doc = r.to_dict()
            assert set(doc) == {
                "name", "passed", "fitted_constant", "sample_size", "details", "message",
            }
            assert doc["sample_size"] > 0
            assert np.isfinite(doc["fitted_constant"])
