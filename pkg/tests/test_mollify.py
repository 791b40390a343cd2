import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lifespan_lab import Grid1D, bump_kernel, mollification_error, mollify
from lifespan_lab.errors import GridResolutionError
from lifespan_lab.grids import ComplexField, fourier_transform, l2_norm, spectral_derivative
from lifespan_lab.mollify import (
    bump_mass,
    mollification_error_envelope,
    power_law,
    power_law_derivative,
)

from conftest import random_smooth

#: peak of the unit bump after normalisation, exp(-1)/integral(exp(-1/(1-y^2)))
UNIT_BUMP_PEAK = np.exp(-1.0) / 0.44399381616807865


class TestKernel:
    def test_unit_mass_exact(self):
        for delta in (0.5, 0.1):
            k = bump_kernel(delta, delta / 16)
            assert abs(k.spacing * k.weights.sum() - 1.0) < 1e-12

    def test_compact_support(self):
        k = bump_kernel(0.5, 0.05)
        assert np.all(k.weights[np.abs(k.offsets) >= 0.5] == 0.0)
        assert np.all(k.weights[np.abs(k.offsets) < 0.5] > 0.0)

    def test_unit_profile_bounded(self):
        # the unscaled bump stays within [0, 1]; its normalised peak ~ 0.8286
        for delta in (0.5, 0.1):
            k = bump_kernel(delta, delta / 64)
            scaled_peak = delta * k.weights.max()
            assert scaled_peak <= 1.0
            assert abs(scaled_peak - UNIT_BUMP_PEAK) < 2e-3

    def test_peak_scales_inversely_with_width(self):
        k1 = bump_kernel(0.5, 0.5 / 64)
        k2 = bump_kernel(0.1, 0.1 / 64)
        assert abs(k1.weights.max() / k2.weights.max() - 0.2) < 1e-3

    def test_under_resolved_rejected(self):
        with pytest.raises(GridResolutionError, match="spacing"):
            bump_kernel(0.1, 0.05)

    def test_mass_constant_known(self):
        assert abs(bump_mass() - 0.44399381616807865) < 1e-12


class TestMollify:
    @settings(max_examples=20, deadline=None)
    @given(st.floats(-5.0, 5.0), st.floats(-5.0, 5.0))
    def test_constants_are_fixed_points(self, re, im):
        k = bump_kernel(0.3, 0.02)
        c = complex(re, im)
        out = mollify(np.full(400, c), k)
        assert np.abs(out - c).max() < 1e-12 * max(1.0, abs(c))

    def test_linear_preserved_in_interior(self):
        k = bump_kernel(0.3, 0.02)
        axis = 0.02 * np.arange(600)
        out = mollify(axis, k)
        inner = slice(k.reach + 1, -k.reach - 1)
        assert np.abs(out[inner] - axis[inner]).max() < 1e-11

    def test_matches_fine_quadrature(self):
        # oracle: the same convolution integral on an 8x finer axis
        delta, h = 0.25, 0.25 / 64
        axis = np.arange(-12.0, 12.0 + h / 2, h)
        f = np.exp(-axis**2 / 2.0)
        coarse = mollify(f, bump_kernel(delta, h))
        fine = bump_kernel(delta, h / 8)
        w = fine.spacing * fine.weights
        idx = np.nonzero(np.abs(axis) < 8.0)[0][::5]
        worst = max(
            abs(coarse[i] - np.sum(w * np.exp(-((axis[i] - fine.offsets) ** 2) / 2.0)))
            for i in idx
        )
        assert worst <= 1e-9

    @settings(max_examples=15, deadline=None)
    @given(st.integers(0, 10**6))
    def test_young_inequality(self, seed):
        grid = Grid1D(48.0, 1024)
        fld = random_smooth(np.random.default_rng(seed), grid)
        hat = fourier_transform(fld)
        k = bump_kernel(0.5, hat.grid.dx)
        before = l2_norm(np.abs(hat.values), hat.grid.dx)
        after = l2_norm(mollify(np.abs(hat.values), k), hat.grid.dx)
        assert after <= before * (1.0 + 1e-12)

    def test_commutes_with_derivative(self, desk_grid):
        phi = ComplexField(np.exp(-desk_grid.x**2 / 2.0), desk_grid)
        hat = fourier_transform(phi)
        k = bump_kernel(0.4, hat.grid.dx)
        d_then_m = mollify(spectral_derivative(hat).values.real, k)
        m_then_d = spectral_derivative(hat.with_values(mollify(hat.values.real, k))).values.real
        assert np.abs(d_then_m - m_then_d).max() < 1e-8


class TestPowerLawDerivative:
    def test_gaussian_closed_form(self):
        xi = np.linspace(-8, 8, 1601)
        for p in (2.0, 2.5, 2.9):
            phat = np.exp(-xi**2 / 2.0).astype(complex)
            dphat = -xi * np.exp(-xi**2 / 2.0)
            got = power_law_derivative(phat, dphat, p)
            want = -(p - 1.0) * xi * np.exp(-(p - 1.0) * xi**2 / 2.0)
            assert np.abs(got - want).max() < 1e-12

    def test_zero_guarded(self):
        phat = np.zeros(5, dtype=complex)
        out = power_law_derivative(phat, np.ones(5, dtype=complex), 2.0)
        assert np.all(out == 0.0)


@pytest.fixture(scope="module")
def gaussian_hat():
    grid = Grid1D(192.0, 2048)
    phi = ComplexField(np.exp(-grid.x**2 / 2.0), grid)
    return fourier_transform(phi)


class TestMollificationError:
    def test_ladder_decreasing_and_small(self, gaussian_hat):
        errors = [mollification_error(gaussian_hat, 2.0, d) for d in (0.4, 0.2, 0.1, 0.05)]
        assert all(b < a for a, b in zip(errors, errors[1:]))
        assert errors[-1] < 1e-3

    def test_plateau_interior_exact(self):
        k = bump_kernel(0.3, 0.02)
        plateau = np.where(np.abs(0.02 * np.arange(1000) - 10.0) < 5.0, 2.0, 0.0)
        out = mollify(plateau, k)
        center = slice(300, 700)
        assert np.abs(out[center] - plateau[center]).max() < 1e-13

    def test_envelope_monotone_and_capped(self, gaussian_hat):
        env = mollification_error_envelope(gaussian_hat, 2.5, (0.4, 0.2, 0.1, 0.05))
        ladder = [env[d] for d in sorted(env)]
        assert all(a <= b for a, b in zip(ladder, ladder[1:]))
        g = power_law(gaussian_hat.values, 2.5)
        dg = power_law_derivative(
            gaussian_hat.values, spectral_derivative(gaussian_hat).values, 2.5
        )
        cap = 2.0 * np.hypot(
            l2_norm(g, gaussian_hat.grid.dx), l2_norm(dg, gaussian_hat.grid.dx)
        )
        assert max(ladder) <= cap
