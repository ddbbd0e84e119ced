import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sbhzero.errors import DomainError, InsufficientDataError, PreconditionError
from sbhzero.profiles import MonotoneDensity, RadialProfile
from sbhzero.radial_core import (INFINITY, build_profile_from_density, cartesian_laplacian, check_convex_of_h,
                                 detect_kinks, h_inverse, h_transform, invert_point, is_monotone, kelvin_profile,
                                 kelvin_value, onesided_derivatives, polar_laplacian, radial_flux,
                                 radial_laplacian, radial_riesz_measure, rate_from_profile, riesz_constant,
                                 riesz_measure_on_partition)

dims = st.sampled_from([1, 2, 3, 4, 5])
radii = st.floats(1e-3, 1e3)


class TestHarmonicCoordinate:
    def test_values(self):
        assert h_transform(1, 2.0) == 2.0
        assert h_transform(2, math.e) == pytest.approx(1.0)
        assert h_transform(3, 2.0) == -0.5
        assert h_transform(4, 2.0) == -0.25

    @given(dims, radii)
    def test_inverse_round_trip(self, m, t):
        assert h_inverse(m, h_transform(m, t)) == pytest.approx(t, rel=1e-12)

    @given(dims, radii, radii)
    def test_strictly_increasing(self, m, a, b):
        if a < b:
            assert h_transform(m, a) < h_transform(m, b)

    def test_vectorised(self):
        t = np.array([0.5, 1.0, 2.0])
        assert np.allclose(h_inverse(3, h_transform(3, t)), t)

    def test_rejects_non_positive(self):
        with pytest.raises(DomainError):
            h_transform(2, 0.0)
        with pytest.raises(DomainError):
            h_inverse(3, 0.5)

    def test_rejects_bad_dimension(self):
        with pytest.raises(DomainError):
            h_transform(0, 1.0)


class TestInversion:
    def test_example_point(self):
        assert np.allclose(invert_point([3.0, 4.0]), [0.12, 0.16])

    def test_origin_and_infinity(self):
        assert invert_point(np.zeros(2)) is INFINITY
        assert np.array_equal(invert_point(INFINITY, 4), np.zeros(4))

    @given(st.lists(st.floats(-1e4, 1e4), min_size=1, max_size=5).filter(lambda v: np.linalg.norm(v) > 1e-4))
    def test_involution(self, x):
        x = np.array(x)
        err = np.linalg.norm(invert_point(invert_point(x)) - x)
        assert err <= 1e-12 * np.linalg.norm(x)

    @given(st.lists(st.floats(-1e3, 1e3), min_size=1, max_size=5).filter(lambda v: np.linalg.norm(v) > 1e-3))
    def test_norm_is_reciprocal(self, x):
        x = np.array(x)
        assert np.linalg.norm(invert_point(x)) == pytest.approx(1 / np.linalg.norm(x), rel=1e-12)

    def test_kelvin_value(self):
        star, val = kelvin_value(3, 5.0, [2.0, 0.0, 0.0])
        assert np.allclose(star, [0.5, 0, 0])
        assert val == 10.0

    def test_kelvin_of_harmonic_is_harmonic(self):
        for m in (2, 3, 5):
            q = RadialProfile.harmonic(m, (0.5, 2.0))
            star = kelvin_profile(q, m)
            mass = radial_riesz_measure(star, m, (0.6, 1.8), method="numeric")
            assert abs(mass) < 1e-8

    def test_kelvin_swaps_domain(self):
        q = RadialProfile.power(1.0, 2.0, domain=(0.0, 4.0))
        assert kelvin_profile(q, 3).domain == (0.25, math.inf)

    def test_kelvin_profile_is_involution(self):
        q = RadialProfile.power(1.0, 2.0, domain=(0.5, 2.0))
        back = kelvin_profile(kelvin_profile(q, 3), 3)
        r = np.linspace(0.6, 1.9, 7)
        assert np.allclose([back(x) for x in r], q(r), rtol=1e-13)


class TestRieszConstant:
    def test_closed_forms(self):
        assert riesz_constant(1) == pytest.approx(0.5, rel=1e-15)
        assert riesz_constant(2) == pytest.approx(1 / (2 * math.pi), rel=1e-15)
        assert riesz_constant(3) == pytest.approx(1 / (4 * math.pi), rel=1e-15)

    @pytest.mark.parametrize("m", range(1, 9))
    def test_sphere_normalisation(self, m):
        sphere_area = 2 * math.pi ** (m / 2) / math.gamma(m / 2)
        assert riesz_constant(m) * sphere_area == pytest.approx(1 / max(1, m - 2), rel=1e-14)


class TestConvexity:
    def test_harmonic_profiles_pass(self):
        for m in (1, 2, 3, 5):
            assert check_convex_of_h(RadialProfile.harmonic(m, (0.5, 4.0)), m).passed

    def test_log_squared_in_plane(self):
        q = RadialProfile.log_power(1.0, 0.0, 2.0, domain=(0.1, 10.0))
        assert check_convex_of_h(q, 2).passed

    def test_concave_fails_with_witness(self):
        q = RadialProfile.from_callable(lambda r: -np.log(r) ** 2, (0.5, 2.0))
        rep = check_convex_of_h(q, 2)
        assert not rep.passed
        lo, mid, hi = rep.first_violation
        assert 0.5 <= lo < mid < hi <= 2.0

    def test_too_few_points(self):
        with pytest.raises(InsufficientDataError):
            check_convex_of_h(RadialProfile.constant(1.0), 2, n_points=2)

    def test_non_finite_values_fail(self):
        q = RadialProfile.from_callable(lambda r: np.where(r > 1.5, np.inf, r), (1.0, 2.0))
        assert not check_convex_of_h(q, 2).passed

    def test_is_monotone(self):
        assert is_monotone([1, 2, 2, 3]) == (True, None)
        assert is_monotone([1, 3, 2]) == (False, 1)
        assert is_monotone([3, 2, 1], "decreasing")[0]


class TestDerivatives:
    def test_abs_kink(self):
        q = RadialProfile.from_callable(lambda r: np.abs(r - 1.0), (0.0, 3.0))
        left, right = onesided_derivatives(q, 1.0)
        assert left == pytest.approx(-1.0, abs=1e-8)
        assert right == pytest.approx(1.0, abs=1e-8)
        assert detect_kinks(q, [0.5, 1.0, 2.0]) == [1.0]

    def test_smooth_numeric_matches_exact(self):
        q = RadialProfile.power(1.0, 3.0, domain=(0.0, 5.0))
        left, right = onesided_derivatives(q, 2.0, method="numeric")
        assert left == pytest.approx(12.0, rel=1e-9)
        assert right == pytest.approx(12.0, rel=1e-9)

    def test_plain_callable(self):
        left, right = onesided_derivatives(np.sin, 0.3)
        assert right == pytest.approx(math.cos(0.3), rel=1e-9)

    def test_boundary_rejected(self):
        with pytest.raises(DomainError):
            onesided_derivatives(RadialProfile.constant(1.0, (1.0, 2.0)), 1.0)


class TestRieszMeasure:
    def test_log_r_point_mass(self):
        q = RadialProfile.log_power(1.0, 0.0, 1.0)
        assert radial_riesz_measure(q, 2, (0.0, 1.0)) == pytest.approx(1.0, abs=1e-12)
        assert abs(radial_riesz_measure(q, 2, (0.5, 2.0))) < 1e-12

    def test_r_squared(self):
        # flux r * 2r over max(1, 0): mass of B(b) minus B(a) is 2(b^2 - a^2)
        q = RadialProfile.power(1.0, 2.0)
        assert radial_riesz_measure(q, 2, (1.0, 2.0)) == pytest.approx(6.0, rel=1e-12)

    def test_negative_mass_rejected(self):
        q = RadialProfile.power(-1.0, 2.0)
        with pytest.raises(PreconditionError):
            radial_riesz_measure(q, 2, (1.0, 2.0))

    def test_bad_annulus(self):
        with pytest.raises(DomainError):
            radial_riesz_measure(RadialProfile.constant(0.0), 2, (2.0, 1.0))

    def test_partition_additive(self):
        q = RadialProfile.power(1.0, 4.0)
        edges = [0.5, 1.0, 1.5, 2.0]
        part = riesz_measure_on_partition(q, 3, edges)
        assert part.total == pytest.approx(radial_riesz_measure(q, 3, (0.5, 2.0)), rel=1e-12)

    @settings(max_examples=30, deadline=None)
    @given(st.sampled_from([2, 3, 4]), st.floats(0.1, 5.0), st.floats(0.1, 5.0))
    def test_flux_matches_rate(self, m, r, c):
        q = RadialProfile.power(c, 2.0)
        assert radial_flux(q, m, r) * max(1, m - 2) == pytest.approx(rate_from_profile(q, m, [r])[0])


class TestProfileConstruction:
    def test_increasing_density_gives_convex(self):
        p0 = MonotoneDensity.piecewise_linear([1.0, 1.5, 2.0], [0.0, 1.0, 3.0], "increasing")
        q = build_profile_from_density(p0, 1.5, 2.0, 3, (1.0, 2.0))
        assert q(1.5) == 2.0
        assert check_convex_of_h(q, 3).passed
        rates = rate_from_profile(q, 3, [1.25, 1.75])
        assert np.allclose(rates, p0([1.25, 1.75]))

    def test_decreasing_density_rejected(self):
        p0 = MonotoneDensity.piecewise_linear([1.0, 2.0], [1.0, 0.0], "increasing", validate=False)
        with pytest.raises(PreconditionError):
            build_profile_from_density(p0, 1.5, 0.0, 2, (1.0, 2.0))

    def test_needs_increasing_direction(self):
        with pytest.raises(PreconditionError):
            build_profile_from_density(MonotoneDensity.constant(1.0), 1.5, 0.0, 2, (1.0, 2.0))


class TestLaplacianOracles:
    def test_cartesian_harmonic(self):
        # the 5-point stencil is exact on quadratics
        rep = cartesian_laplacian(lambda X, Y: X**2 - Y**2, 0.5, 2.0)
        assert rep.passed
        assert abs(rep.min_scaled) < 1e-12

    def test_cartesian_log_within_truncation(self):
        rep = cartesian_laplacian(lambda X, Y: np.log(np.hypot(X, Y)), 0.5, 2.0, tolerance=1e-5)
        assert rep.passed

    def test_cartesian_detects_superharmonic(self):
        rep = cartesian_laplacian(lambda X, Y: -(X**2 + Y**2), 0.5, 2.0)
        assert not rep.passed

    def test_polar_subharmonic(self):
        rep = polar_laplacian(lambda X, Y: X**2 + Y**2, 0.5, 2.0)
        assert rep.passed

    def test_radial_laplacian_of_r_squared(self):
        q = RadialProfile.power(1.0, 2.0)
        r = np.linspace(0.5, 3.0, 51)
        h = r[1] - r[0]
        for m in (2, 3, 4):
            assert np.allclose(radial_laplacian(q, m, r) / h**2, 2 * m, rtol=1e-9)


def test_riesz_normalisation_against_grid_oracle():
    # c_2 * (5-point Laplacian) summed over grid cells inside the annulus 1 < |x| <= 2
    q = RadialProfile.power(1.0, 3.0)
    h = 2e-3
    xs = np.arange(-2.2, 2.2 + h / 2, h)
    X, Y = np.meshgrid(xs, xs, indexing="ij")
    U = np.hypot(X, Y) ** 3
    lap = (U[2:, 1:-1] + U[:-2, 1:-1] + U[1:-1, 2:] + U[1:-1, :-2] - 4 * U[1:-1, 1:-1]) / h**2
    R = np.hypot(X, Y)[1:-1, 1:-1]
    oracle = riesz_constant(2) * float(np.sum(lap[(R > 1.0) & (R <= 2.0)])) * h**2
    # closed form: (1/2π) ∫_1^2 9r · 2πr dr = 21
    assert radial_riesz_measure(q, 2, (1.0, 2.0)) == pytest.approx(21.0, rel=1e-12)
    assert oracle == pytest.approx(21.0, rel=2e-3)
