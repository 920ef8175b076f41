"""Bessel functions, the mean-area integral, and the small-radius asymptotes.

Golden constants were computed before the build with an independent mpmath
oracle at 50 digits (substitutions u = 1/ln(1/y) and v = 1/y applied inside
the oracle as well, cross-checked at 30 vs 50 digits):

    V* = expected_area(1, 1)      = 9.577832136474422
    P* = expected_perimeter(1, 1) = 11.404933868652749
    expected_area(r, 1) |ln r|/pi = 1.0952264945163085  (r = 1e-2)
                                    1.0481406273253801  (r = 1e-4)
                                    1.0240671290944558  (r = 1e-8)
    expected_area(1, T) - pi      = 5.013258e-6 (T = 1e-12), matching the
                                    exact small-T law 2 sqrt(2 pi T).
"""

import math

import mpmath as mp
import numpy as np
import pytest

from sausagelab.reference import (
    QuadratureError,
    QuadratureSpec,
    adaptive_quadrature,
    bessel_j0,
    bessel_modulus_sq,
    bessel_y0,
    expected_area,
    expected_area_with_error,
    expected_perimeter,
    legall_area_asymptote,
    legall_perimeter_asymptote,
)

V_STAR = 9.577832136474422
P_STAR = 11.404933868652749
LEGALL_RATIOS = {1e-2: 1.0952264945163085, 1e-4: 1.0481406273253801, 1e-8: 1.0240671290944558}


class TestBesselJ0:
    def test_at_zero(self):
        assert bessel_j0(0.0) == 1.0

    def test_first_zero(self):
        assert abs(bessel_j0(2.404825557695773)) < 1e-10

    def test_at_ten(self):
        assert bessel_j0(10.0) == pytest.approx(-0.2459357644513483, abs=1e-10)

    def test_domain(self):
        with pytest.raises(ValueError):
            bessel_j0(-1.0)
        with pytest.raises(ValueError):
            bessel_j0(float("nan"))
        with pytest.raises(ValueError):
            bessel_j0(float("inf"))


class TestBesselY0:
    def test_small_x_log_divergence(self):
        assert bessel_y0(0.001) < -4.0
        assert bessel_y0(0.001) == pytest.approx(-4.471416611375923, abs=1e-10)

    def test_first_zero(self):
        assert abs(bessel_y0(0.8935769662791675)) < 1e-9

    def test_modulus_identity_large_x(self):
        for x in (50.0, 100.0):
            m2 = bessel_j0(x) ** 2 + bessel_y0(x) ** 2
            assert m2 == pytest.approx(2.0 / (math.pi * x), rel=1e-3)

    def test_domain(self):
        with pytest.raises(ValueError):
            bessel_y0(0.0)
        with pytest.raises(ValueError):
            bessel_y0(-0.5)


class TestBesselVsOracle:
    def test_dense_grid_against_mpmath(self):
        mp.mp.dps = 30
        rng = np.random.default_rng(314)
        xs = np.concatenate(
            [rng.uniform(1e-6, 12.0, 150), rng.uniform(12.0, 100.0, 150), [12.0, 999.0]]
        )
        for x in xs:
            x = float(x)
            assert abs(bessel_j0(x) - float(mp.besselj(0, x))) < 1e-10
            assert abs(bessel_y0(x) - float(mp.bessely(0, x))) < 1e-10

    def test_modulus_path_matches_components(self):
        for x in (0.3, 5.0, 12.0, 13.0, 40.0, 300.0):
            direct = bessel_j0(x) ** 2 + bessel_y0(x) ** 2
            assert bessel_modulus_sq(x) == pytest.approx(direct, rel=1e-11)


class TestAdaptiveQuadrature:
    def test_polynomial_is_exact(self):
        val, err = adaptive_quadrature(lambda x: x * x, 0.0, 3.0, QuadratureSpec())
        assert val == pytest.approx(9.0, abs=1e-12)

    def test_budget_exhaustion_raises_with_estimate(self):
        spec = QuadratureSpec(rel_tol=1e-15, max_intervals=4)
        with pytest.raises(QuadratureError) as err:
            adaptive_quadrature(lambda x: math.exp(-x) * math.sin(40 * x) / (x + 1e-3), 0.0, 10.0, spec)
        assert math.isfinite(err.value.estimate)
        assert err.value.bound > 0.0


class TestExpectedArea:
    def test_golden_value(self):
        assert expected_area(1.0, 1.0) == pytest.approx(V_STAR, rel=1e-8)

    def test_error_estimate_is_honest(self):
        val, err = expected_area_with_error(1.0, 1.0)
        assert abs(val - V_STAR) <= max(err, 1e-9 * V_STAR)

    def test_scaling_identity(self):
        a1 = expected_area(20.0, 1e6)
        a2 = 1e6 * expected_area(0.02, 1.0)
        assert a1 == pytest.approx(a2, rel=1e-7)

    def test_small_T_limit(self):
        # exact small-T law: area - pi r^2 -> 2 sqrt(2 pi T) r as T -> 0
        assert abs(expected_area(1.0, 1e-14) - math.pi) < 1e-6
        for T in (1e-12, 1e-16):
            gap = expected_area(1.0, T) - math.pi
            assert gap == pytest.approx(2.0 * math.sqrt(2.0 * math.pi * T), rel=1e-2)

    def test_monotone_in_r_and_T(self):
        rs = (0.05, 0.1, 0.3, 1.0, 3.0)
        areas = [expected_area(r, 1.0) for r in rs]
        assert all(b > a for a, b in zip(areas, areas[1:]))
        Ts = (0.25, 0.5, 1.0, 2.0, 4.0)
        areas_T = [expected_area(0.5, T) for T in Ts]
        assert all(b > a for a, b in zip(areas_T, areas_T[1:]))

    def test_tolerance_refinement_within_reported_error(self):
        coarse, err = expected_area_with_error(0.7, 1.3, QuadratureSpec(rel_tol=1e-6))
        fine, _ = expected_area_with_error(0.7, 1.3, QuadratureSpec(rel_tol=5e-7))
        assert abs(fine - coarse) <= err

    def test_domain(self):
        with pytest.raises(ValueError):
            expected_area(0.0, 1.0)
        with pytest.raises(ValueError):
            expected_area(1.0, -1.0)


class TestExpectedPerimeter:
    def test_golden_value(self):
        val, err = expected_perimeter(1.0, 1.0)
        assert val == pytest.approx(P_STAR, rel=1e-6)
        assert abs(val - P_STAR) <= 10.0 * max(err, 1e-8 * P_STAR)

    def test_small_T_limit(self):
        val, _ = expected_perimeter(1.0, 1e-14)
        assert val == pytest.approx(2.0 * math.pi, rel=1e-5)

    def test_scaling_identity(self):
        p1, _ = expected_perimeter(0.4, 4.0)
        p2, _ = expected_perimeter(0.2, 1.0)
        assert p1 == pytest.approx(2.0 * p2, rel=1e-6)

    def test_consistent_with_area_differences(self):
        r, T = 0.8, 1.0
        spec = QuadratureSpec(rel_tol=1e-11)
        val, err = expected_perimeter(r, T)
        for h in (1e-3 * r, 5e-4 * r):
            fd = (expected_area(r + h, T, spec) - expected_area(r - h, T, spec)) / (2 * h)
            assert abs(fd - val) <= 5e-5 * val


class TestLeGall:
    def test_area_asymptote_examples(self):
        e = math.e
        assert legall_area_asymptote(1 / e, 1.0) == pytest.approx(math.pi, rel=1e-14)
        assert legall_area_asymptote(e ** -2, 2.0) == pytest.approx(math.pi, rel=1e-14)
        assert legall_area_asymptote(1 / e, 1e6) == pytest.approx(math.pi * 1e6, rel=1e-14)

    def test_perimeter_asymptote_examples(self):
        e = math.e
        assert legall_perimeter_asymptote(1 / e, 1.0) == pytest.approx(math.pi * e, rel=1e-14)
        assert legall_perimeter_asymptote(e ** -2, 1.0) == pytest.approx(math.pi * e * e / 4.0, rel=1e-14)
        assert legall_perimeter_asymptote(1 / e, 3.0) == pytest.approx(3 * math.pi * e, rel=1e-14)

    def test_domain(self):
        for fn in (legall_area_asymptote, legall_perimeter_asymptote):
            with pytest.raises(ValueError):
                fn(1.0, 1.0)
            with pytest.raises(ValueError):
                fn(1.5, 1.0)

    def test_ratio_moves_monotonically_toward_one(self):
        # approach is from above: the ratio decreases toward 1 as r -> 0
        ratios = [
            expected_area(r, 1.0) / legall_area_asymptote(r, 1.0)
            for r in (1e-2, 1e-4, 1e-8)
        ]
        for r, want in zip((1e-2, 1e-4, 1e-8), (1.0952264945163085, 1.0481406273253801, 1.0240671290944558)):
            got = expected_area(r, 1.0) * abs(math.log(r)) / math.pi
            assert got == pytest.approx(want, rel=1e-7)
        gaps = [abs(x - 1.0) for x in ratios]
        assert gaps[0] > gaps[1] > gaps[2]
