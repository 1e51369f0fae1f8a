import math

import numpy as np
import pytest

from homsphere.quadrature import (GAUSS_WEIGHTS, KRONROD_NODES, KRONROD_WEIGHTS, QuadratureError,
                                  SurfaceGrid, VolumeGrid, adaptive_quad,
                                  composite_gauss_kronrod, gauss_kronrod, gauss_legendre,
                                  richardson_table)
from oracles import profile_integral_exact


def profile(rho):
    return lambda s: np.sin(s) * np.sqrt(np.cos(s) ** 2 + rho * rho * np.sin(s) ** 2)


class TestGaussKronrod:
    def test_embedded_gauss_rule_matches_leggauss(self):
        x, w = np.polynomial.legendre.leggauss(7)
        np.testing.assert_allclose(KRONROD_NODES[1::2], x, atol=1e-15)
        np.testing.assert_allclose(GAUSS_WEIGHTS[1::2], w, atol=1e-15)
        assert np.all(GAUSS_WEIGHTS[::2] == 0)

    def test_weights_sum_to_two(self):
        assert KRONROD_WEIGHTS.sum() == pytest.approx(2.0, abs=1e-15)
        assert GAUSS_WEIGHTS.sum() == pytest.approx(2.0, abs=1e-15)

    @pytest.mark.parametrize("deg", [0, 5, 13, 22])
    def test_polynomial_exactness(self, deg):
        val, _ = gauss_kronrod(lambda x: x ** deg, 0.0, 1.0)
        assert val == pytest.approx(1.0 / (deg + 1), rel=1e-14)

    def test_error_estimate_vanishes_for_low_degree(self):
        _, err = gauss_kronrod(lambda x: 3 * x ** 4 - x, -1.0, 2.0)
        assert err < 1e-13


class TestAdaptive:
    def test_smooth(self):
        res = adaptive_quad(np.exp, 0.0, 1.0, tol=1e-14)
        assert res.value == pytest.approx(math.e - 1.0, abs=1e-14)

    def test_kink_with_breakpoint(self):
        res = adaptive_quad(np.abs, -1.0, 2.0, tol=1e-14, breakpoints=(0.0,))
        assert res.value == pytest.approx(2.5, abs=1e-14)
        assert res.panels == 2

    def test_kink_without_breakpoint(self):
        res = adaptive_quad(lambda x: np.abs(x - 0.3), 0.0, 1.0, tol=1e-10)
        assert res.value == pytest.approx(0.29, abs=1e-10)

    def test_stall_reports_best_estimate(self):
        with pytest.raises(QuadratureError) as info:
            adaptive_quad(lambda x: 1.0 / np.sqrt(np.abs(x - 0.3)), 0.0, 1.0,
                          tol=1e-15, max_panels=20)
        assert info.value.best is not None
        assert info.value.best.panels >= 20

    def test_rejects_bad_tolerance(self):
        with pytest.raises(ValueError):
            adaptive_quad(np.exp, 0.0, 1.0, tol=0.0)

    @pytest.mark.parametrize("rho", [0.1, 0.25, 0.5, 1.0, 2.0, 4.0, 10.0])
    def test_profile_integral_against_closed_form(self, rho):
        res = adaptive_quad(profile(rho), 0.0, math.pi, tol=1e-13, breakpoints=(0.5 * math.pi,))
        assert abs(res.value - profile_integral_exact(rho)) < 1e-13


class TestBisectionConvergence:
    @pytest.mark.parametrize("rho", np.geomspace(0.1, 10.0, 9))
    def test_error_drops_at_least_fourfold_per_bisection(self, rho):
        exact = profile_integral_exact(rho)
        errs = [abs(composite_gauss_kronrod(profile(rho), 0.0, math.pi, p) - exact)
                for p in (1, 2, 4, 8, 16, 32)]
        checked = 0
        for coarse, fine in zip(errs[:-1], errs[1:]):
            if coarse > 1e-12:  # above the rounding floor
                assert fine <= coarse / 4.0
                checked += 1
        # at rho = 1 the integrand is sin(s) and a single panel is already exact
        assert checked >= 1 or errs[0] <= 1e-12


class TestGrids:
    def test_gauss_legendre_interval(self):
        x, w = gauss_legendre(5, 1.0, 3.0)
        assert w.sum() == pytest.approx(2.0)
        assert np.all((x > 1) & (x < 3))

    def test_surface_grid_validation(self):
        with pytest.raises(ValueError):
            SurfaceGrid(6, 64)
        with pytest.raises(ValueError):
            SurfaceGrid(64, 4)
        with pytest.raises(ValueError):
            SurfaceGrid(33, 64)

    def test_surface_grid_integrates_sin(self):
        S, _, W = SurfaceGrid(16, 8).mesh
        assert np.sum(W * np.sin(S)) == pytest.approx(4.0 * math.pi, rel=1e-14)

    def test_nodes_avoid_poles(self):
        s, _ = SurfaceGrid(8, 8).s_rule
        assert s.min() > 0 and s.max() < math.pi

    def test_refined(self):
        g = SurfaceGrid(16, 24).refined()
        assert (g.n_s, g.n_theta) == (32, 48)

    def test_volume_grid(self):
        pts, wts = VolumeGrid(16, 24).points_and_weights
        np.testing.assert_allclose(np.linalg.norm(pts, axis=1), 1.0, atol=1e-14)
        assert wts.sum() == pytest.approx(2 * math.pi ** 2, rel=1e-13)
        assert np.sum(wts * pts[:, 0] ** 2) == pytest.approx(math.pi ** 2 / 2, rel=1e-13)


class TestRichardson:
    def test_central_difference(self):
        d = lambda h: (math.sin(1 + h) - math.sin(1 - h)) / (2 * h)
        best, err = richardson_table(d, 0.1, 4)
        assert abs(best - math.cos(1)) < 1e-11
        assert err < 1e-8

    def test_single_level(self):
        best, err = richardson_table(lambda h: h, 0.5, 1)
        assert best == 0.5 and err == math.inf

    def test_zero_levels(self):
        with pytest.raises(ValueError):
            richardson_table(lambda h: h, 0.5, 0)
