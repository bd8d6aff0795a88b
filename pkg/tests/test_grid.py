import numpy as np
import pytest
from scipy.integrate import quad

from twochlab import (
    Field,
    NonFiniteError,
    boundary_support,
    dealias,
    diff,
    helmholtz_inverse,
    interp,
    make_grid,
    quadrature,
)

from conftest import random_band_limited


class TestMakeGrid:
    def test_basic_layout(self):
        g = make_grid(8, 2 * np.pi)
        assert np.allclose(g.nodes, np.arange(8) * np.pi / 4)
        # FFT wavenumber ordering with the Nyquist mode at +/- n/2
        assert np.allclose(g.wavenumbers, [0, 1, 2, 3, -4, -3, -2, -1])
        assert g.nodes[0] == 0.0

    def test_spacing(self):
        g = make_grid(256, 40.0)
        assert g.spacing == pytest.approx(0.15625)
        assert np.allclose(np.diff(g.nodes), g.spacing)

    def test_rejects_bad_arguments(self):
        with pytest.raises(ValueError, match="even"):
            make_grid(7, 10.0)
        with pytest.raises(ValueError, match="at least 8"):
            make_grid(6, 10.0)
        with pytest.raises(ValueError, match="positive"):
            make_grid(16, -1.0)
        with pytest.raises(ValueError, match="positive"):
            make_grid(16, 0.0)

    def test_field_validation(self):
        g = make_grid(16, 1.0)
        with pytest.raises(ValueError, match="does not match"):
            Field(np.zeros(8), g)
        with pytest.raises(NonFiniteError):
            Field(np.full(16, np.nan), g)


class TestDiff:
    def test_single_mode_exact(self):
        g = make_grid(64, 2 * np.pi)
        f = Field(np.sin(g.nodes), g)
        err = np.max(np.abs(diff(f, 1).values - np.cos(g.nodes)))
        assert err < 1e-12

    def test_constant_derivative_zero(self):
        g = make_grid(32, 7.0)
        f = Field(np.full(32, 3.7), g)
        for order in (1, 2, 3):
            assert np.max(np.abs(diff(f, order).values)) < 1e-14

    def test_second_derivative_against_refined_fd(self):
        # Oracle: second-order centered differences on a 32x finer grid,
        # compared at the shared nodes.
        L = 40.0
        fn = lambda x: np.exp(np.sin(2 * np.pi * x / L))
        g = make_grid(128, L)
        fine = make_grid(4096, L)
        fv = fn(fine.nodes)
        h = fine.spacing
        fd2 = (np.roll(fv, -1) - 2 * fv + np.roll(fv, 1)) / h**2
        ours = diff(Field(fn(g.nodes), g), 2).values
        assert np.max(np.abs(ours - fd2[::32])) < 1e-6

    def test_rejects_bad_order(self):
        g = make_grid(16, 1.0)
        f = Field(np.zeros(16), g)
        for order in (0, 4, -1):
            with pytest.raises(ValueError):
                diff(f, order)

    def test_composition_matches_second_derivative(self):
        g = make_grid(128, 20.0)
        rng = np.random.default_rng(3)
        f = Field(random_band_limited(g, rng), g)
        twice = diff(diff(f, 1), 1).values
        once = diff(f, 2).values
        scale = np.max(np.abs(once))
        assert np.max(np.abs(twice - once)) / scale < 1e-10


class TestHelmholtzInverse:
    def test_zero(self):
        g = make_grid(32, 5.0)
        out = helmholtz_inverse(Field(np.zeros(32), g))
        assert np.all(out.values == 0.0)

    def test_single_mode_eigenfunction(self):
        L = 11.0
        g = make_grid(64, L)
        k = 2 * np.pi / L
        f = Field((1 + k**2) * np.sin(k * g.nodes), g)
        err = np.max(np.abs(helmholtz_inverse(f).values - np.sin(k * g.nodes)))
        assert err < 1e-12

    def test_round_trip(self):
        g = make_grid(128, 40.0)
        rng = np.random.default_rng(11)
        f = random_band_limited(g, rng)
        gsol = helmholtz_inverse(Field(f, g))
        back = gsol.values - diff(gsol, 2).values
        assert np.max(np.abs(back - f)) / np.max(np.abs(f)) < 1e-11


class TestQuadrature:
    def test_constant(self):
        g = make_grid(64, 40.0)
        assert quadrature(Field(np.ones(64), g)) == pytest.approx(40.0)

    def test_full_period_sine(self):
        g = make_grid(64, 40.0)
        f = Field(np.sin(2 * np.pi * g.nodes / 40.0), g)
        assert abs(quadrature(f)) < 1e-13

    def test_gaussian_against_adaptive_quadrature(self):
        L = 40.0
        g = make_grid(256, L)
        fn = lambda x: np.exp(-((x - L / 2) ** 2))
        expected, _ = quad(fn, 0.0, L, epsabs=1e-13, epsrel=1e-13)
        assert quadrature(Field(fn(g.nodes), g)) == pytest.approx(expected, abs=1e-10)

    def test_derivative_integrates_to_zero(self):
        g = make_grid(128, 17.0)
        rng = np.random.default_rng(5)
        f = Field(random_band_limited(g, rng), g)
        assert abs(quadrature(diff(f, 1))) < 1e-12

    def test_integration_by_parts(self):
        g = make_grid(128, 23.0)
        rng = np.random.default_rng(8)
        f = Field(random_band_limited(g, rng), g)
        h = Field(random_band_limited(g, rng), g)
        lhs = quadrature(Field(f.values * diff(h, 1).values, g))
        rhs = -quadrature(Field(diff(f, 1).values * h.values, g))
        assert abs(lhs - rhs) < 1e-10


class TestInterp:
    def test_smooth_point_value(self):
        L = 13.0
        g = make_grid(128, L)
        f = Field(np.sin(2 * np.pi * g.nodes / L), g)
        out = interp(f, [L / 7])
        assert abs(out[0] - np.sin(2 * np.pi / 7)) < 1e-10

    def test_reproduces_node_values(self):
        g = make_grid(64, 9.0)
        rng = np.random.default_rng(2)
        f = Field(random_band_limited(g, rng), g)
        out = interp(f, g.nodes)
        assert np.max(np.abs(out - f.values)) < 1e-12

    def test_random_points_against_closed_form(self):
        L = 40.0
        g = make_grid(256, L)
        fn = lambda x: np.exp(np.cos(2 * np.pi * x / L))
        f = Field(fn(g.nodes), g)
        rng = np.random.default_rng(4)
        pts = rng.uniform(0, L, size=100)
        assert np.max(np.abs(interp(f, pts) - fn(pts))) < 1e-8

    def test_rejects_non_finite_points(self):
        g = make_grid(16, 1.0)
        f = Field(np.zeros(16), g)
        with pytest.raises(ValueError, match="finite"):
            interp(f, [0.1, np.nan])


class TestHelpers:
    def test_dealias_removes_high_band(self):
        g = make_grid(32, 2 * np.pi)
        high = np.cos(15 * g.nodes)  # above 2/3 of the Nyquist band
        low = np.cos(3 * g.nodes)
        out = dealias(Field(low + high, g)).values
        assert np.max(np.abs(out - low)) < 1e-12

    def test_boundary_support(self):
        g = make_grid(256, 40.0)
        centered = Field(np.exp(-((g.nodes - 20.0) ** 2)), g)
        assert boundary_support(centered) < 1e-10
        edged = Field(np.exp(-((g.nodes - 1.0) ** 2)), g)
        assert boundary_support(edged) > 1e-2
