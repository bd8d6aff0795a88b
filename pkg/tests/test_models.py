import numpy as np
import pytest
import scipy.sparse
import scipy.sparse.linalg

from twochlab import (
    CavitationError,
    Field,
    Sign,
    State,
    ch_reduction_check,
    from_momentum,
    linear_rhs,
    make_grid,
    reconstruct_diagnostics,
    sw1_rhs,
    swe_rhs,
    to_momentum,
    twoch_rhs,
    twoch_rhs_momentum,
)

from conftest import random_band_limited, random_state


# --- independent finite-difference oracle ----------------------------------
# Fourth-order centered stencils on a refined grid, with the Helmholtz solve
# done as a direct sparse linear solve (no FFTs anywhere in this code path).


def _fd_ops(n, L):
    h = L / n

    def d1(f):
        return (8 * (np.roll(f, -1) - np.roll(f, 1))
                - (np.roll(f, -2) - np.roll(f, 2))) / (12 * h)

    def d2(f):
        return (-np.roll(f, -2) + 16 * np.roll(f, -1) - 30 * f
                + 16 * np.roll(f, 1) - np.roll(f, 2)) / (12 * h**2)

    def d3(f):
        return (-np.roll(f, -3) + 8 * np.roll(f, -2) - 13 * np.roll(f, -1)
                + 13 * np.roll(f, 1) - 8 * np.roll(f, 2) + np.roll(f, 3)) / (8 * h**3)

    return d1, d2, d3


def _fd_helmholtz_solve(rhs, L):
    # Solve (I - D2) g = rhs with the same fourth-order periodic D2.
    n = rhs.size
    h = L / n
    coeffs = {-2: 1 / (12 * h**2), -1: -16 / (12 * h**2), 0: 30 / (12 * h**2),
              1: -16 / (12 * h**2), 2: 1 / (12 * h**2)}
    mat = scipy.sparse.lil_matrix((n, n))
    for off, c in coeffs.items():
        for i in range(n):
            mat[i, (i + off) % n] += c
    mat = mat + scipy.sparse.identity(n)
    return scipy.sparse.linalg.spsolve(mat.tocsc(), rhs)


def fd_twoch_u_tendency(u, H, sign_coeff, L):
    d1, d2, d3 = _fd_ops(u.size, L)
    bracket = (-3 * u * d1(u) + 2 * d1(u) * d2(u) + u * d3(u)
               - sign_coeff * H * d1(H))
    return _fd_helmholtz_solve(bracket, L)


def test_fd_oracle_self_check():
    # The oracle's stencils must reproduce analytic derivatives before use.
    L = 40.0
    n = 2048
    x = np.arange(n) * L / n
    k = 2 * np.pi / L
    d1, d2, d3 = _fd_ops(n, L)
    f = np.sin(k * x)
    assert np.max(np.abs(d1(f) - k * np.cos(k * x))) < 1e-10
    assert np.max(np.abs(d2(f) + k**2 * np.sin(k * x))) < 1e-10
    assert np.max(np.abs(d3(f) + k**3 * np.cos(k * x))) < 1e-9
    g = _fd_helmholtz_solve((1 + k**2) * f, L)
    assert np.max(np.abs(g - f)) < 1e-9


class TestTwoCHRhs:
    def test_rest_state(self, grid40):
        s = State(Field(np.zeros(256), grid40), Field(np.ones(256), grid40))
        for sign in (Sign.PLUS, Sign.MINUS):
            du, dH = twoch_rhs(s, sign)
            assert np.max(np.abs(du.values)) < 1e-15
            assert np.max(np.abs(dH.values)) < 1e-15

    def test_constant_state_is_steady(self, grid40):
        s = State(Field(np.full(256, 0.7), grid40), Field(np.ones(256), grid40))
        du, dH = twoch_rhs(s, Sign.PLUS)
        assert np.max(np.abs(du.values)) < 1e-13
        assert np.max(np.abs(dH.values)) < 1e-13

    @pytest.mark.parametrize("sign", [Sign.PLUS, Sign.MINUS])
    def test_against_fd_oracle(self, sign):
        L = 40.0
        n_fine = 4096
        g = make_grid(256, L)
        u_fn = lambda x: 0.1 * np.sin(2 * np.pi * x / L)
        H_fn = lambda x: 1 + 0.05 * np.cos(2 * np.pi * x / L)
        s = State(Field(u_fn(g.nodes), g), Field(H_fn(g.nodes), g))
        du, dH = twoch_rhs(s, sign)

        xf = np.arange(n_fine) * L / n_fine
        du_fd = fd_twoch_u_tendency(u_fn(xf), H_fn(xf), sign.coeff, L)
        d1, _, _ = _fd_ops(n_fine, L)
        dH_fd = -d1(H_fn(xf) * u_fn(xf))

        stride = n_fine // 256
        i_course = g.nodes.searchsorted(10.0)  # compare at x = 10 and everywhere
        assert abs(du.values[i_course] - du_fd[::stride][i_course]) < 1e-6
        assert np.max(np.abs(du.values - du_fd[::stride])) < 1e-6
        assert np.max(np.abs(dH.values - dH_fd[::stride])) < 1e-6

    def test_rejects_nonpositive_surface(self, grid40):
        s = State(Field(np.zeros(256), grid40), Field(np.zeros(256), grid40))
        with pytest.raises(CavitationError):
            twoch_rhs(s, Sign.PLUS)

    def test_parity(self, grid40):
        # u odd and H even about L/2 gives an odd du/dt and even dH/dt.
        L = grid40.length
        x = grid40.nodes
        u = 0.2 * np.sin(2 * np.pi * (x - L / 2) / L) + 0.05 * np.sin(
            6 * np.pi * (x - L / 2) / L
        )
        H = 1 + 0.1 * np.cos(4 * np.pi * (x - L / 2) / L)
        s = State(Field(u, grid40), Field(H, grid40))
        flip = (256 - np.arange(256)) % 256  # x -> L - x on the node set
        for sign in (Sign.PLUS, Sign.MINUS):
            du, dH = twoch_rhs(s, sign)
            assert np.max(np.abs(du.values + du.values[flip])) < 1e-11
            assert np.max(np.abs(dH.values - dH.values[flip])) < 1e-11


class TestMomentumForm:
    def test_rest_state(self, grid40):
        ms = to_momentum(
            State(Field(np.zeros(256), grid40), Field(np.ones(256), grid40))
        )
        dm, dH = twoch_rhs_momentum(ms, Sign.PLUS)
        assert np.max(np.abs(dm.values)) < 1e-15
        assert np.max(np.abs(dH.values)) < 1e-15

    @pytest.mark.parametrize("sign", [Sign.PLUS, Sign.MINUS])
    def test_cross_formulation_consistency(self, grid40, sign):
        rng = np.random.default_rng(21)
        for _ in range(10):
            s = random_state(grid40, rng)
            du, dH_u = twoch_rhs(s, sign)
            dm, dH_m = twoch_rhs_momentum(to_momentum(s), sign)
            helmholtz_applied = du.values - grid40.deriv_values(du.values, 2)
            scale = np.max(np.abs(dm.values))
            assert np.max(np.abs(helmholtz_applied - dm.values)) / scale < 1e-9
            assert np.max(np.abs(dH_u.values - dH_m.values)) < 1e-13

    def test_h_channel_closed_form(self):
        L = 40.0
        g = make_grid(256, L)
        k = 2 * np.pi / L
        s = State(Field(0.1 * np.sin(k * g.nodes), g), Field(np.ones(256), g))
        _, dH = twoch_rhs_momentum(to_momentum(s), Sign.PLUS)
        expected = -0.1 * k * np.cos(k * g.nodes)
        assert np.max(np.abs(dH.values - expected)) < 1e-12


class TestMomentumMaps:
    def test_eigenfunction(self):
        L = 17.0
        g = make_grid(64, L)
        k = 2 * np.pi / L
        s = State(Field(np.sin(k * g.nodes), g), Field(np.ones(64), g))
        m = to_momentum(s).m.values
        assert np.max(np.abs(m - (1 + k**2) * np.sin(k * g.nodes))) < 1e-12

    def test_zero(self, grid40):
        s = State(Field(np.zeros(256), grid40), Field(np.ones(256), grid40))
        assert np.all(to_momentum(s).m.values == 0.0)

    def test_round_trip(self, grid40):
        rng = np.random.default_rng(13)
        u = random_band_limited(grid40, rng)
        s = State(Field(u, grid40), Field(np.ones(256), grid40))
        back = from_momentum(to_momentum(s))
        assert np.max(np.abs(back.u.values - u)) / np.max(np.abs(u)) < 1e-11


class TestSWERhs:
    def test_rest(self, grid40):
        s = State(Field(np.zeros(256), grid40), Field(np.ones(256), grid40))
        du, dH = swe_rhs(s)
        assert np.max(np.abs(du.values)) < 1e-15
        assert np.max(np.abs(dH.values)) < 1e-15

    def test_constant_state_is_steady(self, grid40):
        s = State(Field(np.full(256, 0.4), grid40), Field(np.full(256, 1.3), grid40))
        du, dH = swe_rhs(s)
        assert np.max(np.abs(du.values)) < 1e-13
        assert np.max(np.abs(dH.values)) < 1e-13

    def test_still_water_closed_form(self):
        L = 40.0
        g = make_grid(256, L)
        k = 2 * np.pi / L
        s = State(Field(np.zeros(256), g), Field(1 + 0.1 * np.cos(k * g.nodes), g))
        du, dH = swe_rhs(s)
        assert np.max(np.abs(du.values - 0.1 * k * np.sin(k * g.nodes))) < 1e-13
        assert np.max(np.abs(dH.values)) < 1e-13

    def test_against_fd_oracle(self):
        L = 40.0
        n_fine = 4096
        g = make_grid(256, L)
        rng = np.random.default_rng(30)
        u_modes = rng.normal(0, 0.1, size=4)
        h_modes = rng.normal(0, 0.05, size=4)

        def u_fn(x):
            return sum(a * np.sin(2 * np.pi * (m + 1) * x / L)
                       for m, a in enumerate(u_modes))

        def H_fn(x):
            return 1 + sum(a * np.cos(2 * np.pi * (m + 1) * x / L)
                           for m, a in enumerate(h_modes))

        s = State(Field(u_fn(g.nodes), g), Field(H_fn(g.nodes), g))
        du, dH = swe_rhs(s)
        xf = np.arange(n_fine) * L / n_fine
        d1, _, _ = _fd_ops(n_fine, L)
        uf, Hf = u_fn(xf), H_fn(xf)
        du_fd = -uf * d1(uf) - d1(Hf)
        dH_fd = -d1(Hf * uf)
        stride = n_fine // 256
        assert np.max(np.abs(du.values - du_fd[::stride])) < 1e-7
        assert np.max(np.abs(dH.values - dH_fd[::stride])) < 1e-7


class TestSW1Rhs:
    def test_rest(self, grid40):
        s = State(Field(np.zeros(256), grid40), Field(np.zeros(256), grid40))
        du, deta = sw1_rhs(s, 0.1)
        assert np.max(np.abs(du.values)) < 1e-15
        assert np.max(np.abs(deta.values)) < 1e-15

    def test_constant_velocity(self, grid40):
        s = State(Field(np.full(256, 0.3), grid40), Field(np.zeros(256), grid40))
        du, deta = sw1_rhs(s, 0.1)
        assert np.max(np.abs(du.values)) < 1e-14
        assert np.max(np.abs(deta.values)) < 1e-13

    def test_change_of_variables_against_swe(self, grid40):
        eps = 0.1
        rng = np.random.default_rng(17)
        u = 0.2 * random_band_limited(grid40, rng)
        eta = random_band_limited(grid40, rng)
        s_eta = State(Field(u, grid40), Field(eta, grid40))
        s_H = State(Field(u, grid40), Field(1 + eps * eta, grid40))
        du1, deta = sw1_rhs(s_eta, eps)
        du2, dH = swe_rhs(s_H)
        assert np.max(np.abs(du1.values - du2.values)) < 1e-12
        assert np.max(np.abs(eps * deta.values - dH.values)) < 1e-10

    def test_rejects_bad_eps(self, grid40):
        s = State(Field(np.zeros(256), grid40), Field(np.zeros(256), grid40))
        with pytest.raises(ValueError, match="eps"):
            sw1_rhs(s, 0.0)


class TestLinearRhs:
    def test_rest(self, grid40):
        s = State(Field(np.zeros(256), grid40), Field(np.zeros(256), grid40))
        du, deta = linear_rhs(s, 0.1)
        assert np.max(np.abs(du.values)) < 1e-15
        assert np.max(np.abs(deta.values)) < 1e-15

    def test_right_mover_characteristic(self, grid40):
        # With u = eps*eta the elevation is transported: eta_t = -eta_x.
        eps = 0.1
        f = np.exp(-((grid40.nodes - 20.0) ** 2))
        s = State(Field(eps * f, grid40), Field(f, grid40))
        _, deta = linear_rhs(s, eps)
        fprime = grid40.deriv_values(f, 1)
        assert np.max(np.abs(deta.values + fprime)) < 1e-10

    def test_rejects_bad_eps(self, grid40):
        s = State(Field(np.zeros(256), grid40), Field(np.zeros(256), grid40))
        with pytest.raises(ValueError, match="eps"):
            linear_rhs(s, -1.0)


class TestCHReduction:
    def test_rest(self, grid40):
        s = State(Field(np.zeros(256), grid40), Field(np.zeros(256), grid40))
        du, dH = ch_reduction_check(s, Sign.PLUS)
        assert np.all(du.values == 0.0)
        assert np.all(dH.values == 0.0)

    def test_signs_identical(self, grid40):
        x = grid40.nodes
        u = 0.5 / np.cosh((x - 20.0) / 1.5)
        s = State(Field(u, grid40), Field(np.zeros(256), grid40))
        du_p, _ = ch_reduction_check(s, Sign.PLUS)
        du_m, _ = ch_reduction_check(s, Sign.MINUS)
        assert np.array_equal(du_p.values, du_m.values)

    def test_mollified_peakon_against_fd_oracle(self):
        L = 40.0
        n_fine = 4096
        g = make_grid(256, L)
        u_fn = lambda x: 0.5 / np.cosh((x - 20.0) / 1.5)
        s = State(Field(u_fn(g.nodes), g), Field(np.zeros(256), g))
        du, _ = ch_reduction_check(s, Sign.PLUS)
        xf = np.arange(n_fine) * L / n_fine
        du_fd = fd_twoch_u_tendency(u_fn(xf), np.zeros(n_fine), 1.0, L)
        assert np.max(np.abs(du.values - du_fd[:: n_fine // 256])) < 1e-5

    def test_rejects_nonzero_H(self, grid40):
        s = State(Field(np.zeros(256), grid40), Field(np.ones(256), grid40))
        with pytest.raises(ValueError, match="identically zero"):
            ch_reduction_check(s, Sign.PLUS)


class TestReconstructDiagnostics:
    def test_zero_velocity(self, grid40):
        s = State(Field(np.zeros(256), grid40), Field(np.full(256, 1.05), grid40))
        v, p = reconstruct_diagnostics(s, 0.1, z=0.5)
        assert np.all(v.values == 0.0)
        assert np.max(np.abs(p.values - 0.05)) < 1e-15

    def test_surface_kinematics_identity(self, grid40):
        # At z = H the reconstruction matches eps*(eta_t + u eta_x) computed
        # from the shallow-water tendency.
        eps = 0.1
        x = grid40.nodes
        eta = np.exp(-((x - 20.0) ** 2))
        s = State(Field(eps * eta, grid40), Field(1 + eps * eta, grid40))
        v, _ = reconstruct_diagnostics(s, eps, z=s.H.values)
        _, dH = swe_rhs(s)
        kinematic = dH.values + s.u.values * grid40.deriv_values(s.H.values, 1)
        assert np.max(np.abs(v.values - kinematic)) < 1e-6

    def test_rejects_height_above_surface(self, grid40):
        s = State(Field(np.zeros(256), grid40), Field(np.ones(256), grid40))
        with pytest.raises(ValueError, match="0 <= z <= H"):
            reconstruct_diagnostics(s, 0.1, z=1.5)
        with pytest.raises(ValueError, match="0 <= z <= H"):
            reconstruct_diagnostics(s, 0.1, z=-0.1)
