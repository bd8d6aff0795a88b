"""Discrete paths in the circle diffeomorphism group and the action principle.

A flow path stores gamma(X, t) = X + d(X, t) on a uniform label grid, with d
periodic in X, so orientation-preserving circle diffeomorphisms are exactly
representable. The Eulerian fields of a path are

    u = gamma_t o gamma^{-1}
    H = (H0 o gamma^{-1}) * J_{gamma^{-1}},   J_{gamma^{-1}} = 1 / (gamma_X o gamma^{-1})

and the action of a path over [0, T] is the time integral of

    1/2 * int [ u^2 + u_x^2 -/+ (H - 1)^2 ] dx

with the minus sign for the transported Lagrangian (kinetic minus potential)
and the plus sign for the transported metric (kinetic plus potential). The
sign conventions cross over: stationary paths of the Lagrangian solve the
plus-sign two-component Camassa-Holm system, stationary paths of the metric
solve the minus-sign one. ``stationarity_test`` checks both facts numerically
against the Euler-Lagrange residual

    R_± = u_t + 3 u u_x - u_txx - 2 u_x u_xx - u u_xxx ± H H_x

through the identity  d/de action(gamma + e*phi) = -int int (phi o gamma^{-1}) R dx dt.

Numerical conventions: gamma_t and u_t use centered second-order time
differences (one-sided second-order at the endpoints); gamma^{-1} is found
per Eulerian node by a bracketed, safeguarded Newton iteration on the
trigonometric interpolant of the displacement, to absolute tolerance 1e-12,
with a monotone-cubic fallback if the iteration stalls.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline, PchipInterpolator

from .functionals import kinetic_approx, potential
from .grid import Field, Grid, trig_interp
from .integrators import Trajectory
from .models import Sign, State

__all__ = [
    "MonotonicityError",
    "FlowPath",
    "TestPath",
    "StationarityReport",
    "eulerian_from_flow",
    "flow_from_velocity",
    "discrete_action",
    "first_variation",
    "el_residual",
    "max_admissible_epsilon",
    "residual_pairing",
    "stationarity_test",
    "subgroup_invariance_check",
    "random_test_path",
    "random_flow_path",
    "perturb_path",
]

INVERSION_TOL = 1e-12


class MonotonicityError(ValueError):
    """A stored map fails gamma_X > 0 and is not an orientation-preserving diffeomorphism."""


def _check_uniform_times(times: np.ndarray) -> float:
    steps = np.diff(times)
    if times.size < 3 or np.any(steps <= 0):
        raise ValueError("need at least three strictly increasing time slices")
    if not np.allclose(steps, steps[0], rtol=1e-10, atol=1e-12):
        raise ValueError("time slices must be uniform")
    return float(steps[0])


@dataclass
class FlowPath:
    """Time-indexed circle diffeomorphisms gamma = X + displacement, plus reference density H0."""

    grid: Grid
    times: np.ndarray
    displacement: np.ndarray  # shape (M+1, n), periodic in X
    H0: Field

    def __post_init__(self) -> None:
        self.times = np.asarray(self.times, dtype=float)
        self.displacement = np.asarray(self.displacement, dtype=float)
        self.dt = _check_uniform_times(self.times)
        if self.displacement.shape != (self.times.size, self.grid.n):
            raise ValueError(
                f"displacement shape {self.displacement.shape} does not match "
                f"{(self.times.size, self.grid.n)}"
            )
        if not np.all(np.isfinite(self.displacement)):
            raise ValueError("displacement contains non-finite values")
        if not np.all(self.H0.values > 0):
            raise ValueError("reference density H0 must be positive")
        dX = _row_deriv(self.grid, self.displacement)
        if np.min(1.0 + dX) <= 0.0:
            raise MonotonicityError(
                "gamma_X <= 0 somewhere: stored map is not a diffeomorphism"
            )

    @property
    def labels(self) -> np.ndarray:
        return self.grid.nodes

    @property
    def gamma(self) -> np.ndarray:
        return self.grid.nodes[None, :] + self.displacement

    @property
    def n_times(self) -> int:
        return int(self.times.size)


@dataclass
class TestPath:
    """Variation direction phi(X, t), periodic in X, zero at both time endpoints."""

    __test__ = False  # not a pytest class, despite the name

    grid: Grid
    times: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        self.times = np.asarray(self.times, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        _check_uniform_times(self.times)
        if self.values.shape != (self.times.size, self.grid.n):
            raise ValueError("test path shape does not match (times, grid)")
        if np.any(self.values[0] != 0.0) or np.any(self.values[-1] != 0.0):
            raise ValueError("test path must vanish at both time endpoints")


def _row_deriv(grid: Grid, rows: np.ndarray) -> np.ndarray:
    """Spectral X-derivative applied to each time slice."""
    spec = np.fft.rfft(rows, axis=1)
    return np.fft.irfft(spec * grid._deriv_mults[1][None, :], n=grid.n, axis=1)


def _time_derivative(rows: np.ndarray, dt: float) -> np.ndarray:
    """Centered second-order time differences, one-sided second-order at the ends."""
    out = np.empty_like(rows)
    out[1:-1] = (rows[2:] - rows[:-2]) / (2.0 * dt)
    out[0] = (-3.0 * rows[0] + 4.0 * rows[1] - rows[2]) / (2.0 * dt)
    out[-1] = (3.0 * rows[-1] - 4.0 * rows[-2] + rows[-3]) / (2.0 * dt)
    return out


class _SliceMap:
    """One time slice of a flow map with cheap repeated evaluation."""

    def __init__(self, grid: Grid, disp: np.ndarray):
        self.grid = grid
        n = grid.n
        spec = np.fft.rfft(disp)
        self.coef = spec / n
        k = 2.0 * np.pi * np.arange(n // 2 + 1) / grid.length
        w = np.full(n // 2 + 1, 2.0)
        w[0] = 1.0
        if n % 2 == 0:
            w[-1] = 1.0
        self.c0 = self.coef * w
        self.c1 = self.c0 * (1j * k)
        if n % 2 == 0:
            self.c1[-1] = 0.0
        self.k = k
        self.disp = disp
        # Extrema of the continuous interpolant can sit between nodes; bound
        # them from an oversampled evaluation plus a curvature margin so the
        # inversion bracket is guaranteed to contain the root.
        nfine = 8 * n
        fine = np.fft.irfft(spec, n=nfine) * (nfine / n)
        curv = np.fft.irfft(spec * (1j * k) ** 2, n=nfine) * (nfine / n)
        margin = (grid.length / nfine) ** 2 * float(np.max(np.abs(curv))) + 1e-9
        self.dmin = float(np.min(fine)) - margin
        self.dmax = float(np.max(fine)) + margin

    def displacement_at(self, X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        phase = np.exp(1j * np.multiply.outer(X, self.k))
        return (phase @ self.c0).real, (phase @ self.c1).real

    def gamma(self, X: np.ndarray) -> np.ndarray:
        d, _ = self.displacement_at(X)
        return X + d

    def invert(self, x: np.ndarray, guess: np.ndarray | None = None) -> np.ndarray:
        """Solve gamma(X) = x per node by safeguarded Newton to 1e-12."""
        lo = x - self.dmax
        hi = x - self.dmin
        X = np.clip(guess if guess is not None else x - np.interp(
            np.mod(x, self.grid.length), self.grid.nodes, self.disp,
            period=self.grid.length), lo, hi)
        for _ in range(100):
            d, dX = self.displacement_at(X)
            r = X + d - x
            if np.max(np.abs(r)) < INVERSION_TOL:
                return X
            lo = np.where(r < 0, X, lo)
            hi = np.where(r > 0, X, hi)
            slope = 1.0 + dX
            safe = slope > 1e-3
            step = np.where(safe, -r / np.where(safe, slope, 1.0), 0.0)
            Xn = X + step
            bad = ~safe | (Xn < lo) | (Xn > hi)
            X = np.where(bad, 0.5 * (lo + hi), Xn)
        return self._invert_pchip(x, lo, hi)

    def _invert_pchip(self, x: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
        # Monotone-cubic fallback: interpolate X as a function of the sampled
        # gamma values (extended by one period each way), then polish by bisection.
        nodes = self.grid.nodes
        L = self.grid.length
        Xs = np.concatenate([nodes - L, nodes, nodes + L])
        Gs = np.concatenate([nodes + self.disp - L, nodes + self.disp, nodes + self.disp + L])
        inverse = PchipInterpolator(Gs, Xs)
        X = np.clip(inverse(x), lo, hi)
        for _ in range(200):
            d, _ = self.displacement_at(X)
            r = X + d - x
            if np.max(np.abs(r)) < INVERSION_TOL:
                return X
            lo = np.where(r < 0, X, lo)
            hi = np.where(r > 0, X, hi)
            X = 0.5 * (lo + hi)
        raise MonotonicityError("flow map inversion failed to converge")


@dataclass
class _EulerianData:
    """Batch Eulerian reconstruction of a path: fields and inverse-map samples."""

    u: np.ndarray        # (M+1, n) velocity at Eulerian nodes
    H: np.ndarray        # (M+1, n) surface density at Eulerian nodes
    inverse: np.ndarray  # (M+1, n) X = gamma^{-1}(x) at Eulerian nodes


def _eulerian_data(path: FlowPath) -> _EulerianData:
    grid = path.grid
    gamma_t = _time_derivative(path.displacement, path.dt)
    M1 = path.n_times
    u = np.empty((M1, grid.n))
    H = np.empty((M1, grid.n))
    inv = np.empty((M1, grid.n))
    guess = None
    for j in range(M1):
        sm = _SliceMap(grid, path.displacement[j])
        X = sm.invert(grid.nodes, guess=guess)
        guess = X  # consecutive slices are close: warm start
        inv[j] = X
        _, dX = sm.displacement_at(X)
        u[j] = trig_interp(gamma_t[j], grid.length, X)
        H[j] = trig_interp(path.H0.values, grid.length, X) / (1.0 + dX)
    return _EulerianData(u=u, H=H, inverse=inv)


def eulerian_from_flow(path: FlowPath, j: int) -> State:
    """Eulerian state (u, H) of a flow path at time slice j."""
    grid = path.grid
    M1 = path.n_times
    if not 0 <= j < M1:
        raise IndexError(f"time index {j} out of range for {M1} slices")
    rows = path.displacement
    if j == 0:
        gt = (-3.0 * rows[0] + 4.0 * rows[1] - rows[2]) / (2.0 * path.dt)
    elif j == M1 - 1:
        gt = (3.0 * rows[-1] - 4.0 * rows[-2] + rows[-3]) / (2.0 * path.dt)
    else:
        gt = (rows[j + 1] - rows[j - 1]) / (2.0 * path.dt)
    sm = _SliceMap(grid, rows[j])
    X = sm.invert(grid.nodes)
    _, dX = sm.displacement_at(X)
    u = trig_interp(gt, grid.length, X)
    H = trig_interp(path.H0.values, grid.length, X) / (1.0 + dX)
    return State(Field(u, grid), Field(H, grid), float(path.times[j]))


def flow_from_velocity(traj: Trajectory) -> FlowPath:
    """Integrate the flow map of a trajectory's velocity field with RK4.

    Off-grid velocity values come from trigonometric interpolation in space and
    a cubic spline through the stored snapshots in time; H0 is the initial H,
    so the pullback reproduces H at t = 0.
    """
    states = traj.states
    if len(states) < 4:
        raise ValueError("need at least four snapshots to build a flow path")
    grid = states[0].grid
    times = np.array([s.t for s in states])
    _check_uniform_times(times)
    ufields = np.stack([s.u.values for s in states])
    spline = CubicSpline(times, ufields, axis=0)

    def velocity(t: float, pts: np.ndarray) -> np.ndarray:
        return trig_interp(spline(t), grid.length, pts)

    P = grid.nodes.copy()
    disp = np.zeros((times.size, grid.n))
    for j in range(times.size - 1):
        t, h = times[j], times[j + 1] - times[j]
        k1 = velocity(t, P)
        k2 = velocity(t + 0.5 * h, P + 0.5 * h * k1)
        k3 = velocity(t + 0.5 * h, P + 0.5 * h * k2)
        k4 = velocity(t + h, P + h * k3)
        P = P + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        disp[j + 1] = P - grid.nodes
    return FlowPath(grid=grid, times=times, displacement=disp, H0=states[0].H)


def _trapezoid_weights(times: np.ndarray) -> np.ndarray:
    w = np.full(times.size, times[1] - times[0])
    w[0] *= 0.5
    w[-1] *= 0.5
    return w


def discrete_action(path: FlowPath, variant: Sign) -> float:
    """Action of a path: time-trapezoid of the spatial Lagrangian/metric density.

    variant PLUS uses the Lagrangian integrand u^2 + u_x^2 - (H-1)^2 (whose
    critical points solve the plus-sign system); variant MINUS uses the metric
    integrand u^2 + u_x^2 + (H-1)^2 (critical points solve the minus-sign one).
    """
    data = _eulerian_data(path)
    grid = path.grid
    h_sign = -variant.coeff  # PLUS -> Lagrangian (minus), MINUS -> metric (plus)
    w = _trapezoid_weights(path.times)
    total = 0.0
    for j in range(path.n_times):
        s = State(Field(data.u[j], grid), Field(data.H[j], grid), float(path.times[j]))
        total += w[j] * (kinetic_approx(s) + h_sign * potential(s))
    return float(total)


def first_variation(
    path: FlowPath,
    test: TestPath,
    variant: Sign,
    epsilon_fd: float = 1e-5,
    richardson: bool = False,
) -> float:
    """Directional derivative of the action along a test path, by central differences.

    epsilon_fd is relative to the path scale max(1, |displacement|). The
    Richardson option combines step sizes eps and eps/2 for fourth-order
    accuracy. Raises MonotonicityError if the perturbed paths leave the
    diffeomorphism group (reduce epsilon_fd).
    """
    eps = epsilon_fd * max(1.0, float(np.max(np.abs(path.displacement))))

    def delta(e: float) -> float:
        plus = FlowPath(path.grid, path.times, path.displacement + e * test.values, path.H0)
        minus = FlowPath(path.grid, path.times, path.displacement - e * test.values, path.H0)
        return (discrete_action(plus, variant) - discrete_action(minus, variant)) / (2 * e)

    if np.all(test.values == 0.0):
        return 0.0
    if not richardson:
        return delta(eps)
    coarse, fine = delta(eps), delta(0.5 * eps)
    return (4.0 * fine - coarse) / 3.0


def max_admissible_epsilon(path: FlowPath, test: TestPath) -> float:
    """Largest |e| for which gamma +/- e*phi stays an orientation-preserving map.

    Computed from the stored samples: e < min (1 + d_X) / |phi_X| over all
    slices and nodes. There is no universal bound on the circle, so callers
    should compare their finite-difference step against this per-path value.
    """
    gamma_X = 1.0 + _row_deriv(path.grid, path.displacement)
    phi_X = np.abs(_row_deriv(path.grid, test.values))
    ratio = gamma_X / np.maximum(phi_X, 1e-300)
    return float(np.min(ratio))


def el_residual(s: State, u_t: Field, variant: Sign) -> Field:
    """Euler-Lagrange residual R = u_t + 3uu_x - u_txx - 2u_x u_xx - u u_xxx ± HH_x."""
    g = s.grid
    u = s.u.values
    ux = g.deriv_values(u, 1)
    uxx = g.deriv_values(u, 2)
    uxxx = g.deriv_values(u, 3)
    Hx = g.deriv_values(s.H.values, 1)
    r = (
        u_t.values
        + 3.0 * u * ux
        - g.deriv_values(u_t.values, 2)
        - 2.0 * ux * uxx
        - u * uxxx
        + variant.coeff * s.H.values * Hx
    )
    return Field(r, g)


def random_test_path(
    grid: Grid, times: np.ndarray, rng: np.random.Generator,
    amplitude: float = 0.05, n_modes: int = 5,
) -> TestPath:
    """Random smooth variation: lowest Fourier modes in X, polynomial bump in t."""
    L = grid.length
    profile = np.zeros(grid.n)
    for m in range(1, n_modes + 1):
        a, b = rng.normal(0.0, amplitude / m, size=2)
        profile += a * np.cos(2 * np.pi * m * grid.nodes / L)
        profile += b * np.sin(2 * np.pi * m * grid.nodes / L)
    tau = (times - times[0]) / (times[-1] - times[0])
    envelope = 16.0 * (tau * (1.0 - tau)) ** 2  # peaks at 1, vanishes at endpoints
    values = envelope[:, None] * profile[None, :]
    values[0] = 0.0
    values[-1] = 0.0
    return TestPath(grid=grid, times=np.asarray(times, float), values=values)


def random_flow_path(
    grid: Grid, times: np.ndarray, rng: np.random.Generator,
    amplitude: float = 0.3, n_modes: int = 4, H0: Field | None = None,
) -> FlowPath:
    """Random smooth path in the diffeomorphism group, rescaled to stay monotone."""
    times = np.asarray(times, dtype=float)
    L = grid.length
    tau = (times - times[0]) / (times[-1] - times[0])
    disp = np.zeros((times.size, grid.n))
    for m in range(1, n_modes + 1):
        theta = rng.uniform(0, 2 * np.pi)
        envelope = rng.normal(0.0, 1.0) * tau + rng.normal(0.0, 1.0) * np.sin(
            np.pi * tau * rng.integers(1, 3)
        )
        disp += (
            (amplitude / m)
            * rng.normal(0.0, 1.0)
            * np.outer(envelope, np.sin(2 * np.pi * m * grid.nodes / L + theta))
        )
    slope = np.min(1.0 + _row_deriv(grid, disp))
    if slope <= 0.2:
        disp *= 0.8 * 1.0 / (1.0 - slope)  # pull gamma_X away from zero
    if H0 is None:
        H0 = Field(np.ones(grid.n), grid)
    return FlowPath(grid=grid, times=times, displacement=disp, H0=H0)


def perturb_path(
    path: FlowPath,
    amplitude: float = 0.2,
    center: float | None = None,
    width: float | None = None,
) -> FlowPath:
    """Deterministic smooth off-solution perturbation vanishing at the endpoints.

    The perturbation is a localized Gaussian bump in X (center/width default to
    the middle of the box and a tenth of it) modulated by sin(pi t / T), so the
    relabeled path stays in the diffeomorphism group for moderate amplitudes
    and the induced Euler-Lagrange residual lives at a comparable scale to the
    fields being tested.
    """
    grid = path.grid
    center = grid.length / 2 if center is None else center
    width = grid.length / 10 if width is None else width
    tau = (path.times - path.times[0]) / (path.times[-1] - path.times[0])
    bump = np.sin(np.pi * tau)
    profile = np.exp(-(((grid.nodes - center) / width) ** 2))
    disp = path.displacement + amplitude * bump[:, None] * profile[None, :]
    return FlowPath(grid, path.times, disp, path.H0)


@dataclass(frozen=True)
class StationarityReport:
    variant: Sign
    solution_variations: np.ndarray
    perturbed_variations: np.ndarray
    residual_integrals: np.ndarray
    solution_max: float
    perturbed_max: float
    separation_ratio: float
    residual_match_rel_err: float


def _residual_fields(path: FlowPath, data: _EulerianData, variant: Sign) -> np.ndarray:
    grid = path.grid
    u_t = _time_derivative(data.u, path.dt)
    R = np.empty_like(data.u)
    for j in range(path.n_times):
        s = State(Field(data.u[j], grid), Field(data.H[j], grid), float(path.times[j]))
        R[j] = el_residual(s, Field(u_t[j], grid), variant).values
    return R


def residual_pairing(
    path: FlowPath, data: _EulerianData, test: TestPath, R: np.ndarray
) -> float:
    """Evaluate -int int (phi o gamma^{-1}) R dx dt with the action's quadratures."""
    grid = path.grid
    w = _trapezoid_weights(path.times)
    total = 0.0
    for j in range(path.n_times):
        phi_comp = trig_interp(test.values[j], grid.length, data.inverse[j])
        total += w[j] * grid.integrate_values(phi_comp * R[j])
    return -float(total)


def stationarity_test(
    traj: Trajectory,
    variant: Sign,
    trials: int,
    seed: int = 0,
    perturbation_amplitude: float = 0.2,
    perturbation_center: float | None = None,
    perturbation_width: float | None = None,
    epsilon_fd: float = 1e-5,
) -> StationarityReport:
    """Compare first variations on a solution path against an off-solution path.

    For `trials` random test paths, reports (a) |first variation| on the flow
    path reconstructed from the trajectory, (b) the same on a deliberately
    perturbed path, and (c) how well the perturbed-path variations match the
    residual pairing -int int (phi o gamma^{-1}) R dx dt, as the maximum
    difference relative to the largest pairing in the batch.
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    path = flow_from_velocity(traj)
    rng = np.random.default_rng(seed)
    tests = [random_test_path(path.grid, path.times, rng) for _ in range(trials)]

    sol = np.array([first_variation(path, t, variant, epsilon_fd) for t in tests])

    pert = perturb_path(
        path, perturbation_amplitude, perturbation_center, perturbation_width
    )
    pert_vals = np.array([first_variation(pert, t, variant, epsilon_fd) for t in tests])

    data = _eulerian_data(pert)
    R = _residual_fields(pert, data, variant)
    integrals = np.array([residual_pairing(pert, data, t, R) for t in tests])

    sol_max = float(np.max(np.abs(sol)))
    pert_max = float(np.max(np.abs(pert_vals)))
    # Match error relative to the batch scale of the pairings: a random test
    # path can be nearly orthogonal to R, and its tiny pairing must not blow
    # up an otherwise uniform agreement.
    scale = max(float(np.max(np.abs(integrals))), 1e-30)
    rel = float(np.max(np.abs(pert_vals - integrals))) / scale
    return StationarityReport(
        variant=variant,
        solution_variations=sol,
        perturbed_variations=pert_vals,
        residual_integrals=integrals,
        solution_max=sol_max,
        perturbed_max=pert_max,
        separation_ratio=sol_max / max(pert_max, 1e-300),
        residual_match_rel_err=rel,
    )


def subgroup_invariance_check(
    path: FlowPath, psi_displacement: np.ndarray, variant: Sign
) -> tuple[float, float]:
    """Action before and after relabeling by psi(X) = X + e(X) preserving H0.

    psi must satisfy (H0 o psi^{-1}) * J_{psi^{-1}} = H0 to 1e-10 (for H0 = 1
    on the circle these are the rigid label shifts); otherwise the relabeling
    is rejected.
    """
    grid = path.grid
    e = np.asarray(psi_displacement, dtype=float)
    if e.shape != (grid.n,):
        raise ValueError("psi displacement must be sampled on the label grid")
    sm = _SliceMap(grid, e)
    Xi = sm.invert(grid.nodes)
    _, dX = sm.displacement_at(Xi)
    pushed = trig_interp(path.H0.values, grid.length, Xi) / (1.0 + dX)
    if np.max(np.abs(pushed - path.H0.values)) > 1e-10:
        raise ValueError("psi does not preserve the reference density H0")
    psi_pts = grid.nodes + e
    disp = np.empty_like(path.displacement)
    for j in range(path.n_times):
        disp[j] = e + trig_interp(path.displacement[j], grid.length, psi_pts)
    relabeled = FlowPath(grid, path.times, disp, path.H0)
    return discrete_action(path, variant), discrete_action(relabeled, variant)
