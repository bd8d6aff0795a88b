"""Model tendencies (method of lines) for the shallow-water wave family.

Implemented systems, all nondimensional on a periodic grid:

  two-component Camassa-Holm, with either sign of the surface coupling:
      u_t + 3 u u_x - u_txx - 2 u_x u_xx - u u_xxx +/- H H_x = 0
      H_t + (H u)_x = 0
  solved for u_t by applying the inverse Helmholtz operator (1 - dxx)^{-1}
  to the collected nonlinearity, and equivalently in momentum form with
  m = u - u_xx:
      m_t + u m_x + 2 u_x m +/- H H_x = 0

  classical shallow water:        u_t = -u u_x - H_x,     H_t = -(H u)_x
  surface-elevation form (eps):   u_t = -u u_x - eps*eta_x,
                                  eps*eta_t = -[(1 + eps*eta) u]_x
  linearized waves:               u_t = -eps*eta_x,  eps*eta_t = -u_x
                                  (so eta_tt = eta_xx)

Quadratic products in the nonlinear right-hand sides are 2/3-rule dealiased;
the grid primitives themselves stay exact and composable.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .grid import Field, Grid, helmholtz_inverse

__all__ = [
    "Sign",
    "State",
    "MomentumState",
    "CavitationError",
    "twoch_rhs",
    "twoch_rhs_momentum",
    "to_momentum",
    "from_momentum",
    "swe_rhs",
    "sw1_rhs",
    "linear_rhs",
    "ch_reduction_check",
    "reconstruct_diagnostics",
]

Tendency = tuple[Field, Field]


class CavitationError(ValueError):
    """The free surface H is not strictly positive where the model requires it."""


class Sign(enum.Enum):
    """Sign of the H H_x coupling in the two-component Camassa-Holm system."""

    PLUS = 1
    MINUS = -1

    @property
    def coeff(self) -> float:
        return float(self.value)


@dataclass
class State:
    """Eulerian fields at one time: velocity u and free surface H = 1 + eps*eta.

    For the surface-elevation and linear models the second channel holds eta
    itself; positivity of H is a per-model requirement, not a container one
    (the H = 0 reduction is a legitimate algebraic state).
    """

    u: Field
    H: Field
    t: float = 0.0

    def __post_init__(self) -> None:
        if self.u.grid is not self.H.grid and self.u.grid != self.H.grid:
            raise ValueError("u and H must share one grid")

    @property
    def grid(self) -> Grid:
        return self.u.grid


@dataclass
class MomentumState:
    """Same content as State but with the momentum density m = u - u_xx."""

    m: Field
    H: Field
    t: float = 0.0

    def __post_init__(self) -> None:
        if self.m.grid is not self.H.grid and self.m.grid != self.H.grid:
            raise ValueError("m and H must share one grid")

    @property
    def grid(self) -> Grid:
        return self.m.grid


def _require_positive_surface(H: Field) -> None:
    if not np.all(H.values > 0.0):
        raise CavitationError("free surface H must be strictly positive")


def twoch_rhs(s: State, sign: Sign) -> Tendency:
    """Tendency of the two-component Camassa-Holm system in (u, H) variables.

    u_t = (1 - dxx)^{-1} [ -3 u u_x + 2 u_x u_xx + u u_xxx -/+ H H_x ]
    H_t = -(H u)_x
    """
    _require_positive_surface(s.H)
    g = s.grid
    u = g.dealias_values(s.u.values)
    H = g.dealias_values(s.H.values)
    ux = g.deriv_values(u, 1)
    uxx = g.deriv_values(u, 2)
    uxxx = g.deriv_values(u, 3)
    Hx = g.deriv_values(H, 1)
    bracket = g.dealias_values(
        -3.0 * u * ux + 2.0 * ux * uxx + u * uxxx - sign.coeff * H * Hx
    )
    du = g.helmholtz_values(bracket)
    dH = -g.deriv_values(g.dealias_values(H * u), 1)
    return Field(du, g), Field(dH, g)


def twoch_rhs_momentum(ms: MomentumState, sign: Sign) -> Tendency:
    """Two-component Camassa-Holm tendency in (m, H) variables, u = (1-dxx)^{-1} m."""
    _require_positive_surface(ms.H)
    g = ms.grid
    u = g.dealias_values(g.helmholtz_values(ms.m.values))
    m = g.dealias_values(ms.m.values)
    H = g.dealias_values(ms.H.values)
    ux = g.deriv_values(u, 1)
    mx = g.deriv_values(m, 1)
    Hx = g.deriv_values(H, 1)
    dm = -g.dealias_values(u * mx + 2.0 * ux * m + sign.coeff * H * Hx)
    dH = -g.deriv_values(g.dealias_values(H * u), 1)
    return Field(dm, g), Field(dH, g)


def to_momentum(s: State) -> MomentumState:
    """Map (u, H) to (m, H) with m = u - u_xx."""
    m = Field(s.u.values - s.grid.deriv_values(s.u.values, 2), s.grid)
    return MomentumState(m, s.H, s.t)


def from_momentum(ms: MomentumState) -> State:
    """Map (m, H) back to (u, H); exact inverse of to_momentum on the grid."""
    return State(helmholtz_inverse(ms.m), ms.H, ms.t)


def swe_rhs(s: State) -> Tendency:
    """Classical shallow water equations: u_t = -u u_x - H_x, H_t = -(H u)_x."""
    _require_positive_surface(s.H)
    g = s.grid
    u = g.dealias_values(s.u.values)
    H = g.dealias_values(s.H.values)
    du = -g.dealias_values(u * g.deriv_values(u, 1)) - g.deriv_values(s.H.values, 1)
    dH = -g.deriv_values(g.dealias_values(H * u), 1)
    return Field(du, g), Field(dH, g)


def sw1_rhs(s: State, eps: float) -> Tendency:
    """Shallow water in surface-elevation variables (u, eta), H = 1 + eps*eta.

    u_t = -u u_x - eps*eta_x,  eta_t = -[(1 + eps*eta) u]_x / eps
    """
    if not eps > 0:
        raise ValueError(f"amplitude parameter eps must be positive, got {eps}")
    g = s.grid
    u = g.dealias_values(s.u.values)
    eta = g.dealias_values(s.H.values)
    du = -g.dealias_values(u * g.deriv_values(u, 1)) - eps * g.deriv_values(
        s.H.values, 1
    )
    flux = g.dealias_values((1.0 + eps * eta) * u)
    deta = -g.deriv_values(flux, 1) / eps
    return Field(du, g), Field(deta, g)


def linear_rhs(s: State, eps: float) -> Tendency:
    """Linearized system u_t = -eps*eta_x, eta_t = -u_x / eps (eta_tt = eta_xx)."""
    if not eps > 0:
        raise ValueError(f"amplitude parameter eps must be positive, got {eps}")
    g = s.grid
    du = -eps * g.deriv_values(s.H.values, 1)
    deta = -g.deriv_values(s.u.values, 1) / eps
    return Field(du, g), Field(deta, g)


def ch_reduction_check(s: State, sign: Sign) -> Tendency:
    """Two-component tendency at H identically zero: the single-component reduction.

    With H = 0 the surface coupling H H_x vanishes identically, so both signs
    produce the same u-tendency, which is that of the one-component
    Camassa-Holm equation; the H channel stays zero.
    """
    if np.any(s.H.values != 0.0):
        raise ValueError("reduction requires H identically zero")
    g = s.grid
    u = g.dealias_values(s.u.values)
    ux = g.deriv_values(u, 1)
    uxx = g.deriv_values(u, 2)
    uxxx = g.deriv_values(u, 3)
    Hx = g.deriv_values(s.H.values, 1)
    bracket = g.dealias_values(
        -3.0 * u * ux + 2.0 * ux * uxx + u * uxxx - sign.coeff * s.H.values * Hx
    )
    du = g.helmholtz_values(bracket)
    return Field(du, g), Field(np.zeros(g.n), g)


def reconstruct_diagnostics(
    s: State, eps: float, z: float | np.ndarray
) -> tuple[Field, Field]:
    """Leading-order vertical velocity and dynamic pressure below the surface.

    v(x, z) = -z * u_x(x) and p(x) = eps*eta = H - 1. The height z may be a
    scalar or a per-node array (z = H.values evaluates at the free surface);
    it must satisfy 0 <= z <= H pointwise.
    """
    z = np.asarray(z, dtype=float)
    if np.any(z < 0.0) or np.any(z > s.H.values):
        raise ValueError("height z must satisfy 0 <= z <= H everywhere")
    ux = s.grid.deriv_values(s.u.values, 1)
    v = Field(-z * ux, s.grid)
    p = Field(s.H.values - 1.0, s.grid)
    return v, p
