"""Periodic pseudo-spectral grid: differentiation, Helmholtz inversion, quadrature, interpolation.

All operators act on real fields sampled at the uniformly spaced nodes of a
periodic interval [0, L). Derivatives and the Helmholtz solve are exact on the
resolved Fourier band; quadrature is the periodic trapezoid rule, which is
spectrally accurate for smooth periodic integrands. The periodic box stands in
for an unbounded domain with decaying fields, so experiments are expected to
keep their support away from the boundary (see ``boundary_support``).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "NonFiniteError",
    "Grid",
    "Field",
    "make_grid",
    "diff",
    "helmholtz_inverse",
    "quadrature",
    "interp",
    "dealias",
    "trig_interp",
    "boundary_support",
]


class NonFiniteError(ValueError):
    """A field contains NaN or infinite entries; in a running model this signals blow-up."""


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid on [0, length) with precomputed spectral metadata.

    Attributes
    ----------
    n : even number of nodes, at least 8.
    length : domain period L.
    nodes : x_i = i * L / n.
    wavenumbers : k_j = 2*pi*j/L in standard FFT order
        (0, 1, ..., n/2-1, -n/2, ..., -1 times 2*pi/L).
    """

    n: int
    length: float
    nodes: np.ndarray = field(init=False, repr=False, compare=False)
    wavenumbers: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.n % 2 != 0:
            raise ValueError(f"grid size must be even, got n={self.n}")
        if self.n < 8:
            raise ValueError(f"grid size must be at least 8, got n={self.n}")
        if not self.length > 0:
            raise ValueError(f"domain length must be positive, got {self.length}")
        object.__setattr__(self, "length", float(self.length))
        spacing = self.length / self.n
        object.__setattr__(self, "nodes", spacing * np.arange(self.n))
        object.__setattr__(
            self, "wavenumbers", 2.0 * np.pi * np.fft.fftfreq(self.n, d=spacing)
        )
        # rfft-layout metadata used by all spectral kernels below.
        rk = 2.0 * np.pi * np.fft.rfftfreq(self.n, d=spacing)
        object.__setattr__(self, "_rk", rk)
        object.__setattr__(self, "_helmholtz", 1.0 / (1.0 + rk**2))
        # 2/3-rule mask; products of masked fields alias only into the zeroed band.
        object.__setattr__(self, "_dealias_mask", np.abs(rk) <= (2.0 / 3.0) * rk[-1])
        mults = {}
        for order in (1, 2, 3):
            m = (1j * rk) ** order
            if order % 2 == 1:
                m[-1] = 0.0  # symmetric-spectrum convention: no Nyquist in odd derivatives
            mults[order] = m
        object.__setattr__(self, "_deriv_mults", mults)

    @property
    def spacing(self) -> float:
        return self.length / self.n

    # Array-level kernels. These are what the model right-hand sides call in
    # their hot loops; the Field-level functions below wrap them.

    def deriv_values(self, values: np.ndarray, order: int) -> np.ndarray:
        if order not in (1, 2, 3):
            raise ValueError(f"derivative order must be 1, 2 or 3, got {order}")
        return np.fft.irfft(np.fft.rfft(values) * self._deriv_mults[order], n=self.n)

    def helmholtz_values(self, values: np.ndarray) -> np.ndarray:
        return np.fft.irfft(np.fft.rfft(values) * self._helmholtz, n=self.n)

    def dealias_values(self, values: np.ndarray) -> np.ndarray:
        return np.fft.irfft(np.fft.rfft(values) * self._dealias_mask, n=self.n)

    def integrate_values(self, values: np.ndarray) -> float:
        return float(self.spacing * np.sum(values))


@dataclass
class Field:
    """Real values sampled at the nodes of a Grid."""

    values: np.ndarray
    grid: Grid

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        if values.shape != (self.grid.n,):
            raise ValueError(
                f"field shape {values.shape} does not match grid size {self.grid.n}"
            )
        if not np.all(np.isfinite(values)):
            raise NonFiniteError("field contains non-finite values")
        self.values = values


def make_grid(n: int, length: float) -> Grid:
    """Build a periodic grid with n uniform nodes on [0, length)."""
    return Grid(n=n, length=length)


def diff(f: Field, order: int) -> Field:
    """Spectral derivative of order 1, 2 or 3 (Nyquist mode zeroed for odd orders)."""
    return Field(f.grid.deriv_values(f.values, order), f.grid)


def helmholtz_inverse(f: Field) -> Field:
    """Solve g - g_xx = f mode-wise: division by 1 + k^2."""
    return Field(f.grid.helmholtz_values(f.values), f.grid)


def quadrature(f: Field) -> float:
    """Periodic trapezoid rule (L/n) * sum(values); exact for resolved modes."""
    return f.grid.integrate_values(f.values)


def dealias(f: Field) -> Field:
    """Zero all modes above two thirds of the Nyquist wavenumber."""
    return Field(f.grid.dealias_values(f.values), f.grid)


def trig_interp(
    values: np.ndarray, length: float, points: np.ndarray, deriv: int = 0
) -> np.ndarray:
    """Evaluate the band-limited trigonometric interpolant of periodic samples.

    ``values`` are samples on the uniform grid of period ``length``; the
    interpolant reproduces them exactly at the nodes and is evaluated at
    arbitrary real ``points`` (periodicity makes reduction mod L unnecessary).
    ``deriv`` differentiates the interpolant, with the Nyquist mode dropped for
    odd orders to match the grid derivative convention.
    """
    values = np.asarray(values, dtype=float)
    pts = np.asarray(points, dtype=float)
    if not np.all(np.isfinite(pts)):
        raise ValueError("interpolation points must be finite")
    n = values.size
    coef = np.fft.rfft(values) / n
    k = 2.0 * np.pi * np.arange(n // 2 + 1) / length
    weights = np.full(n // 2 + 1, 2.0)
    weights[0] = 1.0
    if n % 2 == 0:
        weights[-1] = 1.0  # Nyquist coefficient is real: contributes cos(k_N x) once
    c = coef * weights * (1j * k) ** deriv
    if deriv % 2 == 1 and n % 2 == 0:
        c[-1] = 0.0
    phase = np.exp(1j * np.multiply.outer(pts, k))
    return (phase @ c).real


def interp(f: Field, points: np.ndarray) -> np.ndarray:
    """Periodic trigonometric interpolation of a field at arbitrary points.

    Spectrally accurate for smooth fields. Flow maps (identity plus periodic
    displacement) are not plain periodic functions; the variational module
    interpolates their displacement part instead.
    """
    return trig_interp(f.values, f.grid.length, points)


def boundary_support(f: Field) -> float:
    """Ratio of the field magnitude at the domain edges to its peak magnitude.

    Sanity diagnostic for the periodic-box surrogate of a decaying problem:
    well-posed experiments keep this below ~1e-10.
    """
    peak = float(np.max(np.abs(f.values)))
    if peak == 0.0:
        return 0.0
    edge = max(abs(f.values[0]), abs(f.values[-1]))
    return float(edge / peak)
