"""Conversions between physical and nondimensional variables.

The nondimensionalisation uses the undisturbed depth h0 as the vertical
scale, a typical wavelength as the horizontal scale, and a typical surface
amplitude a, with water density set to 1:

    x = wavelength * x',      z = h0 * z',        eta = a * eta',
    t = (wavelength / sqrt(g h0)) * t',            u = sqrt(g h0) * u',
    v = (h0 sqrt(g h0) / wavelength) * v',
    p = p0 + g h0 (1 - z') + g h0 * p'

(primes are nondimensional). The derived parameters are the amplitude ratio
eps = a / h0 and the shallowness ratio delta = h0 / wavelength. The pressure
map carries the hydrostatic offset explicitly, so the nondimensional p is
always the dynamic deviation; converting "p" therefore requires "z" alongside
it in the same unit system.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

__all__ = ["PhysicalScales", "params", "phys_to_nondim", "nondim_to_phys"]

QUANTITIES = ("x", "z", "eta", "t", "u", "v", "p")


@dataclass(frozen=True)
class PhysicalScales:
    """Reference scales: depth h0 [m], wavelength [m], amplitude [m], gravity [m/s^2]."""

    h0: float
    wavelength: float
    amplitude: float
    gravity: float = 9.81
    p0: float = 0.0  # atmospheric pressure, density-1 units

    def __post_init__(self) -> None:
        for name in ("h0", "wavelength", "amplitude", "gravity"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")


def params(s: PhysicalScales) -> tuple[float, float]:
    """(eps, delta) = (amplitude / depth, depth / wavelength)."""
    return s.amplitude / s.h0, s.h0 / s.wavelength


def _scale_factors(s: PhysicalScales) -> dict[str, float]:
    c = np.sqrt(s.gravity * s.h0)
    return {
        "x": s.wavelength,
        "z": s.h0,
        "eta": s.amplitude,
        "t": s.wavelength / c,
        "u": c,
        "v": s.h0 * c / s.wavelength,
    }


def nondim_to_phys(
    quantities: Mapping[str, np.ndarray | float], s: PhysicalScales
) -> dict[str, np.ndarray | float]:
    """Map nondimensional quantities to physical units.

    Keys from {x, z, eta, t, u, v, p}; converting "p" requires "z" (the
    hydrostatic part of the pressure depends on height).
    """
    _check_keys(quantities)
    factors = _scale_factors(s)
    out: dict[str, np.ndarray | float] = {}
    for key, value in quantities.items():
        value = np.asarray(value, dtype=float)
        if key == "p":
            z_nd = np.asarray(quantities["z"], dtype=float)
            out[key] = s.p0 + s.gravity * s.h0 * (1.0 - z_nd) + s.gravity * s.h0 * value
        else:
            out[key] = factors[key] * value
    return out


def phys_to_nondim(
    quantities: Mapping[str, np.ndarray | float], s: PhysicalScales
) -> dict[str, np.ndarray | float]:
    """Map physical quantities to nondimensional form (inverse of nondim_to_phys)."""
    _check_keys(quantities)
    factors = _scale_factors(s)
    out: dict[str, np.ndarray | float] = {}
    for key, value in quantities.items():
        value = np.asarray(value, dtype=float)
        if key == "p":
            z_nd = np.asarray(quantities["z"], dtype=float) / s.h0
            out[key] = (value - s.p0 - s.gravity * s.h0 * (1.0 - z_nd)) / (
                s.gravity * s.h0
            )
        else:
            out[key] = value / factors[key]
    return out


def _check_keys(quantities: Mapping[str, np.ndarray | float]) -> None:
    unknown = set(quantities) - set(QUANTITIES)
    if unknown:
        raise ValueError(f"unknown quantities {sorted(unknown)}; expected {QUANTITIES}")
    if "p" in quantities and "z" not in quantities:
        raise ValueError("converting 'p' requires 'z' for the hydrostatic offset")
