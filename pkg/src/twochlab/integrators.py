"""Fixed-step RK4 time integration, simulation driver, and convergence harness.

Fixed stepping keeps conservation diagnostics reproducible run to run;
``suggest_dt`` provides an advective CFL estimate when choosing a step size.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .functionals import DiagnosticsRecord, compute_record
from .grid import Field, NonFiniteError
from .models import (
    CavitationError,
    Sign,
    State,
    ch_reduction_check,
    linear_rhs,
    sw1_rhs,
    swe_rhs,
    twoch_rhs,
)

__all__ = [
    "Model",
    "Status",
    "SimConfig",
    "Trajectory",
    "ConvergenceStudy",
    "model_rhs",
    "rk4_step",
    "simulate",
    "convergence_study",
    "suggest_dt",
]

RHS = Callable[[State], tuple[Field, Field]]


class Model(enum.Enum):
    TWOCH_PLUS = "twoch_plus"
    TWOCH_MINUS = "twoch_minus"
    SWE = "swe"
    SW1 = "sw1"
    LINEAR = "linear"
    CH_REDUCTION = "ch_reduction"


class Status(enum.Enum):
    COMPLETED = "completed"
    BREAKING_SUSPECTED = "breaking_suspected"
    NON_FINITE = "non_finite"


#: Models whose second state channel is the elevation eta rather than H.
ETA_MODELS = (Model.SW1, Model.LINEAR)


@dataclass(frozen=True)
class SimConfig:
    dt: float
    t_end: float
    sample_every: int = 1
    model: Model = Model.TWOCH_PLUS
    eps: float = 0.1
    blowup_threshold: float = 1e3
    snapshot_every: int | None = None  # defaults to sample_every

    def __post_init__(self) -> None:
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if not self.t_end > 0:
            raise ValueError(f"t_end must be positive, got {self.t_end}")
        if not self.dt < self.t_end:
            raise ValueError(f"dt={self.dt} must be smaller than t_end={self.t_end}")
        if self.sample_every < 1:
            raise ValueError(f"sample_every must be >= 1, got {self.sample_every}")
        if not self.blowup_threshold > 0:
            raise ValueError("blowup_threshold must be positive")
        if self.snapshot_every is not None and self.snapshot_every < 1:
            raise ValueError("snapshot_every must be >= 1 when given")


@dataclass
class Trajectory:
    states: list[State]
    diagnostics: list[DiagnosticsRecord]
    status: Status
    config: SimConfig


@dataclass(frozen=True)
class ConvergenceStudy:
    pairs: list[tuple[float, float]]  # (dt, terminal error vs finest run)
    order: float | None
    degenerate: bool

    @property
    def label(self) -> str:
        return "degenerate" if self.degenerate else f"{self.order:.3f}"


def model_rhs(model: Model, eps: float) -> RHS:
    """Tendency evaluator for a model; eps feeds the elevation-form systems."""
    if model is Model.TWOCH_PLUS:
        return lambda s: twoch_rhs(s, Sign.PLUS)
    if model is Model.TWOCH_MINUS:
        return lambda s: twoch_rhs(s, Sign.MINUS)
    if model is Model.SWE:
        return swe_rhs
    if model is Model.SW1:
        return lambda s: sw1_rhs(s, eps)
    if model is Model.LINEAR:
        return lambda s: linear_rhs(s, eps)
    if model is Model.CH_REDUCTION:
        return lambda s: ch_reduction_check(s, Sign.PLUS)
    raise ValueError(f"unknown model {model}")


def rk4_step(s: State, dt: float, rhs: RHS) -> State:
    """One classical four-stage Runge-Kutta step."""
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    g = s.grid
    u0, H0 = s.u.values, s.H.values

    def at(scale: float, ku: Field, kH: Field, t: float) -> State:
        return State(
            Field(u0 + scale * ku.values, g), Field(H0 + scale * kH.values, g), t
        )

    k1u, k1H = rhs(s)
    k2u, k2H = rhs(at(0.5 * dt, k1u, k1H, s.t + 0.5 * dt))
    k3u, k3H = rhs(at(0.5 * dt, k2u, k2H, s.t + 0.5 * dt))
    k4u, k4H = rhs(at(dt, k3u, k3H, s.t + dt))
    u1 = u0 + (dt / 6.0) * (k1u.values + 2 * k2u.values + 2 * k3u.values + k4u.values)
    H1 = H0 + (dt / 6.0) * (k1H.values + 2 * k2H.values + 2 * k3H.values + k4H.values)
    return State(Field(u1, g), Field(H1, g), s.t + dt)


def _surface_view(s: State, model: Model, eps: float) -> State:
    """State with the second channel expressed as H (eta models get 1 + eps*eta)."""
    if model in ETA_MODELS:
        return State(s.u, Field(1.0 + eps * s.H.values, s.grid), s.t)
    return s


def simulate(initial: State, cfg: SimConfig) -> Trajectory:
    """Integrate to t_end, sampling diagnostics and snapshots along the way.

    Blow-up is reported through Trajectory.status instead of raising:
    non-finite values give NON_FINITE, a slope max|u_x| above
    cfg.blowup_threshold gives BREAKING_SUSPECTED (the offending state is kept
    as evidence). Only invalid configuration raises.
    """
    rhs = model_rhs(cfg.model, cfg.eps)
    snapshot_every = cfg.snapshot_every or cfg.sample_every
    n_steps = max(1, math.ceil(cfg.t_end / cfg.dt - 1e-12))

    states = [initial]
    diagnostics = [compute_record(_surface_view(initial, cfg.model, cfg.eps), cfg.eps)]
    status = Status.COMPLETED

    s = initial
    for i in range(1, n_steps + 1):
        dt = cfg.dt if i < n_steps else cfg.t_end - (n_steps - 1) * cfg.dt
        try:
            s = rk4_step(s, dt, rhs)
        except (NonFiniteError, CavitationError) as err:
            status = (
                Status.NON_FINITE
                if isinstance(err, NonFiniteError)
                else Status.BREAKING_SUSPECTED
            )
            break
        s = State(s.u, s.H, initial.t + (i * cfg.dt if i < n_steps else cfg.t_end))
        breaking = (
            float(np.max(np.abs(s.grid.deriv_values(s.u.values, 1))))
            > cfg.blowup_threshold
        )
        if breaking or i % cfg.sample_every == 0 or i == n_steps:
            diagnostics.append(
                compute_record(_surface_view(s, cfg.model, cfg.eps), cfg.eps)
            )
        if breaking or i % snapshot_every == 0 or i == n_steps:
            states.append(s)
        if breaking:
            status = Status.BREAKING_SUSPECTED
            break
    return Trajectory(states=states, diagnostics=diagnostics, status=status, config=cfg)


def convergence_study(
    initial: State, cfg: SimConfig, refinements: int
) -> ConvergenceStudy:
    """Self-convergence of terminal states under dt, dt/2, ..., dt/2^(r-1).

    Errors are max-norm distances to the finest run; the order is the
    least-squares slope in log-log. Runs whose errors sit at the numerical
    floor (< 1e-14) are reported as degenerate with no fitted order.
    """
    if refinements < 3:
        raise ValueError(f"need at least 3 refinements, got {refinements}")
    dts = [cfg.dt / 2**i for i in range(refinements)]
    finals = []
    for dt in dts:
        sub = SimConfig(
            dt=dt,
            t_end=cfg.t_end,
            sample_every=10**9,  # only endpoints matter here
            model=cfg.model,
            eps=cfg.eps,
            blowup_threshold=cfg.blowup_threshold,
        )
        traj = simulate(initial, sub)
        if traj.status is not Status.COMPLETED:
            raise RuntimeError(f"convergence sub-run at dt={dt} ended {traj.status}")
        finals.append(traj.states[-1])
    ref = finals[-1]
    pairs = []
    for dt, s in zip(dts[:-1], finals[:-1]):
        err = max(
            float(np.max(np.abs(s.u.values - ref.u.values))),
            float(np.max(np.abs(s.H.values - ref.H.values))),
        )
        pairs.append((dt, err))
    errs = np.array([e for _, e in pairs])
    if np.all(errs < 1e-14):
        return ConvergenceStudy(pairs=pairs, order=None, degenerate=True)
    logs = np.log(np.array([d for d, _ in pairs]))
    slope = np.polyfit(logs, np.log(np.maximum(errs, 1e-300)), 1)[0]
    return ConvergenceStudy(pairs=pairs, order=float(slope), degenerate=False)


def suggest_dt(s: State, cfl: float = 0.5) -> float:
    """Advective CFL estimate cfl * dx / max|u| (capped for near-rest states)."""
    umax = float(np.max(np.abs(s.u.values)))
    return cfl * s.grid.spacing / max(umax, 1e-6)
