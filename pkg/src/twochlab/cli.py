"""Command-line front end: named experiment scenarios with structured outputs.

A run reads a plain-text config (``key = value`` under ``[section]`` headers,
see README), executes one scenario, and writes four files into the output
directory:

    run_meta.json     resolved configuration, code version, grid, timings
    diagnostics.csv   one DiagnosticsRecord per row (fixed header, 17-digit floats)
    snapshots.csv     long-format x,t,u,H field snapshots
    report.json       scenario metrics and the pass/fail verdict

Exit status is 0 on pass, 1 on scenario failure or model blow-up (reason in
report.json), 2 on an invalid configuration.
"""

from __future__ import annotations

import argparse
import configparser
import dataclasses
import json
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .functionals import DiagnosticsRecord, drift_report
from .grid import Field, Grid, boundary_support, make_grid
from .integrators import (
    ETA_MODELS,
    Model,
    SimConfig,
    Status,
    Trajectory,
    convergence_study,
    simulate,
)
from .models import Sign, State, reconstruct_diagnostics, swe_rhs, twoch_rhs
from .variational import (
    random_flow_path,
    stationarity_test,
    subgroup_invariance_check,
)

CSV_HEADER = "t,mass,momentum,energy_plus,energy_minus,kinetic_exact,kinetic_approx,potential,lagrangian,metric"

SCENARIOS: dict[str, str] = {
    "conservation": "mass, momentum and sign-matched energy stay constant along a run "
    "(energy_plus for the plus sign, energy_minus for minus; the opposite energy drifts)",
    "convergence": "RK4 self-convergence on a smooth run has temporal order ~4",
    "linear_limit": "small-amplitude shallow water tracks the translated right-moving "
    "wave profile with error O(eps)",
    "variational_stationarity": "first variation of the action vanishes on solution "
    "flow paths and matches the Euler-Lagrange residual pairing off-solution",
    "sign_crossover": "mismatched action/trajectory sign pairings must fail the "
    "stationarity separation",
    "ch_reduction": "at H=0 both sign variants reduce exactly to the single-component "
    "Camassa-Holm tendency",
    "swe_comparison": "reconstructed surface vertical velocity matches the kinematic "
    "free-surface transport rate along a shallow-water run",
    "custom": "free-form run; named checks: formulation_equivalence, eps_truncation, "
    "subgroup_invariance",
}

_MODEL_SIGNS = {Model.TWOCH_PLUS: Sign.PLUS, Model.TWOCH_MINUS: Sign.MINUS}


@dataclass
class ExperimentSpec:
    scenario: str
    n: int = 256
    length: float = 40.0
    model: str = "twoch_plus"  # a Model value or "all"
    dt: float = 1e-3
    t_end: float = 1.0
    sample_every: int = 10
    eps: float = 0.1
    blowup_threshold: float = 1e3
    family: str = "gaussian"
    ic_params: dict[str, float | str] = field(default_factory=dict)
    seed: int = 0
    output_dir: str = "run_output"
    params: dict[str, str] = field(default_factory=dict)  # scenario-specific knobs

    def param(self, key: str, default):
        raw = self.params.get(key)
        if raw is None:
            return default
        if isinstance(default, bool):
            return raw.strip().lower() in ("1", "true", "yes", "on")
        if isinstance(default, int):
            return int(raw)
        if isinstance(default, float):
            return float(raw)
        return raw

    def float_list(self, key: str, default: list[float]) -> list[float]:
        raw = self.params.get(key)
        if raw is None:
            return default
        return [float(tok) for tok in raw.replace(",", " ").split()]


class ConfigError(ValueError):
    pass


def parse_config(path: str | Path) -> ExperimentSpec:
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise ConfigError(f"config file not found: {path}")
    try:
        scenario = parser.get("experiment", "scenario")
    except (configparser.NoSectionError, configparser.NoOptionError) as err:
        raise ConfigError(f"config must set [experiment] scenario: {err}") from err
    if scenario not in SCENARIOS:
        raise ConfigError(
            f"unknown scenario '{scenario}'; expected one of {sorted(SCENARIOS)}"
        )
    spec = ExperimentSpec(scenario=scenario)
    spec.seed = parser.getint("experiment", "seed", fallback=spec.seed)
    spec.output_dir = parser.get("experiment", "output_dir", fallback=spec.output_dir)
    if parser.has_section("grid"):
        spec.n = parser.getint("grid", "n", fallback=spec.n)
        spec.length = parser.getfloat("grid", "length", fallback=spec.length)
    if parser.has_section("sim"):
        spec.model = parser.get("sim", "model", fallback=spec.model)
        spec.dt = parser.getfloat("sim", "dt", fallback=spec.dt)
        spec.t_end = parser.getfloat("sim", "t_end", fallback=spec.t_end)
        spec.sample_every = parser.getint("sim", "sample_every", fallback=spec.sample_every)
        spec.eps = parser.getfloat("sim", "eps", fallback=spec.eps)
        spec.blowup_threshold = parser.getfloat(
            "sim", "blowup_threshold", fallback=spec.blowup_threshold
        )
    if parser.has_section("initial"):
        spec.family = parser.get("initial", "family", fallback=spec.family)
        spec.ic_params = {
            k: v for k, v in parser.items("initial") if k != "family"
        }
    section = f"scenario.{scenario}"
    if parser.has_section(section):
        spec.params = dict(parser.items(section))
    _validate_spec(spec)
    return spec


def _validate_spec(spec: ExperimentSpec) -> None:
    if spec.n % 2 != 0 or spec.n < 8:
        raise ConfigError(
            f"precondition violated: grid n must be even and >= 8, got n={spec.n}"
        )
    if not spec.length > 0:
        raise ConfigError(
            f"precondition violated: grid length must be positive, got {spec.length}"
        )
    if not 0 < spec.dt < spec.t_end:
        raise ConfigError(
            f"precondition violated: need 0 < dt < t_end, got dt={spec.dt}, t_end={spec.t_end}"
        )
    if spec.sample_every < 1:
        raise ConfigError("precondition violated: sample_every must be >= 1")
    valid_models = {m.value for m in Model} | {"all"}
    if spec.model not in valid_models:
        raise ConfigError(
            f"precondition violated: unknown model '{spec.model}', expected {sorted(valid_models)}"
        )
    if spec.family not in ("gaussian", "sine", "rest", "custom"):
        raise ConfigError(
            f"precondition violated: unknown initial-condition family '{spec.family}'"
        )


def build_initial_state(spec: ExperimentSpec, model: Model, grid: Grid) -> State:
    """Initial (u, second-channel) state for a model; eta models get eta, H models get H."""
    x = grid.nodes
    p = spec.ic_params
    eta_based = model in ETA_MODELS
    if spec.family == "rest":
        u = np.zeros(grid.n)
        profile = np.zeros(grid.n)
        u_amp = h_amp = 0.0
    elif spec.family == "gaussian":
        center = float(p.get("center", spec.length / 2))
        width = float(p.get("width", 1.0))
        profile = np.exp(-(((x - center) / width) ** 2))
        u_amp = float(p.get("u_amp", 0.3))
        h_amp = float(p.get("h_amp", 0.1))
        u = u_amp * profile
    elif spec.family == "sine":
        mode = int(float(p.get("mode", 1)))
        profile = np.sin(2 * np.pi * mode * x / spec.length)
        u_amp = float(p.get("u_amp", 0.1))
        h_amp = float(p.get("h_amp", 0.05))
        u = u_amp * profile
    elif spec.family == "custom":
        path = p.get("file")
        if not path:
            raise ConfigError("custom initial condition requires file = <samples.npz>")
        data = np.load(str(path))
        u = np.asarray(data["u"], dtype=float)
        second = np.asarray(data["H"], dtype=float)
        return State(Field(u, grid), Field(second, grid), 0.0)
    else:  # pragma: no cover - guarded by _validate_spec
        raise ConfigError(f"unknown family {spec.family}")
    if model is Model.CH_REDUCTION:
        second = np.zeros(grid.n)
    elif eta_based:
        second = h_amp * profile
    else:
        second = 1.0 + h_amp * profile
    return State(Field(u, grid), Field(second, grid), 0.0)


def _surface_trajectory(traj: Trajectory) -> list[State]:
    """Snapshot states with the second channel expressed as H for CSV output."""
    if traj.config.model in ETA_MODELS:
        eps = traj.config.eps
        return [
            State(s.u, Field(1.0 + eps * s.H.values, s.grid), s.t) for s in traj.states
        ]
    return traj.states


# --- output writers -------------------------------------------------------


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def write_diagnostics_csv(records: list[DiagnosticsRecord], path: Path) -> None:
    lines = [CSV_HEADER]
    for rec in records:
        lines.append(",".join(_fmt(v) for v in rec.as_tuple()))
    path.write_text("\n".join(lines) + "\n")


def write_snapshots_csv(states: list[State], path: Path) -> None:
    lines = ["x,t,u,H"]
    for s in states:
        x = s.grid.nodes
        for i in range(s.grid.n):
            lines.append(
                f"{_fmt(x[i])},{_fmt(s.t)},{_fmt(s.u.values[i])},{_fmt(s.H.values[i])}"
            )
    path.write_text("\n".join(lines) + "\n")


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (Model, Sign, Status)):
        return obj.value if not isinstance(obj, Sign) else obj.name.lower()
    raise TypeError(f"not JSON serializable: {type(obj)}")


# --- scenario runners -----------------------------------------------------


@dataclass
class ScenarioResult:
    passed: bool
    metrics: dict
    failure_reason: str | None = None
    trajectory: Trajectory | None = None


def _drift_metrics(traj: Trajectory) -> dict:
    drifts = drift_report(traj.diagnostics)
    u0, uT = traj.states[0], traj.states[-1]
    return {
        "status": traj.status.value,
        "field_drift_u": float(np.max(np.abs(uT.u.values - u0.u.values))),
        "field_drift_H": float(np.max(np.abs(uT.H.values - u0.H.values))),
        "drifts": {
            name: {"max_abs": d.max_abs, "max_rel": d.max_rel}
            for name, d in drifts.items()
        },
    }


def run_conservation(spec: ExperimentSpec) -> ScenarioResult:
    models = (
        [Model(spec.model)] if spec.model != "all" else list(Model)
    )
    mass_tol = spec.param("mass_tol", 1e-12)
    momentum_tol = spec.param("momentum_tol", 1e-10)
    energy_tol = spec.param("energy_tol", 1e-8)
    rest_tol = spec.param("rest_tol", 1e-13)
    negative_min = spec.param("negative_control_min", 1e-4)
    check_negative = spec.param("check_negative_control", spec.family != "rest")
    # The minus-sign flow can break in finite time (its rest state is linearly
    # unstable); with allow_breaking the drift checks cover the smooth window
    # up to the honestly reported termination.
    allow_breaking = spec.param("allow_breaking", False)

    per_model: dict[str, dict] = {}
    passed = True
    reasons = []
    representative = None
    for model in models:
        grid = make_grid(spec.n, spec.length)
        initial = build_initial_state(spec, model, grid)
        cfg = SimConfig(
            dt=spec.dt,
            t_end=spec.t_end,
            sample_every=spec.sample_every,
            model=model,
            eps=spec.eps,
            blowup_threshold=spec.blowup_threshold,
        )
        traj = simulate(initial, cfg)
        metrics = _drift_metrics(traj)
        metrics["boundary_support_u"] = boundary_support(initial.u)
        per_model[model.value] = metrics
        if representative is None or model.value == spec.model:
            representative = traj
        if traj.status is not Status.COMPLETED and not (
            allow_breaking and traj.status is Status.BREAKING_SUSPECTED
        ):
            passed = False
            reasons.append(f"{model.value}: run ended with status {traj.status.value}")
            continue
        drifts = metrics["drifts"]
        if spec.family == "rest":
            worst = max(
                max(d["max_abs"] for d in drifts.values()),
                metrics["field_drift_u"],
                metrics["field_drift_H"],
            )
            metrics["worst_drift"] = worst
            if worst >= rest_tol:
                passed = False
                reasons.append(f"{model.value}: rest-state drift {worst:.3e} >= {rest_tol}")
            continue
        checks = {
            "mass": (drifts["mass"]["max_rel"], mass_tol),
            "momentum": (drifts["momentum"]["max_rel"], momentum_tol),
        }
        sign = _MODEL_SIGNS.get(model)
        if sign is Sign.PLUS:
            checks["energy_plus"] = (drifts["energy_plus"]["max_rel"], energy_tol)
        elif sign is Sign.MINUS:
            checks["energy_minus"] = (drifts["energy_minus"]["max_rel"], energy_tol)
        for name, (value, tol) in checks.items():
            if value >= tol:
                passed = False
                reasons.append(f"{model.value}: {name} drift {value:.3e} >= {tol}")
        if check_negative and sign is not None:
            other = "energy_minus" if sign is Sign.PLUS else "energy_plus"
            if drifts[other]["max_rel"] <= negative_min:
                passed = False
                reasons.append(
                    f"{model.value}: negative control {other} drift "
                    f"{drifts[other]['max_rel']:.3e} <= {negative_min}"
                )
    return ScenarioResult(
        passed=passed,
        metrics={"models": per_model},
        failure_reason="; ".join(reasons) or None,
        trajectory=representative,
    )


def run_convergence(spec: ExperimentSpec) -> ScenarioResult:
    model = Model(spec.model)
    grid = make_grid(spec.n, spec.length)
    initial = build_initial_state(spec, model, grid)
    cfg = SimConfig(
        dt=spec.dt,
        t_end=spec.t_end,
        sample_every=spec.sample_every,
        model=model,
        eps=spec.eps,
        blowup_threshold=spec.blowup_threshold,
    )
    refinements = spec.param("refinements", 4)
    target = spec.param("target_order", 4.0)
    tol = spec.param("order_tol", 0.2)
    study = convergence_study(initial, cfg, refinements)
    traj = simulate(initial, cfg)
    metrics = {
        "pairs": [[dt, err] for dt, err in study.pairs],
        "order": study.order,
        "label": study.label,
        "target_order": target,
        "order_tol": tol,
    }
    if study.degenerate:
        return ScenarioResult(
            passed=False,
            metrics=metrics,
            failure_reason="degenerate errors: initial data does not exercise the integrator",
            trajectory=traj,
        )
    passed = abs(study.order - target) <= tol
    reason = None if passed else (
        f"fitted order {study.order:.3f} outside {target} +/- {tol}"
    )
    return ScenarioResult(passed=passed, metrics=metrics, failure_reason=reason, trajectory=traj)


def run_linear_limit(spec: ExperimentSpec) -> ScenarioResult:
    eps_list = spec.float_list("eps_list", [0.1, 0.05, 0.025])
    slope_target = spec.param("slope_target", 1.0)
    slope_tol = spec.param("slope_tol", 0.3)
    ratio_min = spec.param("improvement_min", 3.0)
    grid = make_grid(spec.n, spec.length)
    x = grid.nodes
    center = float(spec.ic_params.get("center", 20.0))
    eta0 = np.exp(-((x - center) ** 2))
    errors = []
    representative = None
    for eps in sorted(eps_list, reverse=True):
        initial = State(
            Field(eps * eta0, grid), Field(1.0 + eps * eta0, grid), 0.0
        )  # right-mover: u = eps*eta
        cfg = SimConfig(
            dt=spec.dt,
            t_end=spec.t_end,
            sample_every=spec.sample_every,
            model=Model.SWE,
            eps=eps,
            blowup_threshold=spec.blowup_threshold,
        )
        traj = simulate(initial, cfg)
        representative = traj
        if traj.status is not Status.COMPLETED:
            return ScenarioResult(
                False,
                {"eps": eps},
                f"shallow-water run at eps={eps} ended {traj.status.value}",
                traj,
            )
        final = traj.states[-1]
        eta_num = (final.H.values - 1.0) / eps
        eta_exact = np.exp(-((x - final.t - center) ** 2))
        errors.append(float(np.max(np.abs(eta_num - eta_exact))))
    eps_sorted = sorted(eps_list, reverse=True)
    slope = float(np.polyfit(np.log(eps_sorted), np.log(errors), 1)[0])
    improvement = errors[0] / errors[-1]
    metrics = {
        "eps": eps_sorted,
        "errors": errors,
        "slope": slope,
        "improvement_largest_over_smallest": improvement,
    }
    reasons = []
    if abs(slope - slope_target) > slope_tol:
        reasons.append(f"slope {slope:.3f} outside {slope_target} +/- {slope_tol}")
    if improvement < ratio_min:
        reasons.append(
            f"error at eps={eps_sorted[-1]} only {improvement:.2f}x smaller than at eps={eps_sorted[0]}"
        )
    return ScenarioResult(
        passed=not reasons,
        metrics=metrics,
        failure_reason="; ".join(reasons) or None,
        trajectory=representative,
    )


def _perturbation_kwargs(spec: ExperimentSpec) -> dict:
    # Center the off-solution bump where the wave will be mid-run (unit
    # nondimensional speed), unless the config pins it.
    ic_center = float(spec.ic_params.get("center", spec.length / 2))
    return {
        "perturbation_amplitude": spec.param("perturbation_amplitude", 0.2),
        "perturbation_center": spec.param(
            "perturbation_center", ic_center + spec.t_end / 2
        ),
        "perturbation_width": spec.param("perturbation_width", 3.0),
    }


def _stationarity_config(spec: ExperimentSpec, model: Model) -> SimConfig:
    slices = spec.param("slices", 200)
    total_steps = int(round(spec.t_end / spec.dt))
    sample_every = max(1, total_steps // slices)
    return SimConfig(
        dt=spec.dt,
        t_end=spec.t_end,
        sample_every=sample_every,
        model=model,
        eps=spec.eps,
        blowup_threshold=spec.blowup_threshold,
        snapshot_every=sample_every,
    )


def run_variational_stationarity(spec: ExperimentSpec) -> ScenarioResult:
    model = Model(spec.model)
    if model not in _MODEL_SIGNS:
        raise ConfigError(
            "precondition violated: variational_stationarity requires a twoch_plus or "
            "twoch_minus model"
        )
    variant = _MODEL_SIGNS[model]
    trials = spec.param("trials", 10)
    separation_max = spec.param("separation_max", 1e-2)
    match_tol = spec.param("residual_match_tol", 1e-3)
    grid = make_grid(spec.n, spec.length)
    initial = build_initial_state(spec, model, grid)
    traj = simulate(initial, _stationarity_config(spec, model))
    if traj.status is not Status.COMPLETED:
        return ScenarioResult(False, {}, f"trajectory ended {traj.status.value}", traj)
    report = stationarity_test(
        traj, variant, trials=trials, seed=spec.seed, **_perturbation_kwargs(spec)
    )
    metrics = {
        "variant": variant.name.lower(),
        "solution_max": report.solution_max,
        "perturbed_max": report.perturbed_max,
        "separation_ratio": report.separation_ratio,
        "residual_match_rel_err": report.residual_match_rel_err,
    }
    reasons = []
    if report.separation_ratio > separation_max:
        reasons.append(
            f"separation ratio {report.separation_ratio:.3e} > {separation_max}"
        )
    if report.residual_match_rel_err > match_tol:
        reasons.append(
            f"residual match {report.residual_match_rel_err:.3e} > {match_tol}"
        )
    return ScenarioResult(
        passed=not reasons,
        metrics=metrics,
        failure_reason="; ".join(reasons) or None,
        trajectory=traj,
    )


def run_sign_crossover(spec: ExperimentSpec) -> ScenarioResult:
    trials = spec.param("trials", 5)
    separation_max = spec.param("separation_max", 1e-2)
    grid = make_grid(spec.n, spec.length)
    metrics = {}
    reasons = []
    representative = None
    pairings = [
        (Model.TWOCH_MINUS, Sign.PLUS),
        (Model.TWOCH_PLUS, Sign.MINUS),
    ]
    for model, variant in pairings:
        initial = build_initial_state(spec, model, grid)
        traj = simulate(initial, _stationarity_config(spec, model))
        representative = traj
        if traj.status is not Status.COMPLETED:
            return ScenarioResult(False, {}, f"trajectory ended {traj.status.value}", traj)
        report = stationarity_test(
            traj, variant, trials=trials, seed=spec.seed, **_perturbation_kwargs(spec)
        )
        key = f"{variant.name.lower()}_action_on_{model.value}"
        metrics[key] = {
            "separation_ratio": report.separation_ratio,
            "solution_max": report.solution_max,
            "perturbed_max": report.perturbed_max,
        }
        if report.separation_ratio <= separation_max:
            reasons.append(
                f"{key}: mismatched pairing still separates "
                f"({report.separation_ratio:.3e} <= {separation_max})"
            )
    return ScenarioResult(
        passed=not reasons,
        metrics=metrics,
        failure_reason="; ".join(reasons) or None,
        trajectory=representative,
    )


def _single_ch_tendency(u: np.ndarray, length: float) -> np.ndarray:
    """Single-component Camassa-Holm u_t, written directly against numpy FFTs.

    Independent of the grid module on purpose: this is the reference the H=0
    reduction is compared against.
    """
    n = u.size
    k = 2.0 * np.pi * np.fft.rfftfreq(n, d=length / n)
    spec = np.fft.rfft(u)
    kmax = k[-1]
    mask = np.abs(k) <= (2.0 / 3.0) * kmax

    def deriv(s, order):
        mult = (1j * k) ** order
        if order % 2 == 1:
            mult = mult.copy()
            mult[-1] = 0.0
        return np.fft.irfft(s * mult, n=n)

    uf = np.fft.irfft(spec * mask, n=n)
    ux = deriv(spec * mask, 1)
    uxx = deriv(spec * mask, 2)
    uxxx = deriv(spec * mask, 3)
    bracket = -3.0 * uf * ux + 2.0 * ux * uxx + uf * uxxx
    bspec = np.fft.rfft(bracket) * mask
    return np.fft.irfft(bspec / (1.0 + k**2), n=n)


def run_ch_reduction(spec: ExperimentSpec) -> ScenarioResult:
    from .models import ch_reduction_check

    tol = spec.param("tolerance", 1e-12)
    n_states = spec.param("n_states", 10)
    grid = make_grid(spec.n, spec.length)
    rng = np.random.default_rng(spec.seed)
    x = grid.nodes
    states = [build_initial_state(spec, Model.CH_REDUCTION, grid)]
    for _ in range(n_states - 1):
        center = rng.uniform(0.3, 0.7) * spec.length
        width = rng.uniform(1.0, 3.0)
        amp = rng.uniform(0.05, 0.5)
        u = amp / np.cosh((x - center) / width)
        states.append(State(Field(u, grid), Field(np.zeros(grid.n), grid), 0.0))
    max_sign_diff = 0.0
    max_oracle_diff = 0.0
    for s in states:
        du_plus, dH_plus = ch_reduction_check(s, Sign.PLUS)
        du_minus, dH_minus = ch_reduction_check(s, Sign.MINUS)
        max_sign_diff = max(
            max_sign_diff, float(np.max(np.abs(du_plus.values - du_minus.values)))
        )
        if np.any(dH_plus.values != 0.0) or np.any(dH_minus.values != 0.0):
            return ScenarioResult(False, {}, "H tendency not identically zero", None)
        oracle = _single_ch_tendency(s.u.values, spec.length)
        max_oracle_diff = max(
            max_oracle_diff, float(np.max(np.abs(du_plus.values - oracle)))
        )
    metrics = {
        "max_plus_minus_diff": max_sign_diff,
        "max_single_ch_diff": max_oracle_diff,
        "n_states": len(states),
    }
    reasons = []
    if max_sign_diff != 0.0:
        reasons.append(f"plus/minus tendencies differ by {max_sign_diff:.3e}")
    if max_oracle_diff > tol:
        reasons.append(f"single-component mismatch {max_oracle_diff:.3e} > {tol}")
    return ScenarioResult(
        passed=not reasons,
        metrics=metrics,
        failure_reason="; ".join(reasons) or None,
    )


def run_swe_comparison(spec: ExperimentSpec) -> ScenarioResult:
    tol = spec.param("tolerance", 1e-6)
    grid = make_grid(spec.n, spec.length)
    initial = build_initial_state(spec, Model.SWE, grid)
    cfg = SimConfig(
        dt=spec.dt,
        t_end=spec.t_end,
        sample_every=spec.sample_every,
        model=Model.SWE,
        eps=spec.eps,
        blowup_threshold=spec.blowup_threshold,
    )
    traj = simulate(initial, cfg)
    if traj.status is not Status.COMPLETED:
        return ScenarioResult(False, {}, f"run ended {traj.status.value}", traj)
    worst = 0.0
    for s in traj.states:
        v_surf, _ = reconstruct_diagnostics(s, spec.eps, z=s.H.values)
        _, dH = swe_rhs(s)
        Hx = grid.deriv_values(s.H.values, 1)
        kinematic = dH.values + s.u.values * Hx  # eps*(eta_t + u eta_x)
        worst = max(worst, float(np.max(np.abs(v_surf.values - kinematic))))
    metrics = {"max_surface_mismatch": worst, "samples": len(traj.states)}
    passed = worst <= tol
    return ScenarioResult(
        passed=passed,
        metrics=metrics,
        failure_reason=None if passed else f"surface mismatch {worst:.3e} > {tol}",
        trajectory=traj,
    )


def run_custom(spec: ExperimentSpec) -> ScenarioResult:
    check = spec.param("check", "free_run")
    if check == "free_run":
        model = Model(spec.model)
        grid = make_grid(spec.n, spec.length)
        initial = build_initial_state(spec, model, grid)
        cfg = SimConfig(
            dt=spec.dt,
            t_end=spec.t_end,
            sample_every=spec.sample_every,
            model=model,
            eps=spec.eps,
            blowup_threshold=spec.blowup_threshold,
        )
        traj = simulate(initial, cfg)
        metrics = _drift_metrics(traj)
        passed = traj.status is Status.COMPLETED
        return ScenarioResult(
            passed=passed,
            metrics=metrics,
            failure_reason=None if passed else f"run ended {traj.status.value}",
            trajectory=traj,
        )
    if check == "formulation_equivalence":
        return _check_formulation_equivalence(spec)
    if check == "eps_truncation":
        return _check_eps_truncation(spec)
    if check == "subgroup_invariance":
        return _check_subgroup_invariance(spec)
    raise ConfigError(f"precondition violated: unknown custom check '{check}'")


def _random_smooth_state(grid: Grid, rng: np.random.Generator) -> State:
    x = grid.nodes
    u = np.zeros(grid.n)
    h = np.zeros(grid.n)
    for m in range(1, 9):
        au, bu, ah, bh = rng.normal(0.0, 1.0 / m**2, size=4)
        u += 0.2 * (au * np.cos(2 * np.pi * m * x / grid.length)
                    + bu * np.sin(2 * np.pi * m * x / grid.length))
        h += 0.1 * (ah * np.cos(2 * np.pi * m * x / grid.length)
                    + bh * np.sin(2 * np.pi * m * x / grid.length))
    return State(Field(u, grid), Field(1.0 + h, grid), 0.0)


def _check_formulation_equivalence(spec: ExperimentSpec) -> ScenarioResult:
    from .models import to_momentum, twoch_rhs_momentum

    tol = spec.param("tolerance", 1e-9)
    n_states = spec.param("n_states", 100)
    grid = make_grid(spec.n, spec.length)
    rng = np.random.default_rng(spec.seed)
    worst = 0.0
    for _ in range(n_states):
        s = _random_smooth_state(grid, rng)
        sign = Sign.PLUS if rng.uniform() < 0.5 else Sign.MINUS
        du, _ = twoch_rhs(s, sign)
        dm, _ = twoch_rhs_momentum(to_momentum(s), sign)
        lhs = du.values - grid.deriv_values(du.values, 2)
        rel = float(np.max(np.abs(lhs - dm.values)) / np.max(np.abs(dm.values)))
        worst = max(worst, rel)
    metrics = {"max_rel_difference": worst, "n_states": n_states}
    passed = worst <= tol
    return ScenarioResult(
        passed=passed,
        metrics=metrics,
        failure_reason=None if passed else f"formulation mismatch {worst:.3e} > {tol}",
    )


def _check_eps_truncation(spec: ExperimentSpec) -> ScenarioResult:
    from .functionals import kinetic_approx, kinetic_exact

    eps_list = spec.float_list("eps_list", [0.2, 0.1, 0.05])
    slope_min = spec.param("slope_min", 2.7)
    grid = make_grid(spec.n, spec.length)
    x = grid.nodes
    center = float(spec.ic_params.get("center", spec.length / 2))
    width = float(spec.ic_params.get("width", 2.0))
    f = np.exp(-(((x - center) / width) ** 2))
    gaps = []
    for eps in eps_list:
        s = State(Field(eps * f, grid), Field(1.0 + eps * f, grid), 0.0)
        gaps.append(kinetic_exact(s, eps) - kinetic_approx(s))
    slope = float(np.polyfit(np.log(eps_list), np.log(np.abs(gaps)), 1)[0])
    metrics = {"eps": eps_list, "gaps": gaps, "slope": slope}
    passed = slope >= slope_min
    return ScenarioResult(
        passed=passed,
        metrics=metrics,
        failure_reason=None if passed else f"truncation slope {slope:.3f} < {slope_min}",
    )


def _check_subgroup_invariance(spec: ExperimentSpec) -> ScenarioResult:
    tol = spec.param("tolerance", 1e-8)
    n_paths = spec.param("n_paths", 5)
    slices = spec.param("slices", 40)
    shift = spec.param("shift", spec.length / 3.0)
    grid = make_grid(spec.n, spec.length)
    rng = np.random.default_rng(spec.seed)
    times = np.linspace(0.0, 1.0, slices + 1)
    psi = np.full(grid.n, shift)  # rigid label shift preserves H0 = 1
    worst = 0.0
    values = []
    for _ in range(n_paths):
        path = random_flow_path(grid, times, rng, amplitude=0.3)
        variant = Sign.PLUS if rng.uniform() < 0.5 else Sign.MINUS
        before, after = subgroup_invariance_check(path, psi, variant)
        rel = abs(after - before) / max(abs(before), 1e-30)
        worst = max(worst, rel)
        values.append({"before": before, "after": after, "rel_diff": rel})
    metrics = {"paths": values, "max_rel_diff": worst, "shift": shift}
    passed = worst <= tol
    return ScenarioResult(
        passed=passed,
        metrics=metrics,
        failure_reason=None if passed else f"action changed by {worst:.3e} > {tol}",
    )


RUNNERS = {
    "conservation": run_conservation,
    "convergence": run_convergence,
    "linear_limit": run_linear_limit,
    "variational_stationarity": run_variational_stationarity,
    "sign_crossover": run_sign_crossover,
    "ch_reduction": run_ch_reduction,
    "swe_comparison": run_swe_comparison,
    "custom": run_custom,
}


def run(spec: ExperimentSpec, output_dir: str | Path | None = None) -> int:
    """Execute a scenario and write the four output files; returns the exit status."""
    outdir = Path(output_dir or spec.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    start = time.perf_counter()
    result = RUNNERS[spec.scenario](spec)
    elapsed = time.perf_counter() - start

    if result.trajectory is not None:
        write_diagnostics_csv(result.trajectory.diagnostics, outdir / "diagnostics.csv")
        write_snapshots_csv(
            _surface_trajectory(result.trajectory), outdir / "snapshots.csv"
        )
    else:
        (outdir / "diagnostics.csv").write_text(CSV_HEADER + "\n")
        (outdir / "snapshots.csv").write_text("x,t,u,H\n")

    meta = {
        "version": __version__,
        "spec": dataclasses.asdict(spec),
        "grid": {"n": spec.n, "length": spec.length, "spacing": spec.length / spec.n},
        "elapsed_seconds": elapsed,
    }
    (outdir / "run_meta.json").write_text(json.dumps(meta, indent=2, default=_json_default) + "\n")
    report = {
        "scenario": spec.scenario,
        "passed": result.passed,
        "failure_reason": result.failure_reason,
        "metrics": result.metrics,
    }
    (outdir / "report.json").write_text(json.dumps(report, indent=2, default=_json_default) + "\n")
    return 0 if result.passed else 1


def list_scenarios() -> str:
    """Stable text table of scenarios, the claim each checks, and key defaults."""
    defaults = {
        "conservation": "model=twoch_plus t_end=10 tolerances: mass 1e-12, momentum 1e-10, energy 1e-8",
        "convergence": "refinements=4 target_order=4.0 order_tol=0.2",
        "linear_limit": "eps_list=0.1,0.05,0.025 t_end=5 slope 1.0 +/- 0.3",
        "variational_stationarity": "trials=10 slices=200 separation_max=1e-2 residual_match_tol=1e-3",
        "sign_crossover": "trials=5 slices=200 separation_max=1e-2",
        "ch_reduction": "n_states=10 tolerance=1e-12",
        "swe_comparison": "eps=0.1 tolerance=1e-6",
        "custom": "check=free_run|formulation_equivalence|eps_truncation|subgroup_invariance",
    }
    width = max(len(name) for name in SCENARIOS)
    lines = []
    for name in SCENARIOS:
        lines.append(f"{name:<{width}}  {SCENARIOS[name]}")
        lines.append(f"{'':<{width}}  defaults: {defaults[name]}")
    return "\n".join(lines)


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="twochlab",
        description="Two-component Camassa-Holm shallow water laboratory",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    runp = sub.add_parser("run", help="run a scenario from a config file")
    runp.add_argument("--config", required=True, help="plain-text config file")
    runp.add_argument("--output", default=None, help="output directory override")
    runp.add_argument("--seed", type=int, default=None, help="seed override")
    sub.add_parser("list-scenarios", help="describe the available scenarios")
    args = parser.parse_args(argv)

    if args.command == "list-scenarios":
        print(list_scenarios())
        return 0
    try:
        spec = parse_config(args.config)
        if args.seed is not None:
            spec.seed = args.seed
    except ConfigError as err:
        print(f"config error: {err}")
        return 2
    return run(spec, output_dir=args.output)


if __name__ == "__main__":
    raise SystemExit(main())
