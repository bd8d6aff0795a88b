"""Publication-style figures from twochlab run artifacts.

All figures are deterministic: fixed style, no timestamps, so re-rendering
the same inputs produces identical files. Nothing here feeds back into any
pass/fail logic; the numerical verdicts live in report.json.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .artifacts import (
    ArtifactError,
    RunArtifacts,
    load_diagnostics,
    load_report,
    load_snapshots,
    scaling_points,
    snapshot_grids,
)

DRIFT_QUANTITIES = ("mass", "momentum", "energy_plus", "energy_minus")
DRIFT_FLOOR = 1e-18

_STYLE = {
    "figure.figsize": (9.0, 4.0),
    "figure.dpi": 110,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "font.size": 9,
}


def _save(fig, out: str | Path) -> Path:
    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    metadata = {"Date": None} if out.suffix == ".svg" else None
    fig.savefig(out, metadata=metadata)
    plt.close(fig)
    return out


def plot_fields(run: RunArtifacts, out: str | Path) -> Path:
    """Two-panel space-time rendering of u and H from snapshots.csv."""
    t, x, U, H = snapshot_grids(load_snapshots(run.snapshots))
    with plt.rc_context(_STYLE):
        fig, axes = plt.subplots(1, 2, constrained_layout=True)
        for ax, Z, label in ((axes[0], U, "u"), (axes[1], H, "H")):
            mesh = ax.pcolormesh(x, t, Z, shading="nearest", cmap="RdBu_r")
            fig.colorbar(mesh, ax=ax, label=label)
            ax.set_xlabel("x")
            ax.set_ylabel("t")
            ax.set_title(f"{label}(x, t)")
        return _save(fig, out)


def plot_drift(run: RunArtifacts, out: str | Path) -> Path:
    """Log-scale drift curves |q(t) - q(0)| for the conserved quantities."""
    diag = load_diagnostics(run.diagnostics)
    if diag["t"].size < 2:
        raise ArtifactError(f"{run.diagnostics}: need at least two records to plot drift")
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots(constrained_layout=True)
        for name in DRIFT_QUANTITIES:
            drift = np.abs(diag[name] - diag[name][0])
            ax.semilogy(diag["t"], np.maximum(drift, DRIFT_FLOOR), label=name)
        ax.set_xlabel("t")
        ax.set_ylabel("absolute drift from initial value")
        ax.set_title("conserved-quantity drift")
        ax.legend()
        return _save(fig, out)


def plot_scalings(reports: list[str | Path], out: str | Path) -> Path:
    """Log-log sweep points pooled from scaling reports, with a fitted slope.

    Convergence reports contribute (dt, error) pairs, the eps sweeps
    contribute (eps, error/gap) pairs; at least three points are required.
    """
    points = []
    labels = []
    for path in reports:
        report = load_report(path)
        pts = scaling_points(report)
        points.extend(pts)
        if pts:
            labels.append(report["scenario"])
    if len(points) < 3:
        raise ArtifactError(
            f"need at least 3 scaling points to fit a slope, got {len(points)}"
        )
    xs = np.array([p[0] for p in points], dtype=float)
    ys = np.abs(np.array([p[1] for p in points], dtype=float))
    if np.any(xs <= 0) or np.any(ys <= 0):
        raise ArtifactError("scaling points must be positive for a log-log fit")
    slope = float(np.polyfit(np.log(xs), np.log(ys), 1)[0])
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots(constrained_layout=True)
        ax.loglog(xs, ys, "o")
        order = np.argsort(xs)
        ax.loglog(
            xs[order],
            np.exp(np.polyval(np.polyfit(np.log(xs), np.log(ys), 1), np.log(xs[order]))),
            "--",
            label=f"fitted slope {slope:.2f}",
        )
        ax.set_xlabel("sweep parameter")
        ax.set_ylabel("error")
        ax.set_title(", ".join(dict.fromkeys(labels)) or "scaling sweep")
        ax.legend()
        return _save(fig, out)
