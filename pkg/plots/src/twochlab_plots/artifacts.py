"""Loading and validation of twochlab run artifacts.

A run directory holds four files (the contract of `twochlab run`):
run_meta.json, diagnostics.csv, snapshots.csv, report.json. The loaders here
parse them strictly: headers must match the published schema exactly and
every value must be a finite float, with errors that name the offending row.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

DIAGNOSTICS_HEADER = (
    "t,mass,momentum,energy_plus,energy_minus,kinetic_exact,kinetic_approx,"
    "potential,lagrangian,metric"
)
SNAPSHOTS_HEADER = "x,t,u,H"


class ArtifactError(ValueError):
    """A run artifact is missing or does not match its schema."""


@dataclass(frozen=True)
class RunArtifacts:
    """Paths to the four files produced by one run."""

    run_meta: Path
    diagnostics: Path
    snapshots: Path
    report: Path

    @classmethod
    def from_dir(cls, run_dir: str | Path) -> "RunArtifacts":
        run_dir = Path(run_dir)
        art = cls(
            run_meta=run_dir / "run_meta.json",
            diagnostics=run_dir / "diagnostics.csv",
            snapshots=run_dir / "snapshots.csv",
            report=run_dir / "report.json",
        )
        missing = [p.name for p in (art.run_meta, art.diagnostics, art.snapshots, art.report)
                   if not p.exists()]
        if missing:
            raise ArtifactError(f"run directory {run_dir} is missing {missing}")
        return art


def _parse_csv(path: Path, expected_header: str) -> dict[str, np.ndarray]:
    lines = Path(path).read_text().splitlines()
    if not lines:
        raise ArtifactError(f"{path}: empty file")
    header = lines[0].strip()
    if header != expected_header:
        raise ArtifactError(
            f"{path}: header {header!r} does not match the contract {expected_header!r}"
        )
    names = expected_header.split(",")
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        tokens = line.split(",")
        if len(tokens) != len(names):
            raise ArtifactError(
                f"{path}: row {lineno} has {len(tokens)} fields, expected {len(names)}"
            )
        try:
            values = [float(tok) for tok in tokens]
        except ValueError as err:
            raise ArtifactError(f"{path}: row {lineno} does not parse: {err}") from err
        if not all(np.isfinite(values)):
            raise ArtifactError(f"{path}: row {lineno} contains non-finite values")
        rows.append(values)
    table = np.array(rows).reshape(len(rows), len(names))
    return {name: table[:, i] for i, name in enumerate(names)}


def load_diagnostics(path: str | Path) -> dict[str, np.ndarray]:
    """Diagnostics table as column arrays; raises ArtifactError on any schema violation."""
    return _parse_csv(Path(path), DIAGNOSTICS_HEADER)


def load_snapshots(path: str | Path) -> dict[str, np.ndarray]:
    """Long-format snapshot table (x, t, u, H) as column arrays."""
    return _parse_csv(Path(path), SNAPSHOTS_HEADER)


def load_report(path: str | Path) -> dict:
    try:
        report = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as err:
        raise ArtifactError(f"{path}: cannot read report: {err}") from err
    if "scenario" not in report or "metrics" not in report:
        raise ArtifactError(f"{path}: report lacks scenario/metrics fields")
    return report


def load_meta(path: str | Path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as err:
        raise ArtifactError(f"{path}: cannot read run meta: {err}") from err


def snapshot_grids(snapshots: dict[str, np.ndarray]):
    """Reshape long-format snapshots into (t, x, U, H) space-time arrays."""
    x = np.unique(snapshots["x"])
    t = np.unique(snapshots["t"])
    if x.size * t.size != snapshots["x"].size:
        raise ArtifactError("snapshots do not form a full space-time grid")
    order = np.lexsort((snapshots["x"], snapshots["t"]))
    U = snapshots["u"][order].reshape(t.size, x.size)
    H = snapshots["H"][order].reshape(t.size, x.size)
    return t, x, U, H


def scaling_points(report: dict) -> list[tuple[float, float]]:
    """(x, y) sweep points contributed by one report, by scenario type.

    Convergence reports contribute their (dt, error) pairs; the eps-sweep
    scenarios contribute (eps, error) or (eps, gap) pairs. Other scenarios
    contribute nothing.
    """
    metrics = report.get("metrics", {})
    if "pairs" in metrics:
        return [(float(a), float(b)) for a, b in metrics["pairs"]]
    if "eps" in metrics and "errors" in metrics:
        return list(zip(map(float, metrics["eps"]), map(float, metrics["errors"])))
    if "eps" in metrics and "gaps" in metrics:
        return list(zip(map(float, metrics["eps"]), map(float, metrics["gaps"])))
    return []
