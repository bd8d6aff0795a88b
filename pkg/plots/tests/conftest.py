import json

import numpy as np
import pytest

from twochlab_plots.artifacts import DIAGNOSTICS_HEADER, RunArtifacts


def fmt(v):
    return format(float(v), ".17g")


@pytest.fixture
def synthetic_run(tmp_path):
    """Small artifact set following the published file contracts."""
    rng = np.random.default_rng(0)
    t = np.linspace(0.0, 1.0, 6)
    x = np.linspace(0.0, 40.0, 16, endpoint=False)

    diag_rows = []
    for i, ti in enumerate(t):
        mass, momentum = 0.1772, 0.5317
        e_plus = 0.119
        e_minus = 0.106 + 1e-3 * i  # visible drift
        ke_exact, ke, pot = 0.1191, 0.1128, 0.0063
        diag_rows.append([ti, mass, momentum, e_plus, e_minus, ke_exact, ke, pot,
                          ke - pot, ke + pot])
    diag_lines = [DIAGNOSTICS_HEADER] + [
        ",".join(fmt(v) for v in row) for row in diag_rows
    ]
    (tmp_path / "diagnostics.csv").write_text("\n".join(diag_lines) + "\n")

    snap_lines = ["x,t,u,H"]
    for ti in t:
        u = 0.3 * np.exp(-((x - 20.0 - ti) ** 2))
        H = 1.0 + 0.1 * np.exp(-((x - 20.0 - ti) ** 2))
        for xi, ui, Hi in zip(x, u, H):
            snap_lines.append(f"{fmt(xi)},{fmt(ti)},{fmt(ui)},{fmt(Hi)}")
    (tmp_path / "snapshots.csv").write_text("\n".join(snap_lines) + "\n")

    (tmp_path / "run_meta.json").write_text(json.dumps({
        "version": "0.1.0",
        "grid": {"n": 16, "length": 40.0},
    }))
    (tmp_path / "report.json").write_text(json.dumps({
        "scenario": "conservation",
        "passed": True,
        "failure_reason": None,
        "metrics": {},
    }))
    return RunArtifacts.from_dir(tmp_path)


@pytest.fixture
def convergence_report(tmp_path):
    path = tmp_path / "conv_report.json"
    path.write_text(json.dumps({
        "scenario": "convergence",
        "passed": True,
        "failure_reason": None,
        "metrics": {"pairs": [[4e-3, 2.6e-8], [2e-3, 1.6e-9], [1e-3, 1.0e-10]],
                    "order": 4.0},
    }))
    return path
