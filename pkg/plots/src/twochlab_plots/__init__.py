"""Figure generation for twochlab run artifacts."""

from .artifacts import (
    ArtifactError,
    RunArtifacts,
    load_diagnostics,
    load_meta,
    load_report,
    load_snapshots,
)
from .figures import plot_drift, plot_fields, plot_scalings

__version__ = "0.1.0"
