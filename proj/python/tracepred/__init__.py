"""Predictive analysis of concurrent traces."""

from ._core import (
    BoundExceeded,
    TraceError,
    closure,
    deadlocks,
    predict_pattern,
    races,
    run_cli,
    well_formed_violation,
)

__all__ = [
    "BoundExceeded",
    "TraceError",
    "closure",
    "deadlocks",
    "predict_pattern",
    "races",
    "run_cli",
    "well_formed_violation",
]
