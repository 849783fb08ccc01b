"""Verification reports and their JSON serialization."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from typing import Callable, Optional, Sequence

import numpy as np

__all__ = ["VerificationReport", "grid_check", "report_schema", "validate_report"]


@dataclass
class VerificationReport:
    """Outcome of one identity check over an evaluation grid.

    ``grid_max_abs`` is the maximum discrepancy in the report metric
    (absolute exponent difference for quadrature checks, z-score for
    Monte Carlo checks).
    """

    identity: str
    grid_max_abs: float
    passed: bool
    beta: Optional[float] = None
    tolerance: Optional[float] = None
    metric: str = "abs_diff"
    points: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "identity": self.identity,
            "beta": self.beta,
            "grid_max_abs": float(self.grid_max_abs),
            "pass": bool(self.passed),
            "tolerance": self.tolerance,
            "metric": self.metric,
            "points": self.points,
            "notes": list(self.notes),
            "extra": self.extra,
        }

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        beta = f" beta={self.beta:g}" if self.beta is not None else ""
        return (
            f"[{status}] {self.identity}{beta}: max {self.metric} = "
            f"{self.grid_max_abs:.3e} (tol {self.tolerance})"
        )


def grid_check(
    identity: str,
    lhs: Callable[[np.ndarray], complex],
    rhs: Callable[[np.ndarray], complex],
    grid: Sequence[np.ndarray],
    tol: float,
    beta: Optional[float] = None,
    notes: Sequence[str] = (),
) -> VerificationReport:
    """Compare two exponent evaluators pointwise over a grid."""
    points = []
    worst = 0.0
    for y in grid:
        y = np.atleast_1d(np.asarray(y, dtype=float))
        a = complex(lhs(y))
        b = complex(rhs(y))
        diff = abs(a - b)
        worst = max(worst, diff)
        points.append(
            {
                "y": [float(v) for v in y],
                "lhs": [a.real, a.imag],
                "rhs": [b.real, b.imag],
                "abs_diff": diff,
            }
        )
    return VerificationReport(
        identity=identity,
        grid_max_abs=worst,
        passed=worst < tol,
        beta=beta,
        tolerance=tol,
        metric="abs_diff",
        points=points,
        notes=list(notes),
    )


def report_schema() -> dict:
    """The JSON schema every emitted report must validate against."""
    text = resources.files("idcalc").joinpath("report.schema.json").read_text("utf-8")
    return json.loads(text)


def validate_report(doc: dict) -> None:
    """Raise ``jsonschema.ValidationError`` when a report is malformed."""
    import jsonschema

    jsonschema.validate(doc, report_schema())
