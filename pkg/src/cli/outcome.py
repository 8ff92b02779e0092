"""Gemeinsames Ergebnisformat der Kommandos."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from src.models import StageStatus

EXIT_PASS = 0
EXIT_CHECK_FAILED = 1
EXIT_INPUT_ERROR = 2


@dataclass(frozen=True)
class CommandOutcome:
    """JSON-Bericht, Exitcode und menschenlesbare Kurzfassung eines Kommandos."""

    report: dict[str, Any]
    exit_code: int
    summary: str = ""
    failures: list[str] = field(default_factory=list)

    @property
    def status(self) -> StageStatus:
        return StageStatus.PASS if self.exit_code == EXIT_PASS else StageStatus.FAIL


def check_entry(value: float, threshold: float) -> dict[str, Any]:
    """Residuum mit Schwelle und Urteil (value ≤ threshold)."""
    return {"value": float(value), "threshold": float(threshold), "passed": bool(value <= threshold)}


def failed_checks(checks: dict[str, dict[str, Any]]) -> list[str]:
    return [name for name, entry in checks.items() if not entry.get("passed", True)]


def encode_complex(value: complex) -> list[float]:
    value = complex(value)
    return [float(value.real), float(value.imag)]


def encode_matrix(matrix: np.ndarray) -> list[list[list[float]]]:
    return [[encode_complex(v) for v in row] for row in np.atleast_2d(matrix)]


def outcome_from_checks(report: dict[str, Any], checks: dict[str, dict[str, Any]], summary: str) -> CommandOutcome:
    """Setzt ``checks`` in den Bericht und leitet den Exitcode ab."""
    failures = failed_checks(checks)
    report = {**report, "checks": checks, "failed": failures}
    return CommandOutcome(
        report=report,
        exit_code=EXIT_CHECK_FAILED if failures else EXIT_PASS,
        summary=summary if not failures else f"{summary}; failed: {', '.join(failures)}",
        failures=failures,
    )
