"""Kommando check-inner-toral: Zertifikat Z(𝔭) ⊂ 𝔻² ∪ 𝕋² ∪ 𝔼² und Quadratfreiheit."""

from __future__ import annotations

from src.cli.outcome import CommandOutcome, outcome_from_checks
from src.isopair_lab.poly2 import check_inner_toral, is_square_free
from src.models import BiPoly, RunConfig, Verdict
from src.utils import load_model


def inner_toral_stage(poly: BiPoly, config: RunConfig) -> CommandOutcome:
    tol = config.tolerances
    report = check_inner_toral(
        poly,
        boundary_samples=config.boundary_samples,
        interior_samples=config.interior_samples,
        tol=tol.inner,
        exterior=config.exterior,
    )
    square_free = is_square_free(poly, tol.square_free)
    checks = {
        "inner_toral": {
            "value": report.boundary_max_deviation,
            "threshold": tol.inner,
            "passed": report.verdict == Verdict.PASS,
        },
        "square_free": {
            "value": square_free.residual,
            "threshold": tol.square_free,
            "passed": bool(square_free),
        },
    }
    payload = {
        "bidegree": list(poly.bidegree),
        "inner_toral": report.model_dump(mode="json"),
        "square_free": {
            "square_free": square_free.square_free,
            "residual_w": square_free.residual_w,
            "residual_z": square_free.residual_z,
            "threshold": square_free.threshold,
        },
    }
    return outcome_from_checks(payload, checks, f"inner-toral verdict {report.verdict.value}")


def run(config: RunConfig) -> CommandOutcome:
    poly = load_model(config.require_path("poly"), BiPoly)
    return inner_toral_stage(poly, config)
