"""Kommando report: Gesamtpipeline auf einem Eingabebündel.

Reihenfolge inner_toral → realize → rank → kernel → defect → ideal. Fehlgeschlagene
Stufen markieren abhängige Stufen als übersprungen; unabhängige laufen weiter.
"""

from __future__ import annotations

import logging
from collections.abc import Callable
from typing import Any

from src.cli.cmd_defect import defect_stage
from src.cli.cmd_ideal import ideal_stage
from src.cli.cmd_inner_toral import inner_toral_stage
from src.cli.cmd_kernel import kernel_stage
from src.cli.cmd_rank import rank_stage
from src.cli.cmd_realize import realize_stage
from src.cli.outcome import EXIT_CHECK_FAILED, EXIT_PASS, CommandOutcome
from src.isopair_lab.errors import InputError
from src.isopair_lab.ideal import ExactBiPoly
from src.models import Bundle, RunConfig, StageStatus
from src.utils import load_model

logger = logging.getLogger(__name__)

StageResult = tuple[CommandOutcome, Any]


def _run_stage(name: str, stage: Callable[[], StageResult]) -> tuple[dict[str, Any], Any]:
    """Führt eine Stufe aus; mathematische Fehler werden zum Stufenstatus fail."""
    try:
        outcome, value = stage()
    except InputError:
        raise
    except ValueError as e:
        logger.warning("stage %s failed: %s", name, e)
        entry: dict[str, Any] = {"status": StageStatus.FAIL.value, "error": str(e)}
        for attribute in ("residual", "threshold"):
            if getattr(e, attribute, None) is not None:
                entry[attribute] = getattr(e, attribute)
        return entry, None
    logger.info("stage %s: %s", name, outcome.summary)
    return {"status": outcome.status.value, **outcome.report}, value if not outcome.failures else None


def _skipped(reason: str) -> dict[str, Any]:
    return {"status": StageStatus.SKIPPED.value, "reason": reason}


def run(config: RunConfig) -> CommandOutcome:
    bundle = load_model(config.require_path("bundle"), Bundle, config.validation_context)
    try:
        factorization = bundle.factorization.checked_against(bundle.poly, config.tolerances.residual * 100)
    except ValueError as e:
        raise InputError(f"bundle factors: {e}")
    stages: dict[str, dict[str, Any]] = {}

    stages["inner_toral"], _ = _run_stage("inner_toral", lambda: (inner_toral_stage(bundle.poly, config), None))
    stages["realize"], _ = _run_stage("realize", lambda: (realize_stage(bundle.colligation, config), None))
    stages["rank"], rank = _run_stage(
        "rank", lambda: rank_stage(bundle.colligation, factorization, config, bundle.blaschke_zeros)
    )

    triple = None
    if rank is None:
        stages["kernel"] = _skipped("rank stage failed")
    else:
        stages["kernel"], triple = _run_stage(
            "kernel",
            lambda: kernel_stage(
                bundle.colligation,
                factorization,
                bundle.component,
                rank.alpha[bundle.component],
                config,
                bundle.triple,
            ),
        )

    if triple is None:
        stages["defect"] = _skipped("kernel stage failed or was skipped")
        stages["ideal"] = _skipped("kernel stage failed or was skipped")
    else:
        stages["defect"], _ = _run_stage("defect", lambda: (defect_stage(bundle.colligation, triple, config), None))
        if bundle.ideal is None:
            stages["ideal"] = _skipped("bundle carries no ideal pair")
        else:
            pair = bundle.ideal
            stages["ideal"], _ = _run_stage(
                "ideal",
                lambda: (
                    ideal_stage(ExactBiPoly.from_model(pair.p), ExactBiPoly.from_model(pair.q), config.order),
                    None,
                ),
            )

    failed = [name for name, entry in stages.items() if entry["status"] == StageStatus.FAIL.value]
    report = {
        "stages": stages,
        "failed": failed,
        "seed": config.seed,
        "truncation": config.truncation,
        "tolerances": config.tolerances.model_dump(mode="json"),
    }
    summary = ", ".join(f"{name}={entry['status']}" for name, entry in stages.items())
    return CommandOutcome(
        report=report,
        exit_code=EXIT_CHECK_FAILED if failed else EXIT_PASS,
        summary=summary,
        failures=failed,
    )
