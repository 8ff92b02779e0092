"""Kommando defect: Kodimensionsfolge des zyklischen Unterraums aus dem Kern-Tripel."""

from __future__ import annotations

from src.cli.cmd_kernel import kernel_stage
from src.cli.cmd_rank import rank_stage
from src.cli.outcome import CommandOutcome, outcome_from_checks
from src.isopair_lab.ideal import cyclic_defect
from src.isopair_lab.isopair import ShiftModel
from src.isopair_lab.kernel import AdmissibleTriple
from src.models import Colligation, Factorization, Marker, RunConfig
from src.utils import load_model


def defect_stage(colligation: Colligation, triple: AdmissibleTriple, config: RunConfig) -> CommandOutcome:
    model = ShiftModel(colligation, max(config.degrees))
    result = cyclic_defect(
        model,
        triple.Q,
        triple.witness,
        config.degrees,
        p=triple.p,
        generator_count=config.generators,
        rank_tol=config.tolerances.rank,
        rationalize=config.tolerances.rationalize,
    )
    codim = result.ideal_codimension
    checks = {
        "stabilized": {
            "value": list(result.codimensions),
            "passed": result.stabilized,
        },
    }
    payload = {
        "degrees": list(result.degrees),
        "codimensions": list(result.codimensions),
        "stabilized_value": result.stabilized_value,
        "generator_count": result.generator_count,
        "generator_degree": result.generator_degree,
        "ideal_codimension": codim.value if isinstance(codim, Marker) else codim,
    }
    return outcome_from_checks(payload, checks, f"cyclic defect sequence {list(result.codimensions)}")


def run(config: RunConfig) -> CommandOutcome:
    colligation = load_model(config.require_path("colligation"), Colligation, config.validation_context)
    factorization = load_model(config.require_path("factors"), Factorization)
    _, rank = rank_stage(colligation, factorization, config)
    kernel, triple = kernel_stage(colligation, factorization, config.component, rank.alpha[config.component], config)
    if kernel.failures:
        return kernel
    return defect_stage(colligation, triple, config)
