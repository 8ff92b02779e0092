"""Kommando kernel: zulässiges Tripel (K, P, Q) für eine Komponente konstruieren und prüfen."""

from __future__ import annotations

from src.cli.cmd_rank import rank_stage
from src.cli.outcome import CommandOutcome, check_entry, encode_complex, outcome_from_checks
from src.isopair_lab.kernel import (
    AdmissibleTriple,
    basis_orthonormality_check,
    build_triple,
    gram_unitarity_check,
    intertwining_residual,
    kernel_positivity_check,
    verify_admissible,
)
from src.isopair_lab.poly2 import sample_variety
from src.models import BiPoly, Colligation, Factorization, RunConfig, TripleModel
from src.utils import load_model


def triple_from_model(model: TripleModel, p: BiPoly, alpha: int, seed: int) -> AdmissibleTriple:
    """Übernimmt ein vorgegebenes Tripel; ohne Zeugen dient der erste Abtastpunkt."""
    witness = model.witness or model.Q.witness or sample_variety(p, 1, seed)[0]
    return AdmissibleTriple(Q=model.Q, P=model.P, alpha=alpha, p=p, witness=witness)


def kernel_stage(
    colligation: Colligation,
    factorization: Factorization,
    component: int,
    alpha: int,
    config: RunConfig,
    given: TripleModel | None = None,
) -> tuple[CommandOutcome, AdmissibleTriple]:
    """Baut (oder übernimmt) das Tripel der Komponente und führt alle Kernprüfungen aus."""
    tol = config.tolerances
    p = factorization.factors[component]
    if given is None:
        triple = build_triple(colligation, p, alpha, config.seed, rank_tol=tol.rank, tol=tol.kernel)
    else:
        triple = triple_from_model(given, p, alpha, config.seed)
    admissible = verify_admissible(triple, config.samples, config.seed, tol.rank)
    points = sample_variety(p, config.samples, config.seed + 1)
    min_kernel, min_weighted = kernel_positivity_check(triple, points[:8])
    basis = basis_orthonormality_check(triple, colligation, seed=config.seed, rank_tol=tol.rank)
    checks = {
        "kernel_identity": check_entry(admissible.max_residual, tol.kernel),
        "full_rank": {
            "value": {"Q": admissible.q_rank, "P": admissible.p_rank, "K": admissible.k_rank},
            "expected": alpha,
            "passed": admissible.full_rank,
        },
        "intertwining": check_entry(intertwining_residual(triple.Q, triple.P, colligation, points), tol.kernel),
        "gram_unitarity": check_entry(gram_unitarity_check(triple, 8, config.seed), tol.gram),
        "basis_orthonormality": {
            "value": basis.gram_deviation,
            "threshold": tol.kernel,
            "rank": basis.rank,
            "expected_rank": basis.expected_rank,
            "passed": basis.passed(tol.kernel),
        },
        "positivity": {
            "value": min(min_kernel, min_weighted),
            "threshold": -tol.gram,
            "passed": min(min_kernel, min_weighted) >= -tol.gram,
        },
    }
    payload = {
        "component": component,
        "alpha": alpha,
        "Q": triple.Q.model_dump(mode="json"),
        "P": triple.P.model_dump(mode="json"),
        "witness": {"z": encode_complex(triple.witness.z), "w": encode_complex(triple.witness.w)},
        "source": "bundle" if given is not None else "constructed",
    }
    return outcome_from_checks(payload, checks, f"kernel triple for component {component}"), triple


def run(config: RunConfig) -> CommandOutcome:
    colligation = load_model(config.require_path("colligation"), Colligation, config.validation_context)
    factorization = load_model(config.require_path("factors"), Factorization)
    if config.component >= len(factorization.factors):
        raise ValueError(f"component {config.component} out of range for {len(factorization.factors)} factors")
    _, rank = rank_stage(colligation, factorization, config)
    outcome, _ = kernel_stage(colligation, factorization, config.component, rank.alpha[config.component], config)
    return outcome
