"""Kommando rank: Rangtupel α, Bimultiplizitäts-Identitäten und Stabilität unter Blaschke-Restriktion."""

from __future__ import annotations

from collections.abc import Sequence

from src.cli.outcome import CommandOutcome, check_entry, outcome_from_checks
from src.isopair_lab.errors import InputError
from src.isopair_lab.isopair import (
    Operator,
    RankResult,
    ShiftModel,
    annihilation_residual,
    blaschke_from_zeros,
    char_poly_check,
    compute_rank,
    multiplicity,
    rank_stability_check,
)
from src.models import Colligation, Factorization, RunConfig
from src.utils import load_model


def rank_stage(
    colligation: Colligation,
    factorization: Factorization,
    config: RunConfig,
    blaschke_zeros: Sequence[complex] = (0j,),
) -> tuple[CommandOutcome, RankResult]:
    """Berechnet α und alle Prüfungen des Rangmoduls.

    Raises:
        InputError: Wenn M oder N nicht zu den Bigraden der Faktoren passen
    """
    tol = config.tolerances
    model = ShiftModel(colligation, config.truncation)
    rank = compute_rank(
        model,
        factorization,
        config.samples,
        config.seed,
        rank_tol=tol.rank,
        threads=config.threads,
        regularity_tol=tol.regularity,
        cluster_radius=tol.cluster,
    )
    if not rank.consistent:
        raise InputError(
            f"colligation sizes M={rank.M}, N={rank.N} inconsistent with factor bidegrees {list(rank.bidegrees)} "
            f"and alpha {list(rank.alpha)}"
        )
    p = factorization.product()
    normalized = p.scaled(1.0 / p.max_abs_coeff)
    char_poly = char_poly_check(model, factorization, rank.alpha)
    stability = rank_stability_check(
        model,
        factorization,
        blaschke_from_zeros(blaschke_zeros),
        rank,
        rank_tol=tol.rank,
        exclusion_radius=tol.regularity,
    )
    mult_s = multiplicity(model, Operator.S, tol.rank)
    mult_t = multiplicity(model, Operator.T, tol.rank)
    checks = {
        "annihilation": check_entry(annihilation_residual(model, normalized), tol.annihilation),
        "charpoly": check_entry(char_poly.max_residual, tol.residual),
        "stability": {
            "value": stability.stable,
            "codimension": stability.codimension,
            "expected_codimension": stability.expected_codimension,
            "excluded_points": len(stability.excluded),
            "passed": stability.stable,
        },
        "multiplicity": {
            "value": {"S": mult_s, "T": mult_t},
            "expected": {"S": colligation.M, "T": colligation.N},
            "passed": mult_s == colligation.M and mult_t == colligation.N,
        },
    }
    payload = {
        "alpha": list(rank.alpha),
        "M": rank.M,
        "N": rank.N,
        "bidegrees": [list(b) for b in rank.bidegrees],
        "samples_per_component": config.samples,
        "seed": config.seed,
        "truncation": config.truncation,
        "rank_tolerance": tol.rank,
        "charpoly_skipped": len(char_poly.skipped),
    }
    return outcome_from_checks(payload, checks, f"alpha={list(rank.alpha)}"), rank


def run(config: RunConfig) -> CommandOutcome:
    colligation = load_model(config.require_path("colligation"), Colligation, config.validation_context)
    factorization = load_model(config.require_path("factors"), Factorization)
    outcome, _ = rank_stage(colligation, factorization, config)
    return outcome
