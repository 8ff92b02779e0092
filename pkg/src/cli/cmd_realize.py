"""Kommando realize: Innerheit, Analytizität, Defektfaktor und Realisierung einer Kolligation."""

from __future__ import annotations

import numpy as np

from src.cli.outcome import CommandOutcome, check_entry, outcome_from_checks
from src.isopair_lab.colligation import (
    boundary_points,
    cauchy_constant_term,
    held_out_error,
    interior_points,
    realize,
    transfer_table,
    verify_inner,
)
from src.models import Colligation, RunConfig
from src.utils import export_csv, load_model


def realize_stage(colligation: Colligation, config: RunConfig) -> CommandOutcome:
    tol = config.tolerances
    realized, factor = realize(colligation)
    held_out = np.concatenate([interior_points(16, radii=(0.2, 0.5, 0.8)), boundary_points(16)])
    checks = {
        "inner": check_entry(verify_inner(colligation, config.boundary_samples), tol.inner),
        "cauchy_constant_term": check_entry(
            float(np.abs(cauchy_constant_term(colligation) - colligation.A).max()), tol.realization
        ),
        "defect_factor": check_entry(factor.residual(colligation), tol.realization),
        "held_out_transfer": check_entry(held_out_error(realized, colligation, held_out), tol.realization),
    }
    if config.csv is not None:
        export_csv(transfer_table(colligation, boundary_points(config.boundary_samples)), config.csv)
    payload = {
        "M": colligation.M,
        "N": colligation.N,
        "realized_N": realized.N,
        "displayed_rank": factor.displayed_rank,
        "gram_min_eigenvalue": factor.gram_min_eigenvalue,
        "spectral_radius_D": colligation.spectral_radius_d,
    }
    return outcome_from_checks(payload, checks, f"realized M={colligation.M} N={realized.N}")


def run(config: RunConfig) -> CommandOutcome:
    colligation = load_model(config.require_path("colligation"), Colligation, config.validation_context)
    return realize_stage(colligation, config)
