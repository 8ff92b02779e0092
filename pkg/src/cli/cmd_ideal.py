"""Kommando ideal: Gröbner-Basis, Quotientendimension und Teilerfremdheit eines Erzeugerpaars."""

from __future__ import annotations

from typing import Any

from src.cli.outcome import CommandOutcome, outcome_from_checks
from src.isopair_lab.ideal import ExactBiPoly, groebner_basis, relatively_prime
from src.models import IdealPair, RunConfig, TermOrder
from src.utils import load_model


def ideal_report(p: ExactBiPoly, q: ExactBiPoly, order: TermOrder) -> dict[str, Any]:
    """Reduzierte Basis mit Zertifikaten, Standardmonome und Quotientendimension."""
    gb = groebner_basis(p, q, order)
    normal = gb.normal_set
    return {
        "order": order.value,
        "groebner_basis": [g.to_model().model_dump(mode="json") for g in gb.generators],
        "leading_monomials": [list(m) for m in gb.leading_monomials],
        "normal_set": None if normal is None else [list(m) for m in normal],
        "quotient_dim": "infinite" if normal is None else len(normal),
        "relatively_prime": relatively_prime(p, q, order),
        "certificates_exact": all(gb.certificate_residual(k).is_zero for k in range(len(gb.generators))),
    }


def ideal_stage(p: ExactBiPoly, q: ExactBiPoly, order: TermOrder) -> CommandOutcome:
    payload = ideal_report(p, q, order)
    checks = {"certificates": {"value": payload["certificates_exact"], "passed": payload["certificates_exact"]}}
    return outcome_from_checks(payload, checks, f"dim C[z,w]/<p,q> = {payload['quotient_dim']}")


def run(config: RunConfig) -> CommandOutcome:
    pair = load_model(config.require_path("ideal"), IdealPair)
    return ideal_stage(ExactBiPoly.from_model(pair.p), ExactBiPoly.from_model(pair.q), config.order)
