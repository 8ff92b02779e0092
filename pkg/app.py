"""Kommandozeile für reine algebraische Isometrienpaare (JSON-Berichte auf stdout)."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from collections.abc import Callable, Sequence
from types import ModuleType

from pydantic import ValidationError

from src.cli import cmd_defect, cmd_ideal, cmd_inner_toral, cmd_kernel, cmd_rank, cmd_realize, cmd_report
from src.cli.outcome import EXIT_CHECK_FAILED, EXIT_INPUT_ERROR, CommandOutcome
from src.isopair_lab.errors import InputError, NumericalCheckError
from src.models import Command, RunConfig, TermOrder, Tolerances
from src.utils import dump_report

logger = logging.getLogger("isopair_lab")

COMMANDS: dict[Command, ModuleType] = {
    Command.CHECK_INNER_TORAL: cmd_inner_toral,
    Command.REALIZE: cmd_realize,
    Command.RANK: cmd_rank,
    Command.KERNEL: cmd_kernel,
    Command.IDEAL: cmd_ideal,
    Command.DEFECT: cmd_defect,
    Command.REPORT: cmd_report,
}


class UsageError(Exception):
    """argparse-Fehler, der nicht direkt den Prozess beendet."""


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(message)


def parse_tolerances(values: Sequence[str]) -> Tolerances:
    """Liest ``--tol`` als KEY=VALUE oder als Einzelwert (setzt die Inner-Toral-Toleranz).

    Raises:
        InputError: Bei unbekanntem Schlüssel oder nicht numerischem Wert
    """
    updates: dict[str, float] = {}
    for item in values:
        key, _, raw = item.rpartition("=")
        key = key or "inner"
        if key not in Tolerances.model_fields:
            raise InputError(f"unknown tolerance '{key}' (known: {', '.join(Tolerances.model_fields)})")
        try:
            updates[key] = float(raw)
        except ValueError:
            raise InputError(f"tolerance '{key}' needs a number, got '{raw}'")
    return Tolerances(**updates)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="isopair-lab", description=__doc__)
    parser.add_argument("command", choices=[c.value for c in Command])
    parser.add_argument("--poly", help="BiPoly-JSON")
    parser.add_argument("--colligation", help="Kolligations-JSON")
    parser.add_argument("--factors", help="Factorization-JSON")
    parser.add_argument("--bundle", help="Bündel-JSON für report")
    parser.add_argument("--ideal", help="IdealPair-JSON für ideal")
    parser.add_argument("--csv", help="Transferwerte als CSV exportieren (realize)")
    parser.add_argument("--tol", action="append", default=[], metavar="KEY=VALUE", help="Toleranz überschreiben")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--truncation", type=int, default=12, help="Trunkierungsgrad D")
    parser.add_argument("--samples", type=int, default=20, help="Abtastpunkte pro Komponente")
    parser.add_argument("--order", choices=[o.value for o in TermOrder], default=TermOrder.LEX_ZW.value)
    parser.add_argument("--exterior", action="store_true", help="auch λ ∈ 𝔼 abtasten")
    parser.add_argument("--degrees", type=int, nargs="+", default=[8, 10, 12], help="Defektgrade (aufsteigend)")
    parser.add_argument("--generators", type=int, default=None, help="Anzahl Generatoren im Defekt")
    parser.add_argument("--component", type=int, default=0, help="Komponente für kernel und defect")
    parser.add_argument("--verbose", action="store_true", help="Debug-Ausgabe auf stderr")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        command=Command(args.command),
        poly=args.poly,
        colligation=args.colligation,
        factors=args.factors,
        bundle=args.bundle,
        ideal=args.ideal,
        csv=args.csv,
        tolerances=parse_tolerances(args.tol),
        seed=args.seed,
        truncation=args.truncation,
        samples=args.samples,
        order=TermOrder(args.order),
        exterior=args.exterior,
        degrees=args.degrees,
        generators=args.generators,
        component=args.component,
        verbose=args.verbose,
    )


def run(config: RunConfig) -> CommandOutcome:
    """Führt das Kommando aus; Eingabefehler und mathematische Fehler werden als Exception weitergereicht."""
    return COMMANDS[config.command].run(config)


def _fail(code: int, kind: str, message: str, emit: Callable[[str], None], **extra: object) -> int:
    logger.error("%s: %s", kind, message)
    emit(dump_report({"error": {"kind": kind, "message": message, **extra}, "exit_code": code}))
    return code


def main(argv: Sequence[str] | None = None, emit: Callable[[str], None] = print) -> int:
    """Einstiegspunkt; liefert den Exitcode (0 bestanden, 1 Prüfung fehlgeschlagen, 2 Eingabefehler)."""
    try:
        args = build_parser().parse_args(argv)
    except UsageError as e:
        return _fail(EXIT_INPUT_ERROR, "usage", str(e), emit)

    logging.basicConfig(
        stream=sys.stderr,
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
        force=True,
    )
    try:
        config = config_from_args(args)
        outcome = run(config)
    except NumericalCheckError as e:
        return _fail(EXIT_CHECK_FAILED, "numerical_check", str(e), emit, residual=e.residual, threshold=e.threshold)
    except json.JSONDecodeError as e:
        return _fail(EXIT_INPUT_ERROR, "json", f"line {e.lineno}, column {e.colno}: {e.msg}", emit)
    except ValidationError as e:
        return _fail(EXIT_INPUT_ERROR, "validation", str(e), emit)
    except (InputError, FileNotFoundError, ValueError) as e:
        return _fail(EXIT_INPUT_ERROR, "input", str(e), emit)

    logger.info("%s: %s", config.command.value, outcome.summary)
    emit(dump_report({**outcome.report, "command": config.command.value, "exit_code": outcome.exit_code}))
    return outcome.exit_code


if __name__ == "__main__":
    sys.exit(main())
