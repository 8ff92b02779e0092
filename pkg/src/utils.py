"""Gemeinsame Hilfsfunktionen für Ein-/Ausgabe und Parallelisierung."""

from __future__ import annotations

import json
import logging
import os
from collections.abc import Callable, Iterable
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, TypeVar

import pandas as pd
from pydantic import BaseModel

from src.isopair_lab.errors import InputError

logger = logging.getLogger(__name__)

ModelT = TypeVar("ModelT", bound=BaseModel)
ItemT = TypeVar("ItemT")
ResultT = TypeVar("ResultT")


def load_model(file_path: Path, cls: type[ModelT], context: dict[str, Any] | None = None) -> ModelT:
    """Lädt ein Pydantic-Modell aus einer JSON-Datei.

    Args:
        file_path: Pfad zur JSON-Datei
        cls: Zielmodell
        context: Validierungskontext, z.B. {"unitary_tol": 1e-8}

    Returns:
        Validiertes Modell

    Raises:
        InputError: Wenn die Datei kein gültiges JSON enthält
        ValidationError: Wenn der Inhalt nicht zum Modell passt
    """
    with open(file_path, encoding="utf-8") as f:
        try:
            data = json.load(f)
        except json.JSONDecodeError as e:
            raise InputError(f"{file_path}: invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}")
    logger.debug("loaded %s from %s", cls.__name__, file_path)
    return cls.model_validate(data, context=context)


def save_model(model: BaseModel, file_path: Path) -> None:
    """Speichert ein Modell als JSON (gleiche Form wie beim Laden)."""
    with open(file_path, "w", encoding="utf-8") as f:
        json.dump(model.model_dump(mode="json"), f, indent=2, ensure_ascii=False)


def dump_report(report: dict[str, Any]) -> str:
    """Deterministische JSON-Darstellung eines Berichts."""
    return json.dumps(report, indent=2, sort_keys=True, ensure_ascii=False)


def export_csv(frame: pd.DataFrame, file_path: Path) -> None:
    """Schreibt eine Tabelle als CSV ohne Index."""
    frame.to_csv(file_path, index=False)
    logger.info("wrote %d rows to %s", len(frame), file_path)


def parallel_map(func: Callable[[ItemT], ResultT], items: Iterable[ItemT], threads: int = 1) -> list[ResultT]:
    """Wendet ``func`` auf alle Elemente an, bei threads > 1 über einen Thread-Pool.

    Die Reihenfolge der Ergebnisse entspricht der Eingabe.
    """
    items = list(items)
    if threads <= 1 or len(items) < 2:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=min(threads, len(items))) as pool:
        return list(pool.map(func, items))


THREADS_ENV = "ISOPAIR_LAB_THREADS"


def thread_cap() -> int:
    """Obergrenze der Worker-Threads aus ISOPAIR_LAB_THREADS (Standard 1, ungültige Werte ebenfalls 1)."""
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1
