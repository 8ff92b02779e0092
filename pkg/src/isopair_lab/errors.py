"""Fehlerklassen der Rechenmodule."""


class InputError(ValueError):
    """Fehlerhafte oder inkonsistente Eingabe (CLI-Exitcode 2)."""


class NumericalCheckError(ValueError):
    """Eine mathematische Prüfung ist fehlgeschlagen (CLI-Exitcode 1).

    Args:
        message: Beschreibung der Prüfung
        residual: gemessener Wert
        threshold: Entscheidungsschwelle
    """

    def __init__(self, message: str, residual: float | None = None, threshold: float | None = None):
        super().__init__(message)
        self.residual = residual
        self.threshold = threshold
