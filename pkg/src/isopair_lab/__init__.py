"""Rechenmodule für reine algebraische Isometrienpaare auf ausgezeichneten Varietäten."""

__all__ = []
