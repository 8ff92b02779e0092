"""Kommandomodule der Kommandozeile (ein Modul pro Befehl)."""
