"""Temporal localization of batsman strokes in untrimmed telecast video."""

__version__ = "0.1.0"
