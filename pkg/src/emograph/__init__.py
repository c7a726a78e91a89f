"""Emotion recognition from caption-derived context graphs."""

__version__ = "0.1.0"
