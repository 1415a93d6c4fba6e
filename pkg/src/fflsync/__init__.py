"""Noise-driven synchrony and regularity in feed-forward-loop oscillator motifs."""

__version__ = "0.1.0"
