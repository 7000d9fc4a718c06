"""Coherence and entanglement stability of GHZ-encoded multi-block states under local noise."""

__version__ = "0.1.0"
