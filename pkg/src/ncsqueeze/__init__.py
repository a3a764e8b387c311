"""Coherent and squeezed states of a minimal-length deformed oscillator and
the entanglement they produce at a beam splitter."""

__version__ = "0.1.0"
