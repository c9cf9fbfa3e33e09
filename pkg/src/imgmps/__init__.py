"""Quantum-state encodings of images, MPS compression and circuit synthesis."""

__version__ = "0.1.0"
