"""Spectral-function asymptotics lab: resonance geometry, gauge transform,
heat invariants, Bloch-fiber oracle and validation suite."""

__version__ = "0.1.0"
