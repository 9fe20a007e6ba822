"""Microwave and thermal environment analysis for packaged superconducting qubits."""

__version__ = "0.1.0"
