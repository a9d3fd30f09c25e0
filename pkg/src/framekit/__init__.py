"""Pauli and Clifford frame tracking with buffer protocols for non-Clifford gates."""

__version__ = "0.1.0"
