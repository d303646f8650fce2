"""Separability gap toolkit for multi-qubit Hamiltonians."""

__version__ = "0.1.0"
