"""Contextual-subspace VQE with qubit tapering, measurement grouping and pulse-level ansätze."""

from .pauli import PauliString, PauliSum, exact_ground, expectation

__version__ = "0.1.0"

__all__ = ["PauliString", "PauliSum", "exact_ground", "expectation", "__version__"]
