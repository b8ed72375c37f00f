"""Fault-tolerant gate gadgets built from transversal controlled-Paulis."""

from .pauli import CliffordGate, CliffordMap, DimensionError, GateKind, PauliString, commutes, conjugate, pauli_mul, weight

__version__ = "0.1.0"

__all__ = [
    "CliffordGate",
    "CliffordMap",
    "DimensionError",
    "GateKind",
    "PauliString",
    "commutes",
    "conjugate",
    "pauli_mul",
    "weight",
    "__version__",
]
