"""Quantum context-sensitive word embeddings on a classical statevector simulator."""

__version__ = "0.1.0"


class CapacityError(ValueError):
    """Raised when a vocabulary index does not fit the qubit register."""
