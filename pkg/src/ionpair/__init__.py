"""State-vector simulation of quantum computing with pair-encoded trapped-ion qubits."""

__version__ = "0.1.0"
