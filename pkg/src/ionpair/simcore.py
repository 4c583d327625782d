"""Dense complex state vectors and gate matrices.

Everything here is small (dimension 2, 4 or 16) so storage is plain dense
numpy arrays. Objects are immutable values: operations return new objects
and never touch their inputs.

Basis convention: for tensor products the left factor is the slow index,
so a two-qubit vector is ordered (|00>, |01>, |10>, |11>) with the first
qubit leftmost.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Sequence

import numpy as np

EXACT_TOL = 1e-12
PIPELINE_TOL = 1e-9


class DimensionError(ValueError):
    """Raised when operands have incompatible dimensions."""


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=np.complex128, copy=True)
    arr.setflags(write=False)
    return arr


def computational_labels(n_qubits: int) -> tuple[str, ...]:
    return tuple("|" + "".join(bits) + ">" for bits in product("01", repeat=n_qubits))


@dataclass(frozen=True, eq=False)
class StateVector:
    amplitudes: np.ndarray
    basis_labels: tuple[str, ...] = field(default=())

    def __post_init__(self):
        amps = _frozen(np.ravel(self.amplitudes))
        labels = tuple(self.basis_labels)
        if not labels:
            n = int(np.log2(len(amps))) if len(amps) > 0 else 0
            if 2**n != len(amps) or len(amps) == 0:
                raise DimensionError(
                    f"cannot infer qubit labels for dimension {len(amps)}; pass basis_labels"
                )
            labels = computational_labels(n)
        if len(labels) != len(amps):
            raise DimensionError(
                f"{len(amps)} amplitudes but {len(labels)} basis labels"
            )
        if not np.all(np.isfinite(amps)):
            raise ValueError("amplitudes must be finite")
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "basis_labels", labels)

    @property
    def dim(self) -> int:
        return len(self.amplitudes)

    def norm_sq(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def normalized(self) -> StateVector:
        return StateVector(self.amplitudes / np.sqrt(self.norm_sq()), self.basis_labels)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def amplitude(self, label: str) -> complex:
        return complex(self.amplitudes[self.basis_labels.index(label)])

    @classmethod
    def basis(cls, label: str, labels: Sequence[str]) -> StateVector:
        labels = tuple(labels)
        amps = np.zeros(len(labels), dtype=np.complex128)
        amps[labels.index(label)] = 1.0
        return cls(amps, labels)

    def __repr__(self):
        terms = ", ".join(f"{a:.6g}" for a in self.amplitudes)
        return f"StateVector([{terms}])"


@dataclass(frozen=True, eq=False)
class GateMatrix:
    entries: np.ndarray
    name: str = "G"

    def __post_init__(self):
        m = _frozen(self.entries)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionError(f"gate {self.name!r} must be square, got shape {m.shape}")
        object.__setattr__(self, "entries", m)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def unitarity_error(self) -> float:
        """Max-entry deviation of G^dagger G from the identity."""
        m = self.entries
        return float(np.max(np.abs(m.conj().T @ m - np.eye(self.dim))))

    def is_unitary(self, tol: float = EXACT_TOL) -> bool:
        return self.unitarity_error() <= tol

    def __matmul__(self, other):
        if isinstance(other, GateMatrix):
            return mat_mul(self, other)
        if isinstance(other, StateVector):
            return apply(self, other)
        return NotImplemented

    def __repr__(self):
        return f"GateMatrix({self.name!r}, dim={self.dim})"


def identity(dim: int) -> GateMatrix:
    return GateMatrix(np.eye(dim), name=f"I{dim}")


def apply(gate: GateMatrix, state: StateVector) -> StateVector:
    if gate.dim != state.dim:
        raise DimensionError(
            f"cannot apply {gate.dim}x{gate.dim} gate {gate.name!r} "
            f"to a state of dimension {state.dim}"
        )
    return StateVector(gate.entries @ state.amplitudes, state.basis_labels)


def tensor(a: GateMatrix, b: GateMatrix) -> GateMatrix:
    return GateMatrix(np.kron(a.entries, b.entries), name=f"{a.name}(x){b.name}")


def tensor_states(a: StateVector, b: StateVector) -> StateVector:
    labels = tuple(
        "|" + la.strip("|>") + lb.strip("|>") + ">"
        for la in a.basis_labels
        for lb in b.basis_labels
    )
    return StateVector(np.kron(a.amplitudes, b.amplitudes), labels)


def mat_mul(a: GateMatrix, b: GateMatrix) -> GateMatrix:
    if a.dim != b.dim:
        raise DimensionError(f"cannot multiply {a.name!r} (dim {a.dim}) by {b.name!r} (dim {b.dim})")
    return GateMatrix(a.entries @ b.entries, name=f"{a.name}{b.name}")


def dagger(a: GateMatrix) -> GateMatrix:
    return GateMatrix(a.entries.conj().T, name=f"{a.name}^dag")


def fidelity(a: StateVector, b: StateVector) -> float:
    """Squared overlap |<a|b>|^2, clipped to [0, 1]."""
    if a.dim != b.dim:
        raise DimensionError(f"fidelity needs equal dimensions, got {a.dim} and {b.dim}")
    f = abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2
    return float(min(max(f, 0.0), 1.0))


def max_abs_diff(a, b) -> float:
    a = a.entries if isinstance(a, GateMatrix) else getattr(a, "amplitudes", a)
    b = b.entries if isinstance(b, GateMatrix) else getattr(b, "amplitudes", b)
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b))))


def equal_up_to_phase(a, b, tol: float = EXACT_TOL) -> bool:
    """True when min over phi of max|a - e^{i phi} b| is within tol.

    The phase is taken from <b|a> (the least-squares optimum), which makes
    the max-entry test an upper bound on the true minimum.
    """
    a = np.ravel(a.entries if isinstance(a, GateMatrix) else getattr(a, "amplitudes", a))
    b = np.ravel(b.entries if isinstance(b, GateMatrix) else getattr(b, "amplitudes", b))
    overlap = np.vdot(b, a)
    if abs(overlap) == 0.0:
        return bool(np.max(np.abs(a - b)) <= tol)
    phase = overlap / abs(overlap)
    return bool(np.max(np.abs(a - phase * b)) <= tol)
