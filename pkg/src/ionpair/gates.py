"""Named gates for two pair-encoded qubits and the identities tying them together.

Every matrix exists twice: once typed in from its printed form, once
rebuilt from its compositional definition (W = U(7pi/4) (x) U(7pi/4),
V = I (x) U(7pi/4), P_i = V^dag M_i V, D = W P_1 W). The catalog refuses to
build if the two disagree, so the algebra is checked on every import path
that touches a gate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from types import MappingProxyType
from typing import Callable, Mapping

import numpy as np

from .ion_model import pair_rotation
from .simcore import (
    EXACT_TOL,
    GateMatrix,
    StateVector,
    apply,
    dagger,
    identity,
    mat_mul,
    max_abs_diff,
    tensor,
)

PREP_ANGLE = 7 * math.pi / 4
MARKED_LABELS = ("|00>", "|01>", "|10>", "|11>")
# oracle index i whose P_i flips the sign of each computational basis state
ORACLE_FOR_LABEL = {"|11>": 1, "|10>": 2, "|01>": 3, "|00>": 4}

_PRINTED_W = 0.5 * np.array(
    [
        [1, 1j, 1j, -1],
        [1j, 1, -1, 1j],
        [1j, -1, 1, 1j],
        [-1, 1j, 1j, 1],
    ]
)
_PRINTED_M = {
    1: np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, -1j], [0, 0, 1j, 0]]),
    2: np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1j], [0, 0, -1j, 0]]),
    3: np.array([[0, -1j, 0, 0], [1j, 0, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]),
    4: np.array([[0, 1j, 0, 0], [-1j, 0, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]),
}
_PRINTED_P = {
    1: np.diag([1, 1, 1, -1]),
    2: np.diag([1, 1, -1, 1]),
    3: np.diag([1, -1, 1, 1]),
    4: np.diag([-1, 1, 1, 1]),
}
_PRINTED_D = 0.5 * np.array(
    [
        [-1, 1j, 1j, -1],
        [1j, 1, -1, -1j],
        [1j, -1, 1, -1j],
        [-1, -1j, -1j, -1],
    ]
)
PSI_1 = 0.5 * np.array([-1, 1j, 1j, 1])
PSI_2 = 0.5 * np.array([-1, 1j, 1j, -1])
PSI_3 = np.array([0, 0, 0, 1], dtype=complex)


class CatalogError(RuntimeError):
    """A printed matrix disagrees with its compositional definition."""


def _check_index(i: int) -> None:
    if i not in (1, 2, 3, 4):
        raise IndexError(f"gate index must be 1..4, got {i}")


def gate_u(theta: float) -> GateMatrix:
    return pair_rotation(theta)


def _composed_w() -> GateMatrix:
    u = gate_u(PREP_ANGLE)
    return tensor(u, u)


def _composed_v() -> GateMatrix:
    return tensor(identity(2), gate_u(PREP_ANGLE))


def _composed_p(i: int) -> GateMatrix:
    v = _composed_v()
    return mat_mul(mat_mul(dagger(v), GateMatrix(_PRINTED_M[i])), v)


def _composed_d() -> GateMatrix:
    w = GateMatrix(_PRINTED_W)
    return mat_mul(mat_mul(w, GateMatrix(_PRINTED_P[1])), w)


def _checked(name: str, printed: np.ndarray, composed: GateMatrix) -> GateMatrix:
    err = max_abs_diff(printed, composed)
    if err > EXACT_TOL:
        raise CatalogError(f"{name}: printed and composed forms differ by {err:.3g}")
    gate = GateMatrix(printed, name=name)
    if not gate.is_unitary():
        raise CatalogError(f"{name} is not unitary (error {gate.unitarity_error():.3g})")
    return gate


@lru_cache(maxsize=None)
def catalog() -> Mapping[str, GateMatrix]:
    """Build and cross-check every named gate once; the mapping is read-only."""
    gates = {
        "U(7pi/4)": gate_u(PREP_ANGLE),
        "W": _checked("W", _PRINTED_W, _composed_w()),
        # V has no printed 4x4 form; its printed block is (1/sqrt2)[[1, i], [i, 1]]
        "V": _checked(
            "V",
            np.kron(np.eye(2), np.array([[1, 1j], [1j, 1]]) / math.sqrt(2)),
            _composed_v(),
        ),
    }
    for i in range(1, 5):
        m = GateMatrix(_PRINTED_M[i], name=f"M{i}")
        if not m.is_unitary():
            raise CatalogError(f"M{i} is not unitary")
        gates[f"M{i}"] = m
    for i in range(1, 5):
        gates[f"P{i}"] = _checked(f"P{i}", _PRINTED_P[i], _composed_p(i))
    gates["D"] = _checked("D", _PRINTED_D, _composed_d())
    for name, g in gates.items():
        if not g.is_unitary():
            raise CatalogError(f"{name} is not unitary (error {g.unitarity_error():.3g})")
    return MappingProxyType(gates)


def gate_w() -> GateMatrix:
    return catalog()["W"]


def gate_v() -> GateMatrix:
    return catalog()["V"]


def gate_m(i: int) -> GateMatrix:
    _check_index(i)
    return catalog()[f"M{i}"]


def gate_p(i: int) -> GateMatrix:
    _check_index(i)
    return catalog()[f"P{i}"]


def gate_d() -> GateMatrix:
    return catalog()["D"]


def oracle_index(marked: str) -> int:
    try:
        return ORACLE_FOR_LABEL[marked]
    except KeyError:
        raise ValueError(f"marked state must be one of {MARKED_LABELS}, got {marked!r}") from None


# -- measurement-feedback realization of M_i ---------------------------------

# (control value that triggers the flip, angle if target is |0>, angle if target is |1>)
_FEEDBACK = {
    1: (1, 3 * math.pi / 2, math.pi / 2),
    2: (1, math.pi / 2, 3 * math.pi / 2),
    3: (0, 3 * math.pi / 2, math.pi / 2),
    4: (0, math.pi / 2, 3 * math.pi / 2),
}


@dataclass(frozen=True)
class MeasurementRecord:
    control: int
    target: int
    probability: float
    rotation: float | None  # angle applied to the target pair, None if untriggered


def feedback_angle(i: int, control: int, target: int) -> float | None:
    trigger, angle0, angle1 = _FEEDBACK[i]
    if control != trigger:
        return None
    return angle0 if target == 0 else angle1


def feedback_unitary(i: int, control: int, target: int) -> np.ndarray:
    """4x4 logical operation applied after reading (control, target)."""
    lifted = np.eye(4, dtype=np.complex128)
    angle = feedback_angle(i, control, target)
    if angle is not None:
        block = slice(2 * control, 2 * control + 2)
        lifted[block, block] = gate_u(angle).entries
    return lifted


def apply_m_measured(
    i: int, state: StateVector, rng_seed: int
) -> tuple[MeasurementRecord, StateVector]:
    """Quantum-jump realization of M_i.

    Both pairs are read out in the computational basis (Born rule, seeded);
    if the control pair shows the triggering value, the target pair gets
    U(3pi/2) or U(pi/2) depending on the target readout. The phase of the
    measured amplitude is kept, so on basis inputs the result equals M_i
    exactly.
    """
    _check_index(i)
    if state.dim != 4:
        raise ValueError(f"measured M{i} acts on two qubits, got dimension {state.dim}")
    probs = state.probabilities()
    total = probs.sum()
    rng = np.random.default_rng(rng_seed)
    k = int(np.searchsorted(np.cumsum(probs / total), rng.random(), side="right"))
    k = min(k, 3)
    while probs[k] == 0.0:  # guard against landing on a zero-probability edge
        k -= 1
    control, target = divmod(k, 2)
    amp = state.amplitudes[k]
    collapsed = np.zeros(4, dtype=np.complex128)
    collapsed[k] = amp / abs(amp)

    rotation = feedback_angle(i, control, target)
    collapsed = feedback_unitary(i, control, target) @ collapsed
    record = MeasurementRecord(control, target, float(probs[k] / total), rotation)
    return record, StateVector(collapsed, state.basis_labels)


# -- identity ledger ----------------------------------------------------------

def _basis(k: int) -> np.ndarray:
    e = np.zeros(4, dtype=complex)
    e[k] = 1
    return e


def identity_ledger() -> list[tuple[str, float]]:
    """(description, max-entry error) for every algebraic identity the gates satisfy."""
    w, v, d = GateMatrix(_PRINTED_W), _composed_v(), GateMatrix(_PRINTED_D)
    rows: list[tuple[str, float]] = [
        ("W = U(7pi/4) (x) U(7pi/4)", max_abs_diff(_PRINTED_W, _composed_w())),
        (
            "V = I (x) U(7pi/4)",
            max_abs_diff(np.kron(np.eye(2), np.array([[1, 1j], [1j, 1]]) / math.sqrt(2)), v),
        ),
    ]
    for i in range(1, 5):
        rows.append((f"P{i} = V^dag M{i} V", max_abs_diff(_PRINTED_P[i], _composed_p(i))))
    rows.append(("D = W P1 W", max_abs_diff(_PRINTED_D, _composed_d())))
    rows.append(("W|11> = Psi1", max_abs_diff(apply(w, StateVector(_basis(3))), PSI_1)))
    rows.append(("P1 Psi1 = Psi2", max_abs_diff(_PRINTED_P[1] @ PSI_1, PSI_2)))
    rows.append(("D Psi2 = |11>", max_abs_diff(apply(d, StateVector(PSI_2)), PSI_3)))
    rows.append(
        (
            "M_i^2 = I for i = 1..4",
            max(max_abs_diff(_PRINTED_M[i] @ _PRINTED_M[i], np.eye(4)) for i in range(1, 5)),
        )
    )
    gates = [
        gate_u(PREP_ANGLE),
        w,
        v,
        d,
        *(GateMatrix(_PRINTED_M[i]) for i in range(1, 5)),
        *(GateMatrix(_PRINTED_P[i]) for i in range(1, 5)),
    ]
    rows.append(("every catalog gate unitary", max(g.unitarity_error() for g in gates)))
    return rows


# -- exact text rendering -----------------------------------------------------

_MAGNITUDES: tuple[tuple[float, str], ...] = (
    (1.0, "1"),
    (0.5, "1/2"),
    (1 / math.sqrt(2), "1/sqrt2"),
)


def _exact_part(x: float, tol: float) -> str | None:
    if abs(x) <= tol:
        return ""
    for mag, text in _MAGNITUDES:
        if abs(abs(x) - mag) <= tol:
            return ("-" if x < 0 else "") + text
    return None


def format_entry(z: complex, tol: float = EXACT_TOL) -> str:
    """Render an entry exactly when it is 0, +-1, +-1/2 or +-1/sqrt2 (times 1 or i)."""
    re, im = _exact_part(z.real, tol), _exact_part(z.imag, tol)
    if re is not None and im is not None:
        if re == "" and im == "":
            return "0"
        if im == "":
            return re
        if re == "":
            if im in ("1", "-1"):
                return im[:-1] + "i"
            sign, body = ("-", im[1:]) if im.startswith("-") else ("", im)
            return f"{sign}i{body[1:]}" if body.startswith("1/") else f"{sign}{body}i"
    return f"{z.real:.6g}{z.imag:+.6g}i"


def format_matrix(gate: GateMatrix) -> str:
    cells = [[format_entry(complex(z)) for z in row] for row in gate.entries]
    width = max(len(c) for row in cells for c in row)
    lines = ["  ".join(c.rjust(width) for c in row) for row in cells]
    return "\n".join(f"[ {line} ]" for line in lines)


GATE_BUILDERS: dict[str, Callable[[], GateMatrix]] = {
    "W": gate_w,
    "V": gate_v,
    "D": gate_d,
    **{f"M{i}": (lambda i=i: gate_m(i)) for i in range(1, 5)},
    **{f"P{i}": (lambda i=i: gate_p(i)) for i in range(1, 5)},
}
