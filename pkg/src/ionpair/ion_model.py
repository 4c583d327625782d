"""Physical layer for one ion pair.

A pair has the internal basis (|gg>, |ge>, |eg>, |ee>). The logical qubit
lives on the degenerate states |0> = |eg>, |1> = |ge>; |gg> and |ee> are
leakage states. The bichromatic two-photon drive rotates |eg> <-> |ge> at
the effective Rabi frequency -(eta*Omega)^2 / (nu - delta).

Energies are referenced to E(|g>) = 0 with hbar = 1, so both logical states
carry E = omega_eg. Motional states are not represented: the two-photon
process is independent of the vibrational quantum number.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass

import numpy as np

from .simcore import GateMatrix, StateVector

PHYSICAL_LABELS = ("|gg>", "|ge>", "|eg>", "|ee>")
LOGICAL_LABELS = ("|0>", "|1>")
# positions of logical |0>, |1> inside the pair basis
LOGICAL_INDEX = (2, 1)
LEAKAGE_INDEX = (0, 3)
# number of excited ions in each physical basis state
EXCITATIONS = np.array([0, 1, 1, 2])

LAMB_DICKE_MAX = 0.1
OFF_RESONANCE_FACTOR = 10.0
MIN_CODE_POPULATION = 1e-12


class RegimeError(ValueError):
    """Parameters fall outside the regime where the pair rotation is valid."""


class OffResonanceWarning(UserWarning):
    pass


@dataclass(frozen=True)
class PhysicalParams:
    """Trap and laser parameters, all frequencies in the same angular units."""

    eta: float = 0.1
    omega: float = 0.05
    nu: float = 1.0
    delta: float = 0.9
    omega_eg: float = 100.0

    def __post_init__(self):
        for name, value in asdict(self).items():
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value}")
        if self.eta <= 0:
            raise ValueError(f"eta must be positive, got {self.eta}")
        if self.omega <= 0:
            raise ValueError(f"omega must be positive, got {self.omega}")

    def violations(self) -> list[str]:
        """Hard invariant violations (nu > delta > 0)."""
        out = []
        if not self.delta > 0:
            out.append(f"delta must be positive, got {self.delta}")
        if not self.nu > self.delta:
            out.append(f"nu must exceed delta (nu={self.nu}, delta={self.delta})")
        return out


@dataclass(frozen=True)
class RegimeReport:
    lamb_dicke_ok: bool
    weak_excitation_ok: bool
    off_resonance_ok: bool
    effective_rabi: float

    @property
    def all_ok(self) -> bool:
        return self.lamb_dicke_ok and self.weak_excitation_ok and self.off_resonance_ok

    def warnings(self) -> list[str]:
        out = []
        if not self.lamb_dicke_ok:
            out.append(f"Lamb-Dicke regime violated: eta > {LAMB_DICKE_MAX}")
        if not self.weak_excitation_ok:
            out.append("weak-excitation regime violated: Omega >= nu")
        if not self.off_resonance_ok:
            out.append(f"off-resonance condition violated: nu - delta < {OFF_RESONANCE_FACTOR:g}*eta*Omega")
        return out


def effective_rabi(p: PhysicalParams) -> float:
    """Effective two-photon Rabi frequency -(Omega*eta)^2 / (nu - delta)."""
    gap = p.nu - p.delta
    if gap == 0:
        raise RegimeError(
            "nu == delta: the bichromatic detuning is resonant with the trap mode, "
            "effective Rabi frequency diverges"
        )
    value = -((p.omega * p.eta) ** 2) / gap
    if gap < 0:
        warnings.warn(
            f"nu < delta (nu - delta = {gap:g}): effective Rabi frequency is positive",
            OffResonanceWarning,
            stacklevel=2,
        )
    return value


def check_regime(p: PhysicalParams) -> RegimeReport:
    """Report regime flags without raising; callers decide what is fatal."""
    gap = p.nu - p.delta
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", OffResonanceWarning)
        rabi = effective_rabi(p) if gap != 0 else math.nan
    return RegimeReport(
        lamb_dicke_ok=p.eta <= LAMB_DICKE_MAX,
        weak_excitation_ok=p.omega < p.nu,
        off_resonance_ok=gap >= OFF_RESONANCE_FACTOR * p.eta * p.omega,
        effective_rabi=rabi,
    )


@dataclass(frozen=True)
class PulseSpec:
    theta: float
    duration: float
    params: PhysicalParams

    @property
    def realized_angle(self) -> float:
        return effective_rabi(self.params) * self.duration / 2


def calibrate_pulse(theta: float, p: PhysicalParams) -> PulseSpec:
    """Smallest strictly positive duration T with rabi*T/2 = theta (mod 2pi).

    theta = 0 maps to a full 2pi rotation period, never to T = 0.
    """
    if not math.isfinite(theta):
        raise ValueError(f"theta must be finite, got {theta}")
    if p.nu == p.delta:
        raise RegimeError("nu == delta: no finite pulse duration exists")
    report = check_regime(p)
    if not report.weak_excitation_ok:
        raise RegimeError(f"weak-excitation regime violated (Omega={p.omega} >= nu={p.nu})")
    rabi = report.effective_rabi
    if rabi == 0:
        raise RegimeError("effective Rabi frequency is zero")
    # reduce the target to the sweep direction of the drive, in (0, 2pi]
    two_pi = 2 * math.pi
    target = (theta if rabi > 0 else -theta) % two_pi
    if target == 0.0:
        target = two_pi
    return PulseSpec(theta=theta, duration=2 * target / abs(rabi), params=p)


def pair_rotation(theta: float) -> GateMatrix:
    """Logical rotation [[cos, -i sin], [-i sin, cos]] on (|0>, |1>)."""
    c, s = math.cos(theta), math.sin(theta)
    return GateMatrix(np.array([[c, -1j * s], [-1j * s, c]]), name=f"U({theta:.6g})")


@dataclass(frozen=True, eq=False)
class PairState:
    """Pure state of one ion pair over (|gg>, |ge>, |eg>, |ee>)."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=np.complex128).ravel()
        if amps.shape != (4,):
            raise ValueError(f"a pair state has 4 amplitudes, got {amps.shape[0]}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def logical_population(self) -> float:
        a = self.amplitudes
        return float(abs(a[1]) ** 2 + abs(a[2]) ** 2)

    @property
    def leakage(self) -> float:
        return max(0.0, 1.0 - self.logical_population)

    def as_state_vector(self) -> StateVector:
        return StateVector(self.amplitudes, PHYSICAL_LABELS)


def energies(omega_eg: float) -> np.ndarray:
    """Pair basis energies (0, w, w, 2w) with E(|g>) = 0."""
    return EXCITATIONS * omega_eg


def free_evolution(state: PairState, tau: float, p: PhysicalParams) -> PairState:
    if tau < 0:
        raise ValueError(f"delay must be non-negative, got {tau}")
    return PairState(state.amplitudes * np.exp(-1j * energies(p.omega_eg) * tau))


def encode(logical: StateVector) -> PairState:
    if logical.dim != 2:
        raise ValueError(f"encode expects a single logical qubit, got dimension {logical.dim}")
    amps = np.zeros(4, dtype=np.complex128)
    amps[list(LOGICAL_INDEX)] = logical.amplitudes
    return PairState(amps)


def decode(ps: PairState) -> tuple[StateVector, float]:
    """Project onto the code space; returns (renormalized logical state, leakage)."""
    code = ps.amplitudes[list(LOGICAL_INDEX)]
    pop = float(np.vdot(code, code).real)
    if pop < MIN_CODE_POPULATION:
        raise ValueError(f"state lies outside the code space (logical population {pop:.3g})")
    total = float(np.vdot(ps.amplitudes, ps.amplitudes).real)
    return StateVector(code / math.sqrt(pop), LOGICAL_LABELS), max(0.0, total - pop)


# -- bare single-ion encoding, |0> = |g>, |1> = |e> -------------------------

def bare_free_evolution(state: StateVector, tau: float, p: PhysicalParams) -> StateVector:
    """Free evolution of n bare single-ion qubits: each |1> picks up e^{-i w tau}."""
    if tau < 0:
        raise ValueError(f"delay must be non-negative, got {tau}")
    n = int(round(math.log2(state.dim)))
    excited = np.array([bin(k).count("1") for k in range(2**n)])
    return StateVector(state.amplitudes * np.exp(-1j * excited * p.omega_eg * tau), state.basis_labels)


# -- multi-pair registers ----------------------------------------------------

def register_labels(n_pairs: int) -> tuple[str, ...]:
    labels = ("",)
    for _ in range(n_pairs):
        labels = tuple(a + b for a in labels for b in PHYSICAL_LABELS)
    return labels


def code_indices(n_pairs: int) -> np.ndarray:
    """Register indices of the encoded logical basis, in logical order."""
    idx = np.zeros(1, dtype=int)
    for _ in range(n_pairs):
        idx = (4 * idx[:, None] + np.array(LOGICAL_INDEX)[None, :]).ravel()
    return idx


def _n_pairs(dim: int) -> int:
    n = int(round(math.log(dim, 4))) if dim > 1 else 0
    if 4**n != dim:
        raise ValueError(f"dimension {dim} is not a pair register")
    return n


def encode_register(logical: StateVector) -> StateVector:
    n = int(round(math.log2(logical.dim)))
    amps = np.zeros(4**n, dtype=np.complex128)
    amps[code_indices(n)] = logical.amplitudes
    return StateVector(amps, register_labels(n))


def decode_register(physical: StateVector) -> tuple[StateVector, float]:
    """Project a pair register onto its code space; returns (logical state, leakage)."""
    n = _n_pairs(physical.dim)
    code = physical.amplitudes[code_indices(n)]
    pop = float(np.vdot(code, code).real)
    if pop < MIN_CODE_POPULATION:
        raise ValueError(f"state lies outside the code space (logical population {pop:.3g})")
    return StateVector(code / math.sqrt(pop)), max(0.0, physical.norm_sq() - pop)


def embed_logical_gate(gate: GateMatrix) -> GateMatrix:
    """Lift a logical gate to the pair register, acting as identity on leakage states."""
    n = int(round(math.log2(gate.dim)))
    idx = code_indices(n)
    full = np.eye(4**n, dtype=np.complex128)
    full[np.ix_(idx, idx)] = gate.entries
    return GateMatrix(full, name=gate.name)


def register_free_evolution(state: StateVector, tau: float, p: PhysicalParams) -> StateVector:
    """Free evolution of every pair in a register for a delay tau."""
    if tau < 0:
        raise ValueError(f"delay must be non-negative, got {tau}")
    n = _n_pairs(state.dim)
    excitations = np.zeros(1)
    for _ in range(n):
        excitations = (excitations[:, None] + EXCITATIONS[None, :]).ravel()
    return StateVector(
        state.amplitudes * np.exp(-1j * excitations * p.omega_eg * tau), state.basis_labels
    )
