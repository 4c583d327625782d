"""Stochastic phase noise on ion pairs.

Each ion picks up a phase e^{-i phi} on its excited state. Collective noise
draws one phi per pair (both ions sit well inside one wavelength of the
noise field), independent noise draws one phi per ion. A static leakage knob
applies a random two-ion Pauli to a pair with a fixed probability.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .ion_model import PairState, PhysicalParams, free_evolution, register_free_evolution
from .simcore import StateVector

CHANNEL_KINDS = ("collective-dephasing", "independent-dephasing", "delay-drift")
DEPHASING_KINDS = CHANNEL_KINDS[:2]
DISTRIBUTIONS = ("gaussian", "fixed")


@dataclass(frozen=True)
class NoiseChannel:
    """Phase-noise channel.

    With ``distribution="fixed"`` the phases are deterministic: +sigma on
    every ion for the collective kind, and +sigma / -sigma on the first /
    second ion of each pair for the independent kind.
    """

    kind: str = "collective-dephasing"
    sigma: float = 0.0
    tau: float = 0.0
    distribution: str = "gaussian"

    def __post_init__(self):
        if self.kind not in CHANNEL_KINDS:
            raise ValueError(f"unknown channel kind {self.kind!r}; expected one of {CHANNEL_KINDS}")
        if self.distribution not in DISTRIBUTIONS:
            raise ValueError(f"unknown distribution {self.distribution!r}")
        if not (self.sigma >= 0 and math.isfinite(self.sigma)):
            raise ValueError(f"sigma must be finite and non-negative, got {self.sigma}")
        if not (self.tau >= 0 and math.isfinite(self.tau)):
            raise ValueError(f"tau must be finite and non-negative, got {self.tau}")

    @property
    def is_stochastic(self) -> bool:
        return self.kind in DEPHASING_KINDS and self.distribution == "gaussian" and self.sigma > 0


def _rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def draw_ion_phases(ch: NoiseChannel, n_pairs: int, seed) -> np.ndarray:
    """Per-ion phases, ordered (pair1 ion1, pair1 ion2, pair2 ion1, ...)."""
    if ch.kind not in DEPHASING_KINDS:
        raise ValueError(f"{ch.kind!r} is not a dephasing channel")
    if ch.distribution == "fixed":
        if ch.kind == "collective-dephasing":
            return np.full(2 * n_pairs, ch.sigma)
        return np.tile([ch.sigma, -ch.sigma], n_pairs)
    rng = _rng(seed)
    if ch.kind == "collective-dephasing":
        return np.repeat(rng.normal(0.0, ch.sigma, size=n_pairs), 2)
    return rng.normal(0.0, ch.sigma, size=2 * n_pairs)


def ion_phase_factors(phases: np.ndarray) -> np.ndarray:
    """Diagonal of the phase map exp(-i sum_j phi_j n_j) over the register basis."""
    n_ions = len(phases)
    occupations = (np.arange(2**n_ions)[:, None] >> np.arange(n_ions - 1, -1, -1)[None, :]) & 1
    return np.exp(-1j * (occupations @ np.asarray(phases, dtype=float)))


def dephase_pair(state: PairState, phi1: float, phi2: float) -> PairState:
    return PairState(state.amplitudes * ion_phase_factors(np.array([phi1, phi2])))


def apply_dephasing(state: PairState, ch: NoiseChannel, seed) -> PairState:
    phi1, phi2 = draw_ion_phases(ch, 1, seed)
    return dephase_pair(state, phi1, phi2)


def apply_channel(state: StateVector, ch: NoiseChannel, seed, params: PhysicalParams) -> StateVector:
    """Apply any channel kind to a pair register (dimension 4**n)."""
    if ch.kind == "delay-drift":
        return register_free_evolution(state, ch.tau, params)
    n_pairs = int(round(math.log(state.dim, 4)))
    phases = draw_ion_phases(ch, n_pairs, seed)
    return StateVector(state.amplitudes * ion_phase_factors(phases), state.basis_labels)


def drift_pair(state: PairState, ch: NoiseChannel, params: PhysicalParams) -> PairState:
    if ch.kind != "delay-drift":
        raise ValueError(f"{ch.kind!r} is not a delay-drift channel")
    return free_evolution(state, ch.tau, params)


_PAULIS = (
    np.eye(2),
    np.array([[0, 1], [1, 0]]),
    np.array([[0, -1j], [1j, 0]]),
    np.diag([1, -1]),
)


def apply_leakage(state: StateVector, prob: float, seed) -> StateVector:
    """With probability ``prob`` per pair, apply a uniformly random two-ion Pauli.

    This unravels a two-ion depolarizing channel; X or Y on one ion moves a
    code state onto |gg> or |ee>.
    """
    if not 0 <= prob <= 1:
        raise ValueError(f"leakage probability must lie in [0, 1], got {prob}")
    if prob == 0:
        return state
    rng = _rng(seed)
    n_pairs = int(round(math.log(state.dim, 4)))
    op = np.ones((1, 1))
    for _ in range(n_pairs):
        if rng.random() < prob:
            a, b = rng.integers(0, 4, size=2)
            local = np.kron(_PAULIS[a], _PAULIS[b])
        else:
            local = np.eye(4)
        op = np.kron(op, local)
    return StateVector(op @ state.amplitudes, state.basis_labels)
