"""Two-qubit Grover search with pair-encoded (or bare) qubits.

The sequence is fixed: start in |11> = |ge>_1 |ge>_2, apply W = U(7pi/4)
on both pairs, flip the marked amplitude with P_i, then apply the diffusion
D = W P_1 W. Only the oracle depends on the marked state. Optional delays
and noise sit in the two gaps between operations: after the superposition
step ("after-prep") and after the oracle ("after-oracle").
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import gates
from .ion_model import (
    PhysicalParams,
    bare_free_evolution,
    code_indices,
    decode_register,
    embed_logical_gate,
    encode_register,
    register_free_evolution,
    register_labels,
)
from .noise import NoiseChannel, apply_channel, apply_leakage
from .simcore import PIPELINE_TOL, GateMatrix, StateVector, apply, dagger, max_abs_diff

LEVELS = ("logical", "physical")
ORACLE_MODES = ("unitary", "measured")
POSITIONS = ("after-prep", "after-oracle")
INITIAL_LABEL = "|11>"

# spawn keys separating the independent random streams of one run
_STREAM_MEASURE, _STREAM_NOISE, _STREAM_LEAK = 0, 1, 2


def normalize_label(label: str) -> str:
    bits = label.strip().strip("|>")
    out = f"|{bits}>"
    if out not in gates.MARKED_LABELS:
        raise ValueError(f"marked state must be one of {gates.MARKED_LABELS}, got {label!r}")
    return out


@dataclass(frozen=True)
class GroverConfig:
    marked: str = "|11>"
    level: str = "logical"
    delays: tuple[tuple[str, float], ...] = ()
    oracle_mode: str = "unitary"
    seed: int | None = None
    params: PhysicalParams = field(default_factory=PhysicalParams)
    noise: tuple[tuple[str, NoiseChannel], ...] = ()
    leakage_prob: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "marked", normalize_label(self.marked))
        object.__setattr__(self, "delays", tuple((str(p), float(t)) for p, t in self.delays))
        object.__setattr__(self, "noise", tuple(tuple(n) for n in self.noise))
        if self.level not in LEVELS:
            raise ValueError(f"level must be one of {LEVELS}, got {self.level!r}")
        if self.oracle_mode not in ORACLE_MODES:
            raise ValueError(f"oracle_mode must be one of {ORACLE_MODES}, got {self.oracle_mode!r}")
        for pos, tau in self.delays:
            if pos not in POSITIONS:
                raise ValueError(f"delay position must be one of {POSITIONS}, got {pos!r}")
            if not (tau >= 0 and math.isfinite(tau)):
                raise ValueError(f"delay must be finite and non-negative, got {tau}")
        for pos, ch in self.noise:
            if pos not in POSITIONS:
                raise ValueError(f"noise position must be one of {POSITIONS}, got {pos!r}")
            if not isinstance(ch, NoiseChannel):
                raise TypeError(f"noise entries must be NoiseChannel, got {type(ch).__name__}")
        if not 0 <= self.leakage_prob <= 1:
            raise ValueError(f"leakage_prob must lie in [0, 1], got {self.leakage_prob}")
        if self.level == "logical" and (self.noise or self.leakage_prob):
            raise ValueError("noise and leakage act on ions; use level='physical'")
        if self.seed is None and self.needs_seed:
            raise ValueError("a seed is required for measured oracles, stochastic noise or leakage")

    @property
    def needs_seed(self) -> bool:
        return (
            self.oracle_mode == "measured"
            or self.leakage_prob > 0
            or any(ch.is_stochastic for _, ch in self.noise)
        )


@dataclass(frozen=True)
class TraceStep:
    gate: str
    state: StateVector


@dataclass(frozen=True)
class GroverTrace:
    marked: str
    level: str
    encoding: str
    steps: tuple[TraceStep, ...]
    success_probability: float
    leakage_final: float = 0.0
    measurements: tuple[gates.MeasurementRecord, ...] = ()

    @property
    def final_state(self) -> StateVector:
        return self.steps[-1].state

    def to_dict(self) -> dict:
        return {
            "marked": self.marked,
            "level": self.level,
            "encoding": self.encoding,
            "success": self.success_probability,
            "leakage": self.leakage_final,
            "steps": [
                {
                    "gate": s.gate,
                    "state": [[float(z.real), float(z.imag)] for z in s.state.amplitudes],
                }
                for s in self.steps
            ],
            "measurements": [
                {
                    "control": m.control,
                    "target": m.target,
                    "probability": m.probability,
                    "rotation": m.rotation,
                }
                for m in self.measurements
            ],
        }

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    @classmethod
    def from_dict(cls, data: dict) -> GroverTrace:
        steps = []
        for s in data["steps"]:
            amps = np.array([complex(re, im) for re, im in s["state"]])
            labels = register_labels(2) if len(amps) == 16 else ()
            steps.append(TraceStep(s["gate"], StateVector(amps, labels)))
        measurements = tuple(gates.MeasurementRecord(**m) for m in data.get("measurements", ()))
        return cls(
            marked=data["marked"],
            level=data.get("level", "logical"),
            encoding=data.get("encoding", "pair"),
            steps=tuple(steps),
            success_probability=data["success"],
            leakage_final=data.get("leakage", 0.0),
            measurements=measurements,
        )


def _stream(cfg: GroverConfig, *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(cfg.seed, spawn_key=key))


def _initial_logical() -> StateVector:
    return StateVector.basis(INITIAL_LABEL, gates.MARKED_LABELS)


def marked_population(state: StateVector, marked: str) -> float:
    """|<marked|state>|^2 for a logical state or a pair register."""
    k = gates.MARKED_LABELS.index(marked)
    if state.dim == 16:
        k = int(code_indices(2)[k])
    return float(abs(state.amplitudes[k]) ** 2)


def _measured_oracle_logical(i: int, state: StateVector, rng) -> tuple[StateVector, gates.MeasurementRecord]:
    v = gates.gate_v()
    seed = int(rng.integers(0, 2**63))
    record, after = gates.apply_m_measured(i, apply(v, state), seed)
    return apply(dagger(v), after), record


def _measured_oracle_physical(i: int, state: StateVector, rng) -> tuple[StateVector, gates.MeasurementRecord]:
    """Read out every ion; feed back on the target pair only if both pairs read as code states."""
    v = embed_logical_gate(gates.gate_v())
    pre = apply(v, state)
    probs = pre.probabilities()
    total = probs.sum()
    k = int(np.searchsorted(np.cumsum(probs / total), rng.random(), side="right"))
    k = min(k, len(probs) - 1)
    while probs[k] == 0.0:
        k -= 1
    amp = pre.amplitudes[k]
    collapsed = np.zeros(16, dtype=np.complex128)
    collapsed[k] = amp / abs(amp)
    code = list(code_indices(2))
    if k in code:
        control, target = divmod(code.index(k), 2)
        fb = embed_logical_gate(GateMatrix(gates.feedback_unitary(i, control, target)))
        collapsed = fb.entries @ collapsed
        record = gates.MeasurementRecord(
            control, target, float(probs[k] / total), gates.feedback_angle(i, control, target)
        )
    else:
        record = gates.MeasurementRecord(-1, -1, float(probs[k] / total), None)
    return apply(dagger(v), StateVector(collapsed, state.basis_labels)), record


def run_grover(cfg: GroverConfig) -> GroverTrace:
    """Run the pair-encoded search at the logical or physical level."""
    physical = cfg.level == "physical"
    i = gates.oracle_index(cfg.marked)
    lift = embed_logical_gate if physical else (lambda g: g)
    steps: list[TraceStep] = []
    measurements: list[gates.MeasurementRecord] = []

    state = _initial_logical()
    if physical:
        state = encode_register(state)
    steps.append(TraceStep("prepare", state))

    def record(name, s):
        steps.append(TraceStep(name, s))
        return s

    def leak(s, step_no):
        if physical and cfg.leakage_prob > 0:
            return apply_leakage(s, cfg.leakage_prob, _stream(cfg, _STREAM_LEAK, step_no))
        return s

    def gap(s, position):
        for tau in (t for p, t in cfg.delays if p == position):
            if physical:
                s = register_free_evolution(s, tau, cfg.params)
            else:
                # on the code space the pair-encoded delay is the global phase e^{-2i w tau}
                s = StateVector(s.amplitudes * np.exp(-2j * cfg.params.omega_eg * tau), s.basis_labels)
            s = record(f"delay({position}, tau={tau:g})", s)
        for j, (p, ch) in enumerate(cfg.noise):
            if p == position:
                s = apply_channel(s, ch, _stream(cfg, _STREAM_NOISE, j), cfg.params)
                s = record(f"noise({position}, {ch.kind})", s)
        return s

    state = record("W", leak(apply(lift(gates.gate_w()), state), 0))
    state = gap(state, "after-prep")
    if cfg.oracle_mode == "unitary":
        state = apply(lift(gates.gate_p(i)), state)
    else:
        rng = _stream(cfg, _STREAM_MEASURE)
        oracle = _measured_oracle_physical if physical else _measured_oracle_logical
        state, rec = oracle(i, state, rng)
        measurements.append(rec)
    state = record(f"P{i}" if cfg.oracle_mode == "unitary" else f"P{i}(measured)", leak(state, 1))
    state = gap(state, "after-oracle")
    state = record("D", leak(apply(lift(gates.gate_d()), state), 2))

    leakage = 0.0
    if physical:
        code = state.amplitudes[code_indices(2)]
        leakage = max(0.0, state.norm_sq() - float(np.vdot(code, code).real))
    return GroverTrace(
        marked=cfg.marked,
        level=cfg.level,
        encoding="pair",
        steps=tuple(steps),
        success_probability=marked_population(state, cfg.marked),
        leakage_final=leakage,
        measurements=tuple(measurements),
    )


def run_grover_bare(cfg: GroverConfig) -> GroverTrace:
    """Same gate sequence on single-ion qubits |0> = |g>, |1> = |e>.

    Delays multiply the |1> component of each qubit by e^{-i w tau}, so they
    change relative phases between basis states.
    """
    if cfg.noise or cfg.leakage_prob:
        raise ValueError("noise and leakage are only modelled for the pair encoding")
    i = gates.oracle_index(cfg.marked)
    steps = [TraceStep("prepare", _initial_logical())]
    measurements = []
    state = steps[0].state

    def gap(s, position):
        for tau in (t for p, t in cfg.delays if p == position):
            s = bare_free_evolution(s, tau, cfg.params)
            steps.append(TraceStep(f"delay({position}, tau={tau:g})", s))
        return s

    state = apply(gates.gate_w(), state)
    steps.append(TraceStep("W", state))
    state = gap(state, "after-prep")
    if cfg.oracle_mode == "unitary":
        state = apply(gates.gate_p(i), state)
        steps.append(TraceStep(f"P{i}", state))
    else:
        state, rec = _measured_oracle_logical(i, state, _stream(cfg, _STREAM_MEASURE))
        measurements.append(rec)
        steps.append(TraceStep(f"P{i}(measured)", state))
    state = gap(state, "after-oracle")
    state = apply(gates.gate_d(), state)
    steps.append(TraceStep("D", state))
    return GroverTrace(
        marked=cfg.marked,
        level="logical",
        encoding="bare",
        steps=tuple(steps),
        success_probability=marked_population(state, cfg.marked),
        measurements=tuple(measurements),
    )


@dataclass(frozen=True)
class TraceReport:
    passed: bool
    failures: tuple[tuple[int, str], ...] = ()

    def __str__(self):
        if self.passed:
            return "trace OK"
        return "\n".join(f"step {k}: {msg}" for k, msg in self.failures)


_CANONICAL = (("W", gates.PSI_1), ("P1", gates.PSI_2), ("D", gates.PSI_3))


def verify_trace(trace: GroverTrace, tol: float = PIPELINE_TOL) -> TraceReport:
    """Re-check a trace: step norms, success probability, and the |11> reference states."""
    failures: list[tuple[int, str]] = []
    for k, step in enumerate(trace.steps):
        err = abs(step.state.norm_sq() - 1)
        if err > tol:
            failures.append((k, f"{step.gate}: norm off by {err:.3g}"))
    recomputed = marked_population(trace.final_state, trace.marked)
    if abs(recomputed - trace.success_probability) > tol:
        failures.append(
            (
                len(trace.steps) - 1,
                f"success {trace.success_probability!r} disagrees with final state ({recomputed!r})",
            )
        )
    names = [s.gate for s in trace.steps]
    if trace.marked == "|11>" and names == ["prepare", "W", "P1", "D"]:
        for k, (name, expected) in enumerate(_CANONICAL, start=1):
            state = trace.steps[k].state
            if state.dim == 16:
                state, leak = decode_register(state)
                if leak > tol:
                    failures.append((k, f"{name}: leakage {leak:.3g}"))
            err = max_abs_diff(state, expected)
            if err > tol:
                failures.append((k, f"{name}: deviates from reference state by {err:.3g}"))
    return TraceReport(passed=not failures, failures=tuple(failures))


def decoded_steps(trace: GroverTrace) -> list[StateVector]:
    """Logical view of every step (physical traces are projected onto the code space)."""
    return [decode_register(s.state)[0] if s.state.dim == 16 else s.state for s in trace.steps]


def delay_grid(n_points: int, params: PhysicalParams, periods: float = 1.0) -> np.ndarray:
    """n_points delays spanning [0, periods * 2pi / omega_eg], endpoints included."""
    if n_points < 1:
        raise ValueError("delay grid needs at least one point")
    return np.linspace(0.0, periods * 2 * math.pi / params.omega_eg, n_points)


def run(cfg: GroverConfig, encoding: str = "pair") -> GroverTrace:
    if encoding == "pair":
        return run_grover(cfg)
    if encoding == "bare":
        return run_grover_bare(cfg)
    raise ValueError(f"encoding must be 'pair' or 'bare', got {encoding!r}")


def success_curve(taus: Sequence[float], encoding: str, marked: str, params: PhysicalParams) -> np.ndarray:
    level = "physical" if encoding == "pair" else "logical"
    return np.array(
        [
            run(
                GroverConfig(marked=marked, level=level, delays=(("after-prep", float(t)),), params=params),
                encoding,
            ).success_probability
            for t in taus
        ]
    )
