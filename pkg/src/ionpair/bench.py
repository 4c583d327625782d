"""Sweeps and Monte Carlo experiments over delays, dephasing and oracle modes.

Trial k of grid point j always draws its randomness from
``SeedSequence(seed, spawn_key=(j, k))``, so results do not depend on the
order (or the thread) in which trials run. Per-point statistics are summed
with ``math.fsum``, which is exactly rounded and therefore order-insensitive:
serial and parallel runs agree bit for bit.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import __version__
from .grover import GroverConfig, run_grover, run_grover_bare
from .ion_model import LOGICAL_LABELS, PhysicalParams, decode, encode
from .noise import DEPHASING_KINDS, NoiseChannel, apply_dephasing
from .simcore import StateVector, fidelity

MIN_TRIALS = 100
CSV_COLUMNS = ("param", "mean", "stderr", "trials", "seed")
PLUS = StateVector(np.array([1, 1]) / math.sqrt(2), LOGICAL_LABELS)


@dataclass(frozen=True)
class BenchReport:
    experiment: str
    param_name: str
    grid: tuple
    means: tuple[float, ...]
    stderrs: tuple[float, ...]
    trials: int
    seed: int
    config: dict = field(default_factory=dict)

    def rows(self):
        for p, m, s in zip(self.grid, self.means, self.stderrs):
            yield p, m, s

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for p, m, s in self.rows():
            w.writerow([_fmt(p), _fmt(m), _fmt(s), self.trials, self.seed])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "experiment": self.experiment,
            "version": __version__,
            "seed": self.seed,
            "trials": self.trials,
            "param_name": self.param_name,
            "points": [
                {"param": p, "mean": m, "stderr": s} for p, m, s in self.rows()
            ],
            "config": self.config,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def _fmt(x) -> str:
    return repr(float(x)) if isinstance(x, (float, np.floating)) else str(x)


def trial_rng(seed: int, point: int, trial: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(point, trial)))


def summarize(samples: Sequence[float]) -> tuple[float, float]:
    """Mean and standard error (sample std-dev / sqrt(n)), both order-insensitive."""
    n = len(samples)
    mean = math.fsum(samples) / n
    if n < 2:
        return mean, 0.0
    var = math.fsum((x - mean) ** 2 for x in samples) / (n - 1)
    return mean, math.sqrt(var / n)


def run_trials(
    trial: Callable[[np.random.Generator], float],
    seed: int,
    point: int,
    trials: int,
    workers: int = 1,
) -> list[float]:
    """Evaluate ``trial`` for k = 0..trials-1, each with its own derived generator."""

    def chunk(ks):
        return [trial(trial_rng(seed, point, k)) for k in ks]

    if workers <= 1:
        return chunk(range(trials))
    bounds = np.linspace(0, trials, workers + 1).astype(int)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = pool.map(chunk, [range(a, b) for a, b in zip(bounds[:-1], bounds[1:])])
    return [x for part in parts for x in part]


def sweep_delay(
    grid: Sequence[float],
    encoding: str = "pair",
    marked: str = "|11>",
    seed: int = 0,
    params: PhysicalParams | None = None,
) -> BenchReport:
    """Grover success versus a free-evolution delay after the superposition step."""
    if len(grid) == 0:
        raise ValueError("delay grid is empty")
    if any(not (t >= 0) for t in grid):
        raise ValueError("delays must be non-negative")
    if encoding not in ("pair", "bare"):
        raise ValueError(f"encoding must be 'pair' or 'bare', got {encoding!r}")
    params = params or PhysicalParams()
    means = []
    for tau in grid:
        cfg = GroverConfig(
            marked=marked,
            level="physical" if encoding == "pair" else "logical",
            delays=(("after-prep", float(tau)),),
            params=params,
            seed=seed,
        )
        trace = run_grover(cfg) if encoding == "pair" else run_grover_bare(cfg)
        means.append(trace.success_probability)
    return BenchReport(
        experiment=f"delay-{encoding}",
        param_name="tau",
        grid=tuple(float(t) for t in grid),
        means=tuple(means),
        stderrs=tuple(0.0 for _ in grid),
        trials=1,
        seed=seed,
    )


def dephasing_trial(ch: NoiseChannel, state: StateVector = PLUS) -> Callable[[np.random.Generator], float]:
    """One trial: encode, dephase, decode, compare with the input."""
    encoded = encode(state)

    def trial(rng):
        noisy, _ = decode(apply_dephasing(encoded, ch, rng))
        return fidelity(state, noisy)

    return trial


def sweep_dephasing(
    grid: Sequence[float],
    kind: str = "collective-dephasing",
    trials: int = 1000,
    seed: int = 0,
    workers: int = 1,
) -> BenchReport:
    """Mean decoded fidelity of (|0> + |1>)/sqrt2 under gaussian dephasing of width sigma."""
    if kind not in DEPHASING_KINDS:
        raise ValueError(f"kind must be one of {DEPHASING_KINDS}, got {kind!r}")
    if len(grid) == 0:
        raise ValueError("sigma grid is empty")
    if trials < MIN_TRIALS:
        raise ValueError(f"need at least {MIN_TRIALS} trials, got {trials}")
    means, errs = [], []
    for j, sigma in enumerate(grid):
        trial = dephasing_trial(NoiseChannel(kind=kind, sigma=float(sigma)))
        mean, err = summarize(run_trials(trial, seed, j, trials, workers))
        means.append(mean)
        errs.append(err)
    return BenchReport(
        experiment=kind,
        param_name="sigma",
        grid=tuple(float(s) for s in grid),
        means=tuple(means),
        stderrs=tuple(errs),
        trials=trials,
        seed=seed,
    )


def independent_dephasing_fidelity(sigma: float) -> float:
    """Closed form E[(1 + cos(phi1 - phi2)) / 2] = (1 + exp(-sigma^2)) / 2."""
    return (1 + math.exp(-sigma**2)) / 2


def compare_oracle_modes(
    marked: str = "|11>",
    trials: int = 1000,
    seed: int = 0,
    workers: int = 1,
    level: str = "logical",
) -> BenchReport:
    """Success of the unitary oracle P_i versus its measure-and-rotate realization."""
    if trials < MIN_TRIALS:
        raise ValueError(f"need at least {MIN_TRIALS} trials, got {trials}")
    means, errs = [], []
    for j, mode in enumerate(("unitary", "measured")):

        def trial(rng, mode=mode):
            cfg = GroverConfig(
                marked=marked,
                level=level,
                oracle_mode=mode,
                seed=int(rng.integers(0, 2**63)),
            )
            return run_grover(cfg).success_probability

        mean, err = summarize(run_trials(trial, seed, j, trials, workers))
        means.append(mean)
        errs.append(err)
    return BenchReport(
        experiment="oracle-modes",
        param_name="oracle_mode",
        grid=("unitary", "measured"),
        means=tuple(means),
        stderrs=tuple(errs),
        trials=trials,
        seed=seed,
    )
