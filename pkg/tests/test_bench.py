import json
import math

import numpy as np
import pytest

from ionpair import bench
from ionpair.grover import delay_grid
from ionpair.ion_model import LOGICAL_LABELS, PairState, PhysicalParams, decode, encode, pair_rotation
from ionpair.noise import (
    NoiseChannel,
    apply_channel,
    apply_dephasing,
    apply_leakage,
    dephase_pair,
    draw_ion_phases,
)
from ionpair.simcore import StateVector, apply, equal_up_to_phase, fidelity, max_abs_diff

import oracles
from conftest import random_state

PARAMS = PhysicalParams()
PERIOD = 2 * math.pi / PARAMS.omega_eg


# -- channels ----------------------------------------------------------------------

def test_zero_sigma_is_identity():
    s = encode(StateVector([0.6, 0.8j], LOGICAL_LABELS))
    for kind in ("collective-dephasing", "independent-dephasing"):
        out = apply_dephasing(s, NoiseChannel(kind, sigma=0.0), seed=1)
        assert np.array_equal(out.amplitudes, s.amplitudes)


def test_dephasing_phase_assignment():
    out = dephase_pair(PairState([1, 1, 1, 1]), 0.3, 0.7)
    expected = [1, np.exp(-0.7j), np.exp(-0.3j), np.exp(-1.0j)]
    assert max_abs_diff(out.amplitudes, expected) <= 1e-15


def test_collective_ee_gets_double_phase():
    out = apply_dephasing(PairState([0, 0, 0, 1]), NoiseChannel(sigma=0.4, distribution="fixed"), None)
    assert out.amplitudes[3] == pytest.approx(np.exp(-0.8j), abs=1e-15)


def test_collective_fixed_phase_is_global_on_code_space(rng):
    for _ in range(200):
        s = random_state(rng, 2)
        logical = StateVector(s.amplitudes, LOGICAL_LABELS)
        phi = rng.uniform(0, 10)
        out, leak = decode(apply_dephasing(encode(logical), NoiseChannel(sigma=phi, distribution="fixed"), None))
        assert abs(fidelity(out, logical) - 1) <= 1e-12
        assert leak <= 1e-15


def test_channel_kind_checks():
    with pytest.raises(ValueError):
        NoiseChannel("amplitude-damping")
    with pytest.raises(ValueError):
        NoiseChannel(sigma=-1)
    with pytest.raises(ValueError):
        draw_ion_phases(NoiseChannel("delay-drift", tau=1.0), 1, 0)


def test_delay_drift_channel_is_free_evolution():
    s = random_state(np.random.default_rng(3), 16)
    ch = NoiseChannel("delay-drift", tau=0.37)
    out = apply_channel(s, ch, None, PARAMS)
    assert max_abs_diff(np.abs(out.amplitudes), np.abs(s.amplitudes)) <= 1e-15


def test_collective_dephasing_commutes_with_logical_gates(rng):
    for _ in range(1000):
        logical = StateVector(random_state(rng, 2).amplitudes, LOGICAL_LABELS)
        gate = pair_rotation(rng.uniform(-7, 7))
        seed = int(rng.integers(2**32))
        ch = NoiseChannel(sigma=1.0)
        before, _ = decode(apply_dephasing(encode(apply(gate, logical)), ch, seed))
        noisy, _ = decode(apply_dephasing(encode(logical), ch, seed))
        after = apply(gate, noisy)
        assert equal_up_to_phase(before, after, 1e-12)


def test_leakage_probability_bounds():
    s = random_state(np.random.default_rng(0), 16)
    with pytest.raises(ValueError):
        apply_leakage(s, 1.5, 0)
    assert apply_leakage(s, 0.0, 0) is s
    assert abs(apply_leakage(s, 1.0, 0).norm_sq() - 1) <= 1e-12


# -- statistics helpers ------------------------------------------------------------------

def test_summarize_matches_definition():
    xs = [0.1, 0.4, 0.2, 0.9, 0.5]
    mean, err = bench.summarize(xs)
    assert mean == pytest.approx(np.mean(xs), abs=1e-15)
    assert err == pytest.approx(np.std(xs, ddof=1) / math.sqrt(len(xs)), abs=1e-15)


def test_summarize_is_order_insensitive():
    xs = list(np.random.default_rng(1).random(5000))
    assert bench.summarize(xs) == bench.summarize(xs[::-1])


# -- sweeps ------------------------------------------------------------------------------

def test_delay_sweep_pair_is_flat():
    rep = bench.sweep_delay(delay_grid(32, PARAMS), "pair")
    assert max(abs(m - 1) for m in rep.means) <= 1e-12


def test_delay_sweep_bare_wraps_and_dips():
    rep = bench.sweep_delay(delay_grid(32, PARAMS), "bare")
    assert rep.means[0] == pytest.approx(1, abs=1e-12)
    assert rep.means[-1] == pytest.approx(1, abs=1e-12)
    assert min(rep.means) < 0.99


def test_delay_sweep_errors():
    with pytest.raises(ValueError):
        bench.sweep_delay([], "pair")
    with pytest.raises(ValueError):
        bench.sweep_delay([-1.0], "pair")
    with pytest.raises(ValueError):
        bench.sweep_delay([0.0], "triple")


def test_collective_sweep_is_exact():
    rep = bench.sweep_dephasing([0.0, 0.1, 1.0, 3.0], "collective-dephasing", 1000, seed=7)
    assert all(abs(m - 1) <= 1e-12 for m in rep.means)
    assert all(e <= 1e-12 for e in rep.stderrs)


def test_independent_sweep_zero_sigma():
    rep = bench.sweep_dephasing([0.0], "independent-dephasing", 200, seed=7)
    assert rep.means[0] == pytest.approx(1, abs=1e-12)


def test_independent_closed_form_matches_quadrature():
    for sigma in (0.1, 0.5, 1.0, 2.0):
        assert bench.independent_dephasing_fidelity(sigma) == pytest.approx(
            oracles.independent_dephasing_mean(sigma), abs=1e-10
        )


@pytest.mark.slow
@pytest.mark.parametrize("trials", [1_000, 10_000, 100_000])
def test_independent_sweep_converges(trials):
    rep = bench.sweep_dephasing([1.0], "independent-dephasing", trials, seed=11)
    target = oracles.independent_dephasing_mean(1.0)
    assert abs(rep.means[0] - target) <= 3 * rep.stderrs[0]
    # the sample spread of the per-trial fidelity is about 0.3, so stderr tracks 1/sqrt(n)
    assert 0.2 < rep.stderrs[0] * math.sqrt(trials) < 0.45


def test_sweep_argument_checks():
    with pytest.raises(ValueError):
        bench.sweep_dephasing([1.0], "delay-drift", 1000)
    with pytest.raises(ValueError):
        bench.sweep_dephasing([], "collective-dephasing", 1000)
    with pytest.raises(ValueError):
        bench.sweep_dephasing([1.0], "collective-dephasing", 10)
    with pytest.raises(ValueError):
        bench.compare_oracle_modes(trials=10)


def test_oracle_mode_comparison_frozen_value():
    rep = bench.compare_oracle_modes("|11>", trials=1000, seed=3)
    unitary, measured = rep.means
    assert unitary == pytest.approx(1, abs=1e-12)
    exact, _ = oracles.measured_grover_exact("|11>")
    assert measured == pytest.approx(exact, abs=1e-12)
    assert measured < 1


def test_reports_are_deterministic_and_thread_independent():
    a = bench.sweep_dephasing([0.5, 1.0], "independent-dephasing", 2000, seed=42)
    b = bench.sweep_dephasing([0.5, 1.0], "independent-dephasing", 2000, seed=42, workers=4)
    assert a.to_csv() == b.to_csv()
    assert a.to_json() == b.to_json()
    c = bench.sweep_dephasing([0.5, 1.0], "independent-dephasing", 2000, seed=43)
    assert c.to_csv() != a.to_csv()


def test_report_serialization():
    rep = bench.sweep_dephasing([0.0, 1.0], "independent-dephasing", 100, seed=1)
    lines = rep.to_csv().splitlines()
    assert lines[0] == "param,mean,stderr,trials,seed"
    assert len(lines) == 3
    param, mean, err, trials, seed = lines[2].split(",")
    assert float(mean) == rep.means[1]  # repr round-trips exactly
    assert (trials, seed) == ("100", "1")
    data = json.loads(rep.to_json())
    assert data["seed"] == 1 and data["version"]
    assert all(0 <= p["mean"] <= 1 for p in data["points"])
