import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qlif_forecast import qsim
from qlif_forecast.qlif import decode_angle, qlif_update
from qlif_forecast.qsim import GROUND, QubitState, apply_rx, measure_p1, run_circuit, sample_shots

angles = st.floats(-4 * math.pi, 4 * math.pi, allow_nan=False)

# mpmath, 30 digits: sin^2((phi + theta)/2) for the three reference circuits
EXACT = (0.15164664532641188, 0.7080734182735712, 0.9682283436453982)


def _close(a: QubitState, b: QubitState, tol=1e-12):
    return abs(a.amp0 - b.amp0) < tol and abs(a.amp1 - b.amp1) < tol


def test_rx_zero_is_identity():
    s = QubitState(0.6, 0.8j)
    assert apply_rx(s, 0.0) == s


def test_rx_pi_flips_ground():
    assert measure_p1(apply_rx(GROUND, math.pi)) == pytest.approx(1.0, abs=1e-15)


@given(angles, angles)
def test_rotations_compose(a, b):
    assert _close(run_circuit([a, b]), apply_rx(GROUND, a + b))


@given(angles)
def test_single_rotation_probability(a):
    assert measure_p1(apply_rx(GROUND, a)) == pytest.approx(math.sin(a / 2) ** 2, abs=1e-14)


def test_norm_preserved_over_a_million_gates():
    rng = np.random.default_rng(0)
    state = GROUND
    for a in rng.uniform(-math.pi, math.pi, 1_000_000):
        state = apply_rx(state, float(a))
    assert abs(state.norm - 1.0) < 1e-10


def test_simulator_equals_closed_form_on_random_pairs():
    rng = np.random.default_rng(1)
    worst = 0.0
    for phi, theta in rng.uniform(-2 * math.pi, 2 * math.pi, size=(10_000, 2)):
        worst = max(worst, abs(measure_p1(run_circuit([phi, theta])) - qlif_update(phi, theta)))
    assert worst < 1e-12


def test_encoding_rotation_reproduces_probability():
    for alpha in np.linspace(0, 1, 21):
        phi = 2 * math.asin(math.sqrt(alpha))
        assert measure_p1(apply_rx(GROUND, phi)) == pytest.approx(alpha, abs=1e-14)
        assert decode_angle(phi) == pytest.approx(alpha, abs=1e-14)


def test_reference_circuits():
    for (label, phi, theta, sim, _), exact in zip(qsim.REFERENCE_CASES, EXACT):
        p = measure_p1(run_circuit([phi, theta]))
        assert p == pytest.approx(exact, abs=1e-12), label
        assert round(p, 4) == sim
    avg = sum(EXACT) / 3
    assert round(avg, 4) == qsim.REFERENCE_SIM_AVERAGE


def test_hardware_column_is_only_a_comparison():
    # the hardware values deviate from the ideal circuit by more than shot noise alone allows at 1000 shots
    devs = [abs(qpu - e) for (*_, qpu), e in zip(qsim.REFERENCE_CASES, EXACT)]
    assert max(devs) > 0.01
    assert round(sum(c[4] for c in qsim.REFERENCE_CASES) / 3, 4) == qsim.REFERENCE_QPU_AVERAGE


def test_sampling_is_reproducible():
    s = run_circuit([1.2, 0.8])
    assert sample_shots(s, 1000, 7) == sample_shots(s, 1000, 7)


def test_sampling_degenerate_probabilities():
    assert sample_shots(GROUND, 500, 3).ones == 0
    assert sample_shots(apply_rx(GROUND, math.pi), 500, 3).ones == 500


def test_zero_shots_rejected():
    with pytest.raises(ValueError):
        sample_shots(GROUND, 0, 0)


@pytest.mark.parametrize("case", range(3))
def test_shot_estimates_within_three_sigma(case):
    _, phi, theta, _, _ = qsim.REFERENCE_CASES[case]
    state = run_circuit([phi, theta])
    p = EXACT[case]
    bound = 3 * math.sqrt(p * (1 - p) / 1000)
    inside = sum(abs(sample_shots(state, 1000, s).p1_hat - p) <= bound for s in range(1000))
    assert inside >= 990


@settings(max_examples=50)
@given(st.integers(1, 5000), st.integers(0, 2**31))
def test_shot_count_bounded(shots, seed):
    r = sample_shots(run_circuit([0.5, 0.3]), shots, seed)
    assert 0 <= r.ones <= shots
    assert 0.0 <= r.p1_hat <= 1.0
