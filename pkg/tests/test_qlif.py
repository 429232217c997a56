import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import central_diff, qlif_sequential, rel_err
from qlif_forecast.errors import StaleCacheError
from qlif_forecast.qlif import (
    QlifHyper,
    QlifLayerParams,
    decay_angle,
    decode_angle,
    encode_state,
    qlif_layer_backward,
    qlif_layer_forward,
    qlif_update,
)
from qlif_forecast.surrogate import surrogate_grad, surrogate_value

angles = st.floats(-20, 20, allow_nan=False)
probs = st.floats(0, 1, allow_nan=False)


def test_encode_examples():
    assert encode_state(0.0) == 0.0
    assert encode_state(0.5) == pytest.approx(math.pi / 2, abs=1e-15)
    # mpmath, 30 digits: 2*asin(sqrt(0.25)) = pi/3
    assert encode_state(0.25) == pytest.approx(1.0471975511965977, abs=1e-15)


def test_encode_tolerates_roundoff_but_rejects_real_violations():
    assert encode_state(1.0 + 5e-10) == pytest.approx(math.pi)
    assert encode_state(-5e-10) == 0.0
    with pytest.raises(ValueError):
        encode_state(1.0 + 1e-6)
    with pytest.raises(ValueError):
        encode_state(-1e-6)


def test_decode_examples():
    assert decode_angle(0.0) == 0.0
    assert decode_angle(math.pi) == pytest.approx(1.0, abs=1e-15)
    assert round(float(decode_angle(0.8)), 4) == 0.1516


@pytest.mark.parametrize(
    "phi,theta,published",
    [(0.5, 0.3, 0.1516), (1.2, 0.8, 0.7081), (2.0, 1.5, 0.9682)],
)
def test_qlif_update_matches_published_simulator_column(phi, theta, published):
    assert round(float(qlif_update(phi, theta)), 4) == published


def test_reference_identities():
    assert qlif_update(0.5, 0.3) == pytest.approx(math.sin(0.4) ** 2, abs=1e-15)
    assert qlif_update(1.2, 0.8) == pytest.approx(math.sin(1.0) ** 2, abs=1e-15)
    assert qlif_update(2.0, 1.5) == pytest.approx(math.sin(1.75) ** 2, abs=1e-15)


def test_decay_angle_examples():
    assert decay_angle(0.0, 5.0, 10.0) == 0.0
    # mpmath: -2*asin(sqrt(0.5*exp(-1))) = -0.886509496034084...
    assert decay_angle(0.5, 10.0, 10.0) == pytest.approx(-0.8865094960340844, abs=1e-14)
    with pytest.raises(ValueError):
        decay_angle(1.5, 1.0, 10.0)


def test_decay_limits_of_literal_composition():
    alpha = 0.6
    phi = encode_state(alpha)
    # tau = 0: the relaxation angle undoes the encoding entirely
    assert qlif_update(phi, decay_angle(alpha, 0.0, 10.0)) == pytest.approx(0.0, abs=1e-15)
    # tau -> infinity: no rotation, state preserved
    assert qlif_update(phi, decay_angle(alpha, 1e6, 10.0)) == pytest.approx(alpha, abs=1e-12)
    assert qlif_update(encode_state(1.0), decay_angle(1.0, 1e6, 10.0)) == pytest.approx(1.0, abs=1e-12)


def test_surrogate_examples():
    assert surrogate_value(0.0) == 0.5
    assert surrogate_value(1e12) == pytest.approx(1.0, abs=1e-12)
    # mpmath: atan(pi)/pi + 0.5
    assert surrogate_value(1.0) == pytest.approx(0.9019067380477063, abs=1e-15)
    assert surrogate_grad(0.0) == 1.0
    # mpmath: 1/(1+pi^2)
    assert surrogate_grad(1.0) == pytest.approx(0.09199966835037523, abs=1e-15)


def test_surrogate_grad_is_derivative_of_value():
    u = np.linspace(-10, 10, 4001)
    h = 1e-5
    fd = (surrogate_value(u + h) - surrogate_value(u - h)) / (2 * h)
    assert np.max(np.abs(surrogate_grad(u) - fd)) < 1e-6


@given(st.floats(-1e6, 1e6, allow_nan=False))
def test_surrogate_grad_even(u):
    assert surrogate_grad(u) == surrogate_grad(-u)


@given(probs)
def test_encode_decode_roundtrip(a):
    assert abs(decode_angle(encode_state(a)) - a) < 1e-12


@given(angles, angles)
def test_update_is_probability(phi, theta):
    assert 0.0 <= qlif_update(phi, theta) <= 1.0


def test_params_count():
    p = QlifLayerParams.init(48, 48, np.random.default_rng(0))
    assert p.n_params == 2400
    assert p.kernel.shape == (48, 48)
    assert np.all((p.theta >= 0.1) & (p.theta <= 1.0))
    assert np.all(p.tau_raw == 5.0)


def test_hyper_validation():
    with pytest.raises(ValueError):
        QlifHyper(threshold=1.0)
    with pytest.raises(ValueError):
        QlifHyper(t1=0.0)
    assert QlifHyper().center == 0.75
    assert QlifHyper(surrogate_center="zero").center == 0.0


def test_zero_kernel_gives_no_spikes():
    p = QlifLayerParams(np.zeros((3, 4)), np.ones(4), np.full(4, 5.0))
    spikes, cache = qlif_layer_forward(np.zeros((2, 5, 3)), p)
    assert not spikes.any()
    assert not cache["gates"].any()
    assert np.all(cache["alpha_new"] == 0.0)


def test_full_rotation_from_ground_spikes_and_resets():
    # theta * a = pi from alpha = 0 -> alpha_new = 1
    p = QlifLayerParams(np.array([[1.0]]), np.array([math.pi]), np.array([5.0]))
    x = np.zeros((1, 3, 1))
    x[0, 0, 0] = 1.0
    spikes, cache = qlif_layer_forward(x, p)
    assert cache["alpha_new"][0, 0, 0] == pytest.approx(1.0)
    assert spikes[0, 0, 0] == 1.0
    # reset: next step has no drive and starts from alpha = 0, so nothing to decay
    assert cache["phi_prev"][0, 1, 0] == 0.0
    assert cache["alpha_new"][0, 1, 0] == 0.0


def test_shape_mismatch():
    p = QlifLayerParams.init(3, 4, np.random.default_rng(0))
    with pytest.raises(ValueError):
        qlif_layer_forward(np.zeros((2, 5, 4)), p)


def _instance(rng, B, T, n_in, n, scale=2.0):
    x = rng.normal(size=(B, T, n_in))
    p = QlifLayerParams.init(n_in, n, rng)
    p.kernel *= scale
    p.tau_raw = rng.uniform(0.5, 12.0, n)
    return x, p


@pytest.mark.parametrize("seed", range(5))
def test_batched_equals_sequential(seed):
    rng = np.random.default_rng(seed)
    x, p = _instance(rng, 2, 5, 3, 3)
    spikes, cache = qlif_layer_forward(x, p)
    ref, _ = qlif_sequential(x, p.kernel, p.theta, p.tau_raw)
    assert np.array_equal(spikes, ref)
    relaxed, _ = qlif_sequential(x, p.kernel, p.theta, p.tau_raw, relaxed=True)
    assert np.max(np.abs(surrogate_value(cache["u"]) - relaxed)) < 1e-12


def test_spike_reset_property(rng):
    x, p = _instance(rng, 8, 30, 6, 10, scale=4.0)
    spikes, cache = qlif_layer_forward(x, p)
    assert spikes.sum() > 0
    after_spike = spikes[:, :-1] > 0
    assert np.all(cache["phi_prev"][:, 1:][after_spike] == 0.0)


def _relaxed_loss(x, p, w, hyper=QlifHyper()):
    out, decisions = qlif_sequential(x, p.kernel, p.theta, p.tau_raw, hyper.threshold, hyper.t1, hyper.center, relaxed=True)
    return float((w * out).sum()), decisions


def _check_fd(x, p, w, hyper=QlifHyper(), tol=1e-4):
    _, cache = qlif_layer_forward(x, p, hyper)
    dx, grads = qlif_layer_backward(cache, w)
    _, base_decisions = _relaxed_loss(x, p, w, hyper)
    errors = {}
    for name in ("kernel", "theta", "tau_raw"):
        arr = getattr(p, name)
        fd = central_diff(lambda: _relaxed_loss(x, p, w, hyper)[0], arr)
        errors[name] = rel_err(getattr(grads, name), fd)
    errors["x"] = rel_err(dx, central_diff(lambda: _relaxed_loss(x, p, w, hyper)[0], x))
    # no gate or spike decision may sit within eps of its boundary
    for name in ("kernel", "theta", "tau_raw"):
        arr = getattr(p, name)
        arr += 1e-6
        assert _relaxed_loss(x, p, w, hyper)[1] == base_decisions
        arr -= 2e-6
        assert _relaxed_loss(x, p, w, hyper)[1] == base_decisions
        arr += 1e-6
    return errors


def test_single_step_theta_gradient():
    x = np.array([[[0.8]]])
    p = QlifLayerParams(np.array([[1.3]]), np.array([0.9]), np.array([5.0]))
    w = np.ones((1, 1, 1))
    errors = _check_fd(x, p, w)
    assert errors["theta"] < 1e-4


def test_kernel_gradient_small_instance():
    rng = np.random.default_rng(7)
    x, p = _instance(rng, 2, 3, 2, 2)
    errors = _check_fd(x, p, rng.normal(size=(2, 3, 2)))
    assert all(e < 1e-4 for e in errors.values()), errors


@pytest.mark.parametrize("center", ["threshold", "zero"])
def test_gradients_both_surrogate_centers(center):
    rng = np.random.default_rng(11)
    x, p = _instance(rng, 2, 6, 3, 4)
    errors = _check_fd(x, p, rng.normal(size=(2, 6, 4)), QlifHyper(surrogate_center=center))
    assert all(e < 1e-4 for e in errors.values()), errors


def test_clamped_tau_gets_no_gradient():
    rng = np.random.default_rng(2)
    x, p = _instance(rng, 2, 6, 3, 4)
    p.tau_raw[:] = -1.0
    _, cache = qlif_layer_forward(x, p)
    _, grads = qlif_layer_backward(cache, rng.normal(size=(2, 6, 4)))
    assert np.all(grads.tau_raw == 0.0)


def test_zero_grad_out_gives_zero_gradients(rng):
    x, p = _instance(rng, 2, 5, 3, 4)
    _, cache = qlif_layer_forward(x, p)
    dx, g = qlif_layer_backward(cache, np.zeros((2, 5, 4)))
    assert not dx.any() and not g.kernel.any() and not g.theta.any() and not g.tau_raw.any()


def test_cache_is_single_use(rng):
    x, p = _instance(rng, 2, 5, 3, 4)
    _, cache = qlif_layer_forward(x, p)
    qlif_layer_backward(cache, np.ones((2, 5, 4)))
    with pytest.raises(StaleCacheError):
        qlif_layer_backward(cache, np.ones((2, 5, 4)))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_alpha_stays_in_unit_interval(seed):
    rng = np.random.default_rng(seed)
    x, p = _instance(rng, 3, 10, 4, 5, scale=rng.uniform(0.1, 6.0))
    p.theta = rng.uniform(-3, 3, 5)
    _, cache = qlif_layer_forward(x, p)
    assert np.all((cache["alpha_new"] >= 0) & (cache["alpha_new"] <= 1))
