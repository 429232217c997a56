"""Quantum leaky integrate-and-fire (QLIF) neurons.

Each neuron keeps its excitation as the |1> probability ``alpha`` of a single
qubit. A timestep prepares ``Rx(phi)|0>`` with ``phi`` encoding the current
excitation, applies ``Rx(theta_input)`` and reads back
``sin^2((phi + theta_input) / 2)``. Because the circuit is a pair of X
rotations the measurement probability has that closed form, so the layer
evaluates it directly (``qsim`` checks the shortcut against a state-vector
simulation).

The recurrence is differentiated in angle space. ``arcsin(sqrt(alpha))`` has an
infinite slope at ``alpha = 0`` but the carried angle evolves smoothly, so
backpropagation through time carries d/dphi instead of d/dalpha.
"""

from __future__ import annotations

from dataclasses import dataclass, fields

import numpy as np

from .cache import LayerCache
from .surrogate import surrogate_grad

TAU_MIN = 1e-3
DOMAIN_TOL = 1e-9


@dataclass(frozen=True)
class QlifHyper:
    threshold: float = 0.75
    t1: float = 10.0
    surrogate_center: str = "threshold"  # or "zero"

    def __post_init__(self):
        if not 0.0 < self.threshold < 1.0:
            raise ValueError(f"threshold must lie in (0, 1), got {self.threshold}")
        if not self.t1 > 0:
            raise ValueError(f"t1 must be positive, got {self.t1}")
        if self.surrogate_center not in ("threshold", "zero"):
            raise ValueError(f"unknown surrogate_center {self.surrogate_center!r}")

    @property
    def center(self) -> float:
        return self.threshold if self.surrogate_center == "threshold" else 0.0


@dataclass
class QlifLayerParams:
    kernel: np.ndarray  # [n_in, n_neurons]
    theta: np.ndarray  # [n_neurons]
    tau_raw: np.ndarray  # [n_neurons]

    @classmethod
    def init(cls, n_in: int, n_neurons: int, rng: np.random.Generator) -> "QlifLayerParams":
        limit = np.sqrt(6.0 / (n_in + n_neurons))
        return cls(
            kernel=rng.uniform(-limit, limit, size=(n_in, n_neurons)),
            theta=rng.uniform(0.1, 1.0, size=n_neurons),
            tau_raw=np.full(n_neurons, 5.0),
        )

    @property
    def n_params(self) -> int:
        return sum(getattr(self, f.name).size for f in fields(self))


@dataclass
class QlifNeuronState:
    alpha: np.ndarray
    prev_spike: np.ndarray

    @classmethod
    def zeros(cls, shape) -> "QlifNeuronState":
        return cls(alpha=np.zeros(shape), prev_spike=np.zeros(shape))


def _check_probability(alpha, what="alpha"):
    alpha = np.asarray(alpha, dtype=float)
    if np.any(alpha < -DOMAIN_TOL) or np.any(alpha > 1.0 + DOMAIN_TOL):
        raise ValueError(f"{what} outside [0, 1] beyond roundoff tolerance")
    return np.clip(alpha, 0.0, 1.0)


def encode_state(alpha):
    """Rotation angle ``2 arcsin(sqrt(alpha))`` that prepares excitation ``alpha`` from |0>."""
    return 2.0 * np.arcsin(np.sqrt(_check_probability(alpha)))


def decode_angle(phi):
    return np.sin(np.asarray(phi, dtype=float) / 2.0) ** 2


def qlif_update(phi, theta_input):
    """|1> probability after ``Rx(theta_input) Rx(phi) |0>``."""
    return np.sin((np.asarray(phi, dtype=float) + theta_input) / 2.0) ** 2


def decay_angle(alpha, tau, t1):
    """T1-relaxation angle ``-2 arcsin(sqrt(alpha * exp(-tau / t1)))``, in [-pi, 0]."""
    alpha = _check_probability(alpha)
    return -2.0 * np.arcsin(np.sqrt(alpha * np.exp(-np.asarray(tau, dtype=float) / t1)))


def effective_tau(tau_raw):
    return np.maximum(tau_raw, TAU_MIN)


def qlif_layer_forward(inputs, params: QlifLayerParams, hyper: QlifHyper = QlifHyper(), training=False):
    """Run a QLIF layer over ``inputs`` of shape [batch, T, n_in].

    Returns hard spikes [batch, T, n_neurons] and the cache for
    :func:`qlif_layer_backward`. State starts at alpha = 0 for every sample.
    ``training`` has no effect; the layer is deterministic.
    """
    x = np.asarray(inputs, dtype=float)
    kernel = params.kernel
    if x.ndim != 3 or x.shape[-1] != kernel.shape[0]:
        raise ValueError(f"inputs {x.shape} do not match kernel {kernel.shape}")
    B, T, _ = x.shape
    n = kernel.shape[1]
    tau = effective_tau(params.tau_raw)

    drives = x @ kernel
    phi_prev = np.empty((B, T, n))
    s_all = np.empty((B, T, n))
    alpha_new_all = np.empty((B, T, n))
    spikes = np.empty((B, T, n))

    state = QlifNeuronState.zeros((B, n))
    for t in range(T):
        a = drives[:, t]
        gate = a > 0
        phi = encode_state(state.alpha)
        gamma = decay_angle(state.alpha, tau, hyper.t1)
        theta_input = np.where(gate, params.theta * a, gamma)
        alpha_new = qlif_update(phi, theta_input)
        spike = (alpha_new >= hyper.threshold).astype(float)

        phi_prev[:, t] = phi
        s_all[:, t] = phi + theta_input
        alpha_new_all[:, t] = alpha_new
        spikes[:, t] = spike
        state = QlifNeuronState(
            alpha=np.where(spike > 0, 0.0, np.clip(alpha_new, 0.0, 1.0)),
            prev_spike=spike,
        )

    cache = LayerCache(
        "qlif",
        x=x,
        params=params,
        hyper=hyper,
        drives=drives,
        gates=drives > 0,
        phi_prev=phi_prev,
        s=s_all,
        alpha_new=alpha_new_all,
        u=alpha_new_all - hyper.center,
        spikes=spikes,
    )
    return spikes, cache


def qlif_layer_backward(cache: LayerCache, grad_out):
    """Straight-through BPTT for :func:`qlif_layer_forward`.

    The spike threshold backpropagates ``surrogate_grad(u)``; gate selection and
    the reset branch are held constant.
    """
    c = cache.claim("qlif")
    params: QlifLayerParams = c["params"]
    hyper: QlifHyper = c["hyper"]
    grad_out = np.asarray(grad_out, dtype=float)
    if grad_out.shape != c["spikes"].shape:
        raise ValueError(f"grad_out {grad_out.shape} does not match output {c['spikes'].shape}")

    x, drives, gates = c["x"], c["drives"], c["gates"]
    B, T, n = drives.shape
    tau = effective_tau(params.tau_raw)
    decay = np.exp(-tau / hyper.t1)
    sqrt_decay = np.sqrt(decay)

    d_drive = np.zeros_like(drives)
    d_theta = np.zeros(n)
    d_tau = np.zeros(n)
    d_phi_carry = np.zeros((B, n))
    for t in reversed(range(T)):
        s = c["s"][:, t]
        spike = c["spikes"][:, t] > 0
        gate = gates[:, t]
        sin_s = np.sin(s)
        ds = grad_out[:, t] * surrogate_grad(c["u"][:, t]) * sin_s / 2.0
        # carried angle is the folded s, slope +-1; a reset carries a constant 0
        ds = ds + np.where(spike, 0.0, d_phi_carry * np.sign(sin_s))

        d_drive[:, t] = np.where(gate, ds * params.theta, 0.0)
        d_theta += np.where(gate, ds * drives[:, t], 0.0).sum(axis=0)

        half_sin = np.sin(c["phi_prev"][:, t] / 2.0)
        half_cos = np.cos(c["phi_prev"][:, t] / 2.0)
        root = np.sqrt(1.0 - decay * half_sin**2)
        ds_dphi_decay = 1.0 - sqrt_decay * half_cos / root
        ds_dtau = sqrt_decay * half_sin / (hyper.t1 * root)
        d_tau += np.where(gate, 0.0, ds * ds_dtau).sum(axis=0)
        d_phi_carry = np.where(gate, ds, ds * ds_dphi_decay)

    d_tau = np.where(params.tau_raw > TAU_MIN, d_tau, 0.0)
    d_kernel = np.einsum("bti,btj->ij", x, d_drive)
    d_x = d_drive @ params.kernel.T
    return d_x, QlifLayerParams(kernel=d_kernel, theta=d_theta, tau_raw=d_tau)
