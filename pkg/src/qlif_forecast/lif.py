"""Classical leaky integrate-and-fire baseline.

Drop-in replacement for the QLIF layer: same input/output shapes, same
parameter count, same surrogate and reset rules. Only the state update differs:
``U_new = beta * U + (1 - beta) * I`` with ``beta = exp(-1 / tau)``.
"""

from __future__ import annotations

from dataclasses import dataclass, fields

import numpy as np

from .cache import LayerCache
from .qlif import TAU_MIN, effective_tau
from .surrogate import surrogate_grad


@dataclass(frozen=True)
class LifHyper:
    threshold: float = 0.75


@dataclass
class LifLayerParams:
    kernel: np.ndarray  # [n_in, n_neurons]
    bias: np.ndarray  # [n_neurons]
    tau_raw: np.ndarray  # [n_neurons]

    @classmethod
    def init(cls, n_in: int, n_neurons: int, rng: np.random.Generator) -> "LifLayerParams":
        limit = np.sqrt(6.0 / (n_in + n_neurons))
        return cls(
            kernel=rng.uniform(-limit, limit, size=(n_in, n_neurons)),
            bias=np.zeros(n_neurons),
            tau_raw=np.full(n_neurons, 5.0),
        )

    @property
    def n_params(self) -> int:
        return sum(getattr(self, f.name).size for f in fields(self))


@dataclass
class LifNeuronState:
    membrane: np.ndarray


def leak_factor(tau):
    return np.exp(-1.0 / effective_tau(tau))


def lif_step(u_prev, i_in, tau):
    beta = leak_factor(tau)
    return beta * u_prev + (1.0 - beta) * i_in


def lif_layer_forward(inputs, params: LifLayerParams, hyper: LifHyper = LifHyper(), training=False):
    x = np.asarray(inputs, dtype=float)
    if x.ndim != 3 or x.shape[-1] != params.kernel.shape[0]:
        raise ValueError(f"inputs {x.shape} do not match kernel {params.kernel.shape}")
    B, T, _ = x.shape
    n = params.kernel.shape[1]

    drives = x @ params.kernel + params.bias
    u_prev = np.empty((B, T, n))
    u_new_all = np.empty((B, T, n))
    spikes = np.empty((B, T, n))
    state = LifNeuronState(membrane=np.zeros((B, n)))
    for t in range(T):
        u_new = lif_step(state.membrane, drives[:, t], params.tau_raw)
        spike = (u_new >= hyper.threshold).astype(float)
        u_prev[:, t] = state.membrane
        u_new_all[:, t] = u_new
        spikes[:, t] = spike
        state = LifNeuronState(membrane=np.where(spike > 0, 0.0, u_new))

    cache = LayerCache(
        "lif",
        x=x,
        params=params,
        hyper=hyper,
        drives=drives,
        u_prev=u_prev,
        u_new=u_new_all,
        spikes=spikes,
    )
    return spikes, cache


def lif_layer_backward(cache: LayerCache, grad_out):
    c = cache.claim("lif")
    params: LifLayerParams = c["params"]
    grad_out = np.asarray(grad_out, dtype=float)
    if grad_out.shape != c["spikes"].shape:
        raise ValueError(f"grad_out {grad_out.shape} does not match output {c['spikes'].shape}")

    B, T, n = c["drives"].shape
    tau = effective_tau(params.tau_raw)
    beta = np.exp(-1.0 / tau)
    dbeta_dtau = beta / tau**2

    d_drive = np.empty((B, T, n))
    d_beta = np.zeros(n)
    d_carry = np.zeros((B, n))
    for t in reversed(range(T)):
        spike = c["spikes"][:, t] > 0
        u_surr = c["u_new"][:, t] - c["hyper"].threshold
        d_unew = grad_out[:, t] * surrogate_grad(u_surr) + np.where(spike, 0.0, d_carry)
        d_drive[:, t] = (1.0 - beta) * d_unew
        d_beta += (d_unew * (c["u_prev"][:, t] - c["drives"][:, t])).sum(axis=0)
        d_carry = beta * d_unew

    d_tau = np.where(params.tau_raw > TAU_MIN, d_beta * dbeta_dtau, 0.0)
    d_kernel = np.einsum("bti,btj->ij", c["x"], d_drive)
    d_bias = d_drive.sum(axis=(0, 1))
    d_x = d_drive @ params.kernel.T
    return d_x, LifLayerParams(kernel=d_kernel, bias=d_bias, tau_raw=d_tau)
