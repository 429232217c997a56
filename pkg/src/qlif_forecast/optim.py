"""Adam with L2 on selected kernels and a per-epoch exponential learning-rate schedule."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NumericError


@dataclass
class AdamState:
    lr0: float = 1e-3
    decay_rate: float = 0.96
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-7
    step: int = 0
    m: dict = field(default_factory=dict)
    v: dict = field(default_factory=dict)

    def lr(self, epoch: int) -> float:
        """Staircase decay: ``lr0 * decay_rate ** epoch``."""
        return self.lr0 * self.decay_rate**epoch


def adam_step(params: dict, grads: dict, state: AdamState, l2: float = 0.0, l2_keys=(), epoch: int = 0):
    """Update ``params`` in place with one bias-corrected Adam step.

    Keys listed in ``l2_keys`` receive the L2 penalty gradient ``2 * l2 * w``.
    Raises :class:`NumericError` naming the first non-finite gradient.
    """
    for name, g in grads.items():
        if not np.all(np.isfinite(g)):
            raise NumericError(f"non-finite gradient for {name!r} at step {state.step + 1}")

    state.step += 1
    t = state.step
    lr = state.lr(epoch)
    l2_keys = set(l2_keys)
    for name, g in grads.items():
        w = params[name]
        if name in l2_keys and l2:
            g = g + 2.0 * l2 * w
        m = state.m.get(name)
        if m is None:
            m = state.m[name] = np.zeros_like(w)
            state.v[name] = np.zeros_like(w)
        v = state.v[name]
        m *= state.beta1
        m += (1.0 - state.beta1) * g
        v *= state.beta2
        v += (1.0 - state.beta2) * g * g
        m_hat = m / (1.0 - state.beta1**t)
        v_hat = v / (1.0 - state.beta2**t)
        w -= lr * m_hat / (np.sqrt(v_hat) + state.epsilon)
    return params, state
