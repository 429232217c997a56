"""Non-spiking layers with explicit forward/backward passes.

Every ``*_forward`` returns ``(output, cache)``; the matching ``*_backward``
takes that cache and the upstream gradient and returns
``(grad_input, grad_params)`` where ``grad_params`` is a dict keyed like the
parameters it differentiates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cache import LayerCache

ACTIVATIONS = ("relu", "linear")


def glorot_uniform(fan_in: int, fan_out: int, rng: np.random.Generator, shape=None):
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=shape or (fan_in, fan_out))


def orthogonal(n_rows: int, n_cols: int, rng: np.random.Generator):
    a = rng.standard_normal((max(n_rows, n_cols), min(n_rows, n_cols)))
    q, r = np.linalg.qr(a)
    q = q * np.sign(np.diag(r))
    return q if n_rows >= n_cols else q.T


def sigmoid(z):
    # split by sign so large |z| cannot overflow exp
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


# --- dense -------------------------------------------------------------------


def dense_param_count(n_in: int, units: int) -> int:
    return n_in * units + units


def dense_forward(x, W, b, activation="linear"):
    """``act(x @ W + b)`` over the last axis; any number of leading axes."""
    if activation not in ACTIVATIONS:
        raise ValueError(f"unknown activation {activation!r}")
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != W.shape[0] or b.shape != (W.shape[1],):
        raise ValueError(f"input {x.shape} does not match kernel {W.shape} / bias {b.shape}")
    z = x @ W + b
    y = np.maximum(z, 0.0) if activation == "relu" else z
    return y, LayerCache("dense", x=x, W=W, z=z, activation=activation)


def dense_backward(cache, grad_out):
    c = cache.claim("dense")
    g = np.asarray(grad_out, dtype=float)
    if c["activation"] == "relu":
        g = g * (c["z"] > 0)
    x2 = c["x"].reshape(-1, c["x"].shape[-1])
    g2 = g.reshape(-1, g.shape[-1])
    grads = {"kernel": x2.T @ g2, "bias": g2.sum(axis=0)}
    return g @ c["W"].T, grads


def timedist_dense_forward(x, W, b, activation="relu"):
    """Dense map applied independently at every timestep of [B, T, n_in]."""
    if np.ndim(x) != 3:
        raise ValueError(f"expected [batch, T, features], got shape {np.shape(x)}")
    return dense_forward(x, W, b, activation)


timedist_dense_backward = dense_backward
output_forward = dense_forward
output_backward = dense_backward


# --- dropout -----------------------------------------------------------------


def dropout_forward(x, rate: float, training: bool, rng: np.random.Generator | int | None = None):
    """Inverted dropout: survivors are scaled by ``1 / (1 - rate)``; identity at inference."""
    if not 0.0 <= rate < 1.0:
        raise ValueError(f"dropout rate must lie in [0, 1), got {rate}")
    x = np.asarray(x, dtype=float)
    if not training or rate == 0.0:
        return x, LayerCache("dropout", mask=None)
    rng = np.random.default_rng(rng)
    mask = (rng.random(x.shape) >= rate) / (1.0 - rate)
    return x * mask, LayerCache("dropout", mask=mask)


def dropout_backward(cache, grad_out):
    c = cache.claim("dropout")
    g = np.asarray(grad_out, dtype=float)
    return (g if c["mask"] is None else g * c["mask"]), {}


# --- batch normalization -----------------------------------------------------


@dataclass
class BatchNormState:
    gamma: np.ndarray
    beta: np.ndarray
    moving_mean: np.ndarray
    moving_var: np.ndarray
    epsilon: float = 1e-3
    momentum: float = 0.99

    @classmethod
    def init(cls, channels: int, **kw) -> "BatchNormState":
        return cls(
            gamma=np.ones(channels),
            beta=np.zeros(channels),
            moving_mean=np.zeros(channels),
            moving_var=np.ones(channels),
            **kw,
        )

    @property
    def n_trainable(self) -> int:
        return self.gamma.size + self.beta.size


def batchnorm_forward(x, state: BatchNormState, training: bool):
    """Per-channel normalization over all leading axes.

    In training mode the batch statistics are used and the moving statistics are
    updated in place (momentum form ``m <- momentum * m + (1 - momentum) * batch``).
    """
    x = np.asarray(x, dtype=float)
    C = x.shape[-1]
    if C != state.gamma.size:
        raise ValueError(f"input has {C} channels, state has {state.gamma.size}")
    x2 = x.reshape(-1, C)
    if training:
        if x2.shape[0] < 2:
            raise ValueError("batch normalization needs at least two samples per channel in training")
        mean = x2.mean(axis=0)
        var = x2.var(axis=0)
        state.moving_mean = state.momentum * state.moving_mean + (1 - state.momentum) * mean
        state.moving_var = state.momentum * state.moving_var + (1 - state.momentum) * var
    else:
        mean, var = state.moving_mean, state.moving_var
    inv_std = 1.0 / np.sqrt(var + state.epsilon)
    x_hat = (x2 - mean) * inv_std
    y = state.gamma * x_hat + state.beta
    cache = LayerCache("batchnorm", x_hat=x_hat, inv_std=inv_std, gamma=state.gamma, training=training, shape=x.shape)
    return y.reshape(x.shape), cache


def batchnorm_backward(cache, grad_out):
    c = cache.claim("batchnorm")
    g = np.asarray(grad_out, dtype=float).reshape(c["x_hat"].shape)
    x_hat, inv_std = c["x_hat"], c["inv_std"]
    grads = {"gamma": (g * x_hat).sum(axis=0), "beta": g.sum(axis=0)}
    g_hat = g * c["gamma"]
    if c["training"]:
        m = g.shape[0]
        dx = inv_std / m * (m * g_hat - g_hat.sum(axis=0) - x_hat * (g_hat * x_hat).sum(axis=0))
    else:
        dx = g_hat * inv_std
    return dx.reshape(c["shape"]), grads


# --- LSTM --------------------------------------------------------------------


def lstm_param_count(n_in: int, units: int) -> int:
    return 4 * (units * (n_in + units) + units)


def lstm_init(n_in: int, units: int, rng: np.random.Generator) -> dict:
    """Gate blocks are ordered (input, forget, candidate, output); forget bias starts at 1."""
    bias = np.zeros(4 * units)
    bias[units : 2 * units] = 1.0
    return {
        "kernel": glorot_uniform(n_in, 4 * units, rng),
        "recurrent": orthogonal(units, 4 * units, rng),
        "bias": bias,
    }


def lstm_forward(x, params: dict, units: int | None = None):
    """Standard LSTM over [B, T, n_in]; returns only the final hidden state [B, units]."""
    x = np.asarray(x, dtype=float)
    K, R, b = params["kernel"], params["recurrent"], params["bias"]
    u = R.shape[0]
    if units is not None and units != u:
        raise ValueError(f"units={units} but recurrent kernel has {u}")
    if x.ndim != 3 or x.shape[-1] != K.shape[0] or K.shape[1] != 4 * u or R.shape != (u, 4 * u):
        raise ValueError(f"input {x.shape} does not match LSTM kernels {K.shape}/{R.shape}")
    B, T, _ = x.shape

    xk = x @ K + b
    h = np.zeros((B, u))
    c = np.zeros((B, u))
    hs, cs, gates, tanh_cs = [h], [c], [], []
    for t in range(T):
        z = xk[:, t] + h @ R
        i = sigmoid(z[:, :u])
        f = sigmoid(z[:, u : 2 * u])
        g = np.tanh(z[:, 2 * u : 3 * u])
        o = sigmoid(z[:, 3 * u :])
        c = f * c + i * g
        tc = np.tanh(c)
        h = o * tc
        gates.append((i, f, g, o))
        tanh_cs.append(tc)
        hs.append(h)
        cs.append(c)
    cache = LayerCache("lstm", x=x, K=K, R=R, hs=hs, cs=cs, gates=gates, tanh_cs=tanh_cs)
    return h, cache


def lstm_backward(cache, grad_out):
    """BPTT through every timestep; ``grad_out`` is d loss / d h_T."""
    c = cache.claim("lstm")
    x, K, R = c["x"], c["K"], c["R"]
    B, T, _ = x.shape
    u = R.shape[0]
    dK = np.zeros_like(K)
    dR = np.zeros_like(R)
    db = np.zeros(4 * u)
    dx = np.empty_like(x)
    dh = np.asarray(grad_out, dtype=float).copy()
    dc = np.zeros((B, u))
    for t in reversed(range(T)):
        i, f, g, o = c["gates"][t]
        tc = c["tanh_cs"][t]
        do = dh * tc
        dc = dc + dh * o * (1.0 - tc**2)
        di = dc * g
        df = dc * c["cs"][t]
        dg = dc * i
        dz = np.concatenate(
            [di * i * (1 - i), df * f * (1 - f), dg * (1 - g**2), do * o * (1 - o)],
            axis=1,
        )
        dK += x[:, t].T @ dz
        dR += c["hs"][t].T @ dz
        db += dz.sum(axis=0)
        dx[:, t] = dz @ K.T
        dh = dz @ R.T
        dc = dc * f
    return dx, {"kernel": dK, "recurrent": dR, "bias": db}
