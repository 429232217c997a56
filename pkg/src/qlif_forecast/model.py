"""Seven-layer spiking recurrent regressor.

L1 time-distributed dense (48, relu) + dropout 0.1
L2 spiking layer (QLIF or classical LIF, 48 neurons)
L3 batch normalization + dropout 0.2
L4 LSTM (final hidden state only)
L5 dense 32 relu + dropout 0.2
L6 dense 16 relu
L7 linear dense, one unit per target

Both neuron kinds share every other layer, including the initial weights for a
given seed: each layer draws from its own child of the seed's ``SeedSequence``.
"""

from __future__ import annotations

import copy
import logging
from dataclasses import asdict, dataclass, field

import numpy as np

from . import container
from . import layers as L
from .data import WindowedDataset, validation_split
from .errors import ConfigError, NumericError
from .lif import LifHyper, LifLayerParams, lif_layer_backward, lif_layer_forward
from .optim import AdamState, adam_step
from .qlif import QlifHyper, QlifLayerParams, qlif_layer_backward, qlif_layer_forward

log = logging.getLogger(__name__)

NEURON_KINDS = ("qlif", "lif")
SPIKING_FIELDS = {"qlif": ("kernel", "theta", "tau_raw"), "lif": ("kernel", "bias", "tau_raw")}
# dense kernels that receive the L2 penalty
L2_KEYS = ("l1_dense.kernel", "l5_dense.kernel", "l6_dense.kernel", "l7_output.kernel")


@dataclass(frozen=True)
class ModelSpec:
    neuron_kind: str = "qlif"
    n_features: int = 4
    n_targets: int = 4
    lstm_units: int = 24
    window: int = 12
    hidden: int = 48
    head_units: tuple = (32, 16)
    dropout_input: float = 0.1
    dropout_hidden: float = 0.2
    threshold: float = 0.75
    t1: float = 10.0
    surrogate_center: str = "threshold"

    def __post_init__(self):
        if self.neuron_kind not in NEURON_KINDS:
            raise ConfigError(f"neuron_kind must be one of {NEURON_KINDS}, got {self.neuron_kind!r}")
        for name in ("n_features", "n_targets", "lstm_units", "window", "hidden"):
            if int(getattr(self, name)) < 1:
                raise ConfigError(f"{name} must be a positive integer")
        if len(self.head_units) != 2:
            raise ConfigError("head_units needs exactly two sizes")
        for rate in (self.dropout_input, self.dropout_hidden):
            if not 0.0 <= rate < 1.0:
                raise ConfigError(f"dropout rate {rate} outside [0, 1)")
        try:
            self.neuron_hyper()
        except ValueError as e:
            raise ConfigError(str(e)) from e

    def neuron_hyper(self):
        if self.neuron_kind == "qlif":
            return QlifHyper(self.threshold, self.t1, self.surrogate_center)
        return LifHyper(self.threshold)

    def replace(self, **kw) -> "ModelSpec":
        return ModelSpec(**{**asdict(self), **kw})

    @classmethod
    def from_dict(cls, d: dict) -> "ModelSpec":
        d = dict(d)
        if "head_units" in d:
            d["head_units"] = tuple(d["head_units"])
        return cls(**d)


@dataclass
class TrainConfig:
    lr: float = 1e-3
    lr_decay: float = 0.96
    batch_size: int = 64
    max_epochs: int = 15
    patience: int = 5
    l2: float = 1e-4
    val_fraction: float = 0.1
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-7


@dataclass(frozen=True)
class TrainRecord:
    epoch: int
    train_loss: float
    val_loss: float
    lr: float


class EarlyStopping:
    """Stop once the monitored loss fails to improve for ``patience`` consecutive epochs."""

    def __init__(self, patience: int = 5):
        self.patience = patience
        self.best = np.inf
        self.best_epoch = None
        self.wait = 0

    def update(self, epoch: int, value: float) -> bool:
        if value < self.best:
            self.best, self.best_epoch, self.wait = value, epoch, 0
            return False
        self.wait += 1
        return self.wait >= self.patience


class Model:
    def __init__(self, spec: ModelSpec, params: dict, buffers: dict):
        self.spec = spec
        self.params = params
        self.buffers = buffers

    @property
    def l2_name(self) -> str:
        return f"l2_{self.spec.neuron_kind}"

    def parameter_counts(self) -> dict:
        counts = {}
        for name, arr in self.params.items():
            layer = name.split(".")[0].split("_")[0].upper()
            counts[layer] = counts.get(layer, 0) + arr.size
        return counts

    @property
    def n_params(self) -> int:
        return sum(a.size for a in self.params.values())

    def structure(self) -> list:
        """(name, shape) for every trainable array, in layer order."""
        return [(k, v.shape) for k, v in self.params.items()]

    def _spiking_params(self):
        fields = SPIKING_FIELDS[self.spec.neuron_kind]
        p = {f: self.params[f"{self.l2_name}.{f}"] for f in fields}
        return QlifLayerParams(**p) if self.spec.neuron_kind == "qlif" else LifLayerParams(**p)

    def _bn_state(self):
        return L.BatchNormState(
            gamma=self.params["l3_batchnorm.gamma"],
            beta=self.params["l3_batchnorm.beta"],
            moving_mean=self.buffers["l3_batchnorm.moving_mean"],
            moving_var=self.buffers["l3_batchnorm.moving_var"],
        )

    def forward(self, x, training: bool = False, rng: np.random.Generator | None = None):
        s, p = self.spec, self.params
        x = np.asarray(x, dtype=float)
        if x.ndim != 3 or x.shape[1:] != (s.window, s.n_features):
            raise ValueError(f"expected input [n, {s.window}, {s.n_features}], got {x.shape}")
        if training and rng is None:
            raise ValueError("training forward needs an rng for dropout")
        caches = []
        h, c = L.timedist_dense_forward(x, p["l1_dense.kernel"], p["l1_dense.bias"], "relu")
        caches.append(c)
        h, c = L.dropout_forward(h, s.dropout_input, training, rng)
        caches.append(c)
        spiking = qlif_layer_forward if s.neuron_kind == "qlif" else lif_layer_forward
        h, c = spiking(h, self._spiking_params(), s.neuron_hyper(), training)
        caches.append(c)
        bn = self._bn_state()
        h, c = L.batchnorm_forward(h, bn, training)
        self.buffers["l3_batchnorm.moving_mean"] = bn.moving_mean
        self.buffers["l3_batchnorm.moving_var"] = bn.moving_var
        caches.append(c)
        h, c = L.dropout_forward(h, s.dropout_hidden, training, rng)
        caches.append(c)
        h, c = L.lstm_forward(h, {k: p[f"l4_lstm.{k}"] for k in ("kernel", "recurrent", "bias")})
        caches.append(c)
        h, c = L.dense_forward(h, p["l5_dense.kernel"], p["l5_dense.bias"], "relu")
        caches.append(c)
        h, c = L.dropout_forward(h, s.dropout_hidden, training, rng)
        caches.append(c)
        h, c = L.dense_forward(h, p["l6_dense.kernel"], p["l6_dense.bias"], "relu")
        caches.append(c)
        y, c = L.output_forward(h, p["l7_output.kernel"], p["l7_output.bias"], "linear")
        caches.append(c)
        return y, caches

    def backward(self, caches, grad_y) -> dict:
        (c1, d1, c2, c3, d3, c4, c5, d5, c6, c7) = caches
        grads = {}

        def put(prefix, g):
            for k, v in g.items():
                grads[f"{prefix}.{k}"] = v

        g, gp = L.output_backward(c7, grad_y)
        put("l7_output", gp)
        g, gp = L.dense_backward(c6, g)
        put("l6_dense", gp)
        g, _ = L.dropout_backward(d5, g)
        g, gp = L.dense_backward(c5, g)
        put("l5_dense", gp)
        g, gp = L.lstm_backward(c4, g)
        put("l4_lstm", gp)
        g, _ = L.dropout_backward(d3, g)
        g, gp = L.batchnorm_backward(c3, g)
        put("l3_batchnorm", gp)
        if self.spec.neuron_kind == "qlif":
            g, sp = qlif_layer_backward(c2, g)
        else:
            g, sp = lif_layer_backward(c2, g)
        put(self.l2_name, {f: getattr(sp, f) for f in SPIKING_FIELDS[self.spec.neuron_kind]})
        g, _ = L.dropout_backward(d1, g)
        _, gp = L.timedist_dense_backward(c1, g)
        put("l1_dense", gp)
        return {k: grads[k] for k in self.params}

    def state_arrays(self) -> dict:
        return {**self.params, **self.buffers}

    def snapshot(self) -> dict:
        return copy.deepcopy(self.state_arrays())

    def restore(self, snap: dict) -> None:
        for k in self.params:
            self.params[k][...] = snap[k]
        for k in self.buffers:
            self.buffers[k] = snap[k].copy()

    def save(self, path) -> None:
        meta = {"kind": "checkpoint", "spec": asdict(self.spec), "buffers": list(self.buffers)}
        container.save(path, self.state_arrays(), meta)

    @classmethod
    def load(cls, path) -> "Model":
        arrays, meta = container.load(path)
        if meta.get("kind") != "checkpoint":
            raise ValueError(f"{path} is not a model checkpoint")
        buffers = {k: arrays.pop(k) for k in meta["buffers"]}
        return cls(ModelSpec.from_dict(meta["spec"]), arrays, buffers)


def build(spec: ModelSpec, seed: int) -> Model:
    rngs = [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(7)]
    H, (h5, h6) = spec.hidden, spec.head_units
    params = {
        "l1_dense.kernel": L.glorot_uniform(spec.n_features, H, rngs[0]),
        "l1_dense.bias": np.zeros(H),
    }
    if spec.neuron_kind == "qlif":
        sp = QlifLayerParams.init(H, H, rngs[1])
    else:
        sp = LifLayerParams.init(H, H, rngs[1])
    for f in SPIKING_FIELDS[spec.neuron_kind]:
        params[f"l2_{spec.neuron_kind}.{f}"] = getattr(sp, f)
    bn = L.BatchNormState.init(H)
    params["l3_batchnorm.gamma"] = bn.gamma
    params["l3_batchnorm.beta"] = bn.beta
    for k, v in L.lstm_init(H, spec.lstm_units, rngs[3]).items():
        params[f"l4_lstm.{k}"] = v
    params["l5_dense.kernel"] = L.glorot_uniform(spec.lstm_units, h5, rngs[4])
    params["l5_dense.bias"] = np.zeros(h5)
    params["l6_dense.kernel"] = L.glorot_uniform(h5, h6, rngs[5])
    params["l6_dense.bias"] = np.zeros(h6)
    params["l7_output.kernel"] = L.glorot_uniform(h6, spec.n_targets, rngs[6])
    params["l7_output.bias"] = np.zeros(spec.n_targets)
    buffers = {"l3_batchnorm.moving_mean": bn.moving_mean, "l3_batchnorm.moving_var": bn.moving_var}
    return Model(spec, params, buffers)


def predict(model: Model, windows, batch_size: int = 1024) -> np.ndarray:
    windows = np.asarray(windows, dtype=float)
    out = [model.forward(windows[i : i + batch_size], training=False)[0] for i in range(0, len(windows), batch_size)]
    if not out:
        return np.zeros((0, model.spec.n_targets))
    return np.concatenate(out, axis=0)


def mse(pred, target) -> float:
    return float(np.mean((np.asarray(pred) - np.asarray(target)) ** 2))


def train(model: Model, dataset: WindowedDataset, cfg: TrainConfig, seed: int = 0):
    """Minibatch Adam on standardized MSE with early stopping on a chronological hold-out.

    The last ``cfg.val_fraction`` of the training windows are held out for
    validation. Training windows are reshuffled every epoch; the final short
    batch is kept. Parameters from the best validation epoch are restored.
    """
    X, y = dataset.train
    tr_idx, val_idx = validation_split(len(X), cfg.val_fraction)
    X_val, y_val = X[val_idx], y[val_idx]
    shuffle_rng, dropout_rng = (np.random.default_rng(s) for s in np.random.SeedSequence([seed, 1]).spawn(2))
    opt = AdamState(lr0=cfg.lr, decay_rate=cfg.lr_decay, beta1=cfg.beta1, beta2=cfg.beta2, epsilon=cfg.epsilon)
    stopper = EarlyStopping(cfg.patience)
    history, best = [], model.snapshot()

    for epoch in range(cfg.max_epochs):
        order = shuffle_rng.permutation(tr_idx)
        lr = opt.lr(epoch)
        total = 0.0
        for lo in range(0, len(order), cfg.batch_size):
            batch = order[lo : lo + cfg.batch_size]
            pred, caches = model.forward(X[batch], training=True, rng=dropout_rng)
            diff = pred - y[batch]
            loss = float(np.mean(diff**2))
            if not np.isfinite(loss):
                raise NumericError(f"non-finite training loss at epoch {epoch + 1}")
            total += loss * len(batch)
            grads = model.backward(caches, 2.0 * diff / diff.size)
            adam_step(model.params, grads, opt, l2=cfg.l2, l2_keys=L2_KEYS, epoch=epoch)
        val_loss = mse(predict(model, X_val), y_val)
        if not np.isfinite(val_loss):
            raise NumericError(f"non-finite validation loss at epoch {epoch + 1}")
        history.append(TrainRecord(epoch + 1, total / len(order), val_loss, lr))
        log.info("epoch %d train %.5f val %.5f lr %.2e", epoch + 1, history[-1].train_loss, val_loss, lr)
        stop = stopper.update(epoch + 1, val_loss)
        if stopper.best_epoch == epoch + 1:
            best = model.snapshot()
        if stop:
            break

    model.restore(best)
    return model, history
