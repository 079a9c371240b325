"""The wavelet recurrent neural network (WRNN) forecaster.

Input at time step ``n`` is the concatenation::

    [u(n), u(n-1), u(n-2), y(n-1), y(n-2), y(n-3), y(n-4)]

where ``u(t)`` is row ``t`` of the causal undecimated wavelet decomposition
``[d1 .. dM, aM]`` of the standardized series and ``y(t)`` is the fed-back
output for time ``t``: the observed value while training (teacher forcing),
either the observed value or the network's own earlier forecast of it at
prediction time.  The target is the standardized value ``r`` steps ahead.

Two hidden layers of Gaussian RBF units feed an affine output::

    out = W3 g(W2 g(W1 v + b1) + b2) + b3,    g(z) = exp(-z**2)

Training is full-batch gradient descent with momentum and an adaptive
learning rate.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone

import numpy as np

from . import dwt
from .activation import hidden_activation, hidden_activation_grad
from .ingest import NormStats, TimeSeries, destandardize, standardize

log = logging.getLogger(__name__)

FORMAT_VERSION = 1
MIN_TRAINING_PAIRS = 50
PARAM_NAMES = ("W1", "b1", "W2", "b2", "W3", "b3")
_EPOCH = datetime(1970, 1, 1, tzinfo=timezone.utc)


class TrainingError(RuntimeError):
    pass


@dataclass(frozen=True)
class WrnnTopology:
    levels: int = 4
    exogenous_delays: int = 3
    feedback_taps: int = 4
    hidden: tuple = (16, 16)
    horizon: int = 6
    wavelet: str = "bior3.7"
    extension: str = "symmetric"

    def __post_init__(self):
        if len(self.hidden) != 2:
            raise ValueError("the network has exactly two hidden layers")
        if min(self.levels, self.exogenous_delays, self.horizon) < 1 or self.feedback_taps < 0:
            raise ValueError("levels, delays and horizon must be positive")
        object.__setattr__(self, "hidden", tuple(int(h) for h in self.hidden))

    @property
    def coeff_row_width(self):
        return self.levels + 1

    @property
    def input_width(self):
        return self.exogenous_delays * self.coeff_row_width + self.feedback_taps

    def bank(self):
        return dwt.get_bank(self.wavelet, self.extension)

    @property
    def warmup(self):
        """First time index with a full, boundary-free input vector."""
        support = dwt.causal_support(self.bank(), self.levels)
        return max(support + self.exogenous_delays - 1, self.feedback_taps)

    def shapes(self):
        h1, h2 = self.hidden
        return {"W1": (h1, self.input_width), "b1": (h1,),
                "W2": (h2, h1), "b2": (h2,),
                "W3": (1, h2), "b3": (1,)}


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.01
    momentum: float = 0.9
    lr_increase: float = 1.05
    lr_decrease: float = 0.7
    max_error_growth: float = 1.04
    epochs: int = 3000
    seed: int = 0
    train_fraction: float = 1.0

    def __post_init__(self):
        if not 0 < self.momentum < 1:
            raise ValueError("momentum must lie in (0, 1)")
        if not self.lr_increase > 1 or not 0 < self.lr_decrease < 1:
            raise ValueError("need lr_increase > 1 and 0 < lr_decrease < 1")
        if not self.max_error_growth >= 1:
            raise ValueError("max_error_growth must be >= 1")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if not self.learning_rate > 0:
            raise ValueError("learning_rate must be positive")
        if not 0 < self.train_fraction <= 1:
            raise ValueError("train_fraction must lie in (0, 1]")


@dataclass
class WrnnModel:
    topology: WrnnTopology
    params: dict
    stats: NormStats = NormStats(0.0, 1.0)
    seed: int = 0

    def __post_init__(self):
        shapes = self.topology.shapes()
        for name in PARAM_NAMES:
            p = np.asarray(self.params[name], dtype=float)
            if p.shape != shapes[name]:
                raise ValueError(f"{name} has shape {p.shape}, expected {shapes[name]}")
            if not np.all(np.isfinite(p)):
                raise ValueError(f"{name} contains non-finite values")
            self.params[name] = p

    @classmethod
    def zeros(cls, topology=WrnnTopology(), stats=NormStats(0.0, 1.0)):
        return cls(topology, {k: np.zeros(s) for k, s in topology.shapes().items()}, stats)

    @classmethod
    def initialize(cls, topology=WrnnTopology(), seed=0, stats=NormStats(0.0, 1.0)):
        """Uniform weights in [-0.5, 0.5] scaled by 1/sqrt(fan-in)."""
        rng = np.random.default_rng(seed)
        params = {}
        for name, shape in topology.shapes().items():
            fan_in = shape[1] if len(shape) == 2 else topology.shapes()["W" + name[1]][1]
            params[name] = rng.uniform(-0.5, 0.5, size=shape) / math.sqrt(fan_in)
        return cls(topology, params, stats, seed)

    def copy(self):
        return replace(self, params={k: v.copy() for k, v in self.params.items()})


def build_input_vector(coeffs, outputs, n, topology=WrnnTopology()):
    """Assemble the network input for time step ``n``.

    Parameters
    ----------
    coeffs : WaveletCoeffs or ndarray
        Coefficient matrix, one row per time step.
    outputs : array_like
        Fed-back values indexed by time; ``outputs[n - 1]`` .. ``outputs[n - 4]``
        are used.
    n : int
    """
    matrix = np.asarray(getattr(coeffs, "matrix", coeffs), dtype=float)
    outputs = np.asarray(outputs, dtype=float)
    if matrix.shape[1] != topology.coeff_row_width:
        raise ValueError(f"coefficient rows have {matrix.shape[1]} entries, "
                         f"expected {topology.coeff_row_width}")
    lag = topology.exogenous_delays - 1
    if n < lag or n >= matrix.shape[0]:
        raise ValueError(f"time index {n} needs coefficient rows {n - lag}..{n}; "
                         f"have 0..{matrix.shape[0] - 1}")
    if n < topology.feedback_taps or outputs.size < n:
        raise ValueError(f"time index {n} needs {topology.feedback_taps} previous outputs")
    rows = [matrix[n - j] for j in range(topology.exogenous_delays)]
    taps = outputs[n - topology.feedback_taps:n][::-1]
    return np.concatenate(rows + [taps])


def _design_matrix(coeffs, outputs, indices, topology):
    """Stack input vectors for many time indices (rows in index order)."""
    matrix = np.asarray(getattr(coeffs, "matrix", coeffs), dtype=float)
    outputs = np.asarray(outputs, dtype=float)
    idx = np.asarray(indices)
    blocks = [matrix[idx - j] for j in range(topology.exogenous_delays)]
    blocks += [outputs[idx - j, None] for j in range(1, topology.feedback_taps + 1)]
    return np.hstack(blocks)


def _forward_batch(params, X):
    z1 = X @ params["W1"].T + params["b1"]
    h1 = hidden_activation(z1)
    z2 = h1 @ params["W2"].T + params["b2"]
    h2 = hidden_activation(z2)
    out = h2 @ params["W3"].T + params["b3"]
    return out[:, 0], (z1, h1, z2, h2)


def forward(model, x):
    """Normalized prediction for one input vector (or a batch of rows)."""
    x = np.asarray(x, dtype=float)
    width = model.topology.input_width
    if x.shape[-1] != width:
        raise ValueError(f"input has width {x.shape[-1]}, network expects {width}")
    out, _ = _forward_batch(model.params, np.atleast_2d(x))
    return float(out[0]) if x.ndim == 1 else out


def _batch_gradient(params, X, targets):
    """Gradient of the mean of (out - target)**2 over the rows of X."""
    out, (z1, h1, z2, h2) = _forward_batch(params, X)
    err = out - targets
    m = X.shape[0]
    g_out = (2.0 / m) * err[:, None]
    grads = {"W3": g_out.T @ h2, "b3": g_out.sum(axis=0)}
    g_z2 = (g_out @ params["W3"]) * hidden_activation_grad(z2)
    grads["W2"] = g_z2.T @ h1
    grads["b2"] = g_z2.sum(axis=0)
    g_z1 = (g_z2 @ params["W2"]) * hidden_activation_grad(z1)
    grads["W1"] = g_z1.T @ X
    grads["b1"] = g_z1.sum(axis=0)
    return grads, float(np.mean(err * err))


def gradient(model, x, target):
    """Gradient of the squared error ``(forward(model, x) - target)**2``.

    Returns a dict keyed like ``model.params``.
    """
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != model.topology.input_width:
        raise ValueError(f"input has width {x.shape[-1]}, network expects "
                         f"{model.topology.input_width}")
    grads, _ = _batch_gradient(model.params, x.reshape(1, -1), np.array([float(target)]))
    return grads


@dataclass
class TrainReport:
    mse: list = field(default_factory=list)
    validation_mse: list = field(default_factory=list)
    learning_rate: list = field(default_factory=list)
    final_epoch: int = 0
    stop_reason: str = ""

    def to_csv(self, path):
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("epoch,mse,validation_mse,learning_rate\n")
            for i, (e, lr) in enumerate(zip(self.mse, self.learning_rate), start=1):
                v = self.validation_mse[i - 1] if self.validation_mse else float("nan")
                fh.write(f"{i},{e!r},{v!r},{lr!r}\n")


def training_pairs(series, topology, stats):
    """Inputs and targets for every boundary-free time step of ``series``."""
    z, _ = standardize(series, stats)
    coeffs = dwt.decompose_undecimated(z.values, topology.levels, topology.bank(), causal=True)
    n = np.arange(topology.warmup, len(series) - topology.horizon)
    if n.size == 0:
        return np.zeros((0, topology.input_width)), np.zeros(0)
    X = _design_matrix(coeffs, z.values, n, topology)
    return X, z.values[n + topology.horizon]


def min_series_length(topology, pairs=MIN_TRAINING_PAIRS):
    bank = topology.bank()
    return max(topology.warmup + topology.horizon + pairs, 2 ** topology.levels * bank.length)


def train(series, config=TrainConfig(), topology=WrnnTopology()):
    """Fit a WRNN to ``series``.

    The first ``config.train_fraction`` of the series is the training split:
    it fixes the normalization statistics and provides the training pairs.
    Any remainder is only used to track a validation error per epoch.

    Each epoch takes one momentum step on the full batch.  If the resulting
    error exceeds the previous one by more than ``max_error_growth`` the step
    is discarded (velocity reset) and the learning rate shrinks; if the error
    decreased the learning rate grows.

    Returns
    -------
    (WrnnModel, TrainReport)
    """
    if not isinstance(series, TimeSeries):
        series = TimeSeries(_EPOCH, np.asarray(series, dtype=float))
    n_train = int(round(config.train_fraction * len(series)))
    need = min_series_length(topology)
    if n_train < need:
        raise ValueError(f"training split has {n_train} samples; at least {need} are needed "
                         f"for {MIN_TRAINING_PAIRS} training pairs")
    train_part = series.slice(0, n_train)
    _, stats = standardize(train_part)
    X, y = training_pairs(train_part, topology, stats)

    Xv = yv = None
    if n_train < len(series):
        Xall, yall = training_pairs(series, topology, stats)
        first_val = n_train - topology.warmup  # pairs whose input time is past the split
        Xv, yv = Xall[first_val:], yall[first_val:]
        if yv.size == 0:
            Xv = yv = None

    model = WrnnModel.initialize(topology, config.seed, stats)
    params = model.params
    velocity = {k: np.zeros_like(v) for k, v in params.items()}
    lr = config.learning_rate
    report = TrainReport()

    grads, err = _batch_gradient(params, X, y)
    report.stop_reason = "max_epochs"
    for epoch in range(1, config.epochs + 1):
        new_velocity = {k: config.momentum * velocity[k] - lr * grads[k] for k in PARAM_NAMES}
        candidate = {k: params[k] + new_velocity[k] for k in PARAM_NAMES}
        new_grads, new_err = _batch_gradient(candidate, X, y)
        if not math.isfinite(new_err):
            raise TrainingError(f"training diverged at epoch {epoch} (mse={new_err}, lr={lr:.3g})")
        if new_err > err * config.max_error_growth:
            lr *= config.lr_decrease
            velocity = {k: np.zeros_like(v) for k, v in params.items()}
        else:
            if new_err < err:
                lr *= config.lr_increase
            params, velocity, grads, err = candidate, new_velocity, new_grads, new_err
        report.mse.append(err)
        report.learning_rate.append(lr)
        if Xv is not None:
            out, _ = _forward_batch(params, Xv)
            report.validation_mse.append(float(np.mean((out - yv) ** 2)))
        report.final_epoch = epoch
        if err == 0.0:
            report.stop_reason = "zero_error"
            break
    log.info("trained %d epochs, mse=%.4g", report.final_epoch, err)
    return WrnnModel(topology, params, stats, config.seed), report


@dataclass
class Prediction:
    """Forecasts in original units; ``values[j]`` predicts time ``indices[j]``."""

    indices: np.ndarray
    values: np.ndarray
    horizon: int

    def __len__(self):
        return self.indices.size


def predict_series(model, series, horizon=None, closed_loop=False):
    """One ``r``-step-ahead forecast for every boundary-free time step.

    The forecast made at step ``n`` targets ``n + r``; steps run from
    ``topology.warmup`` to ``len(series) - 1 - r``, so the number of forecasts
    is ``len(series) - warmup - r``.

    With ``closed_loop=True`` the feedback taps are the network's own earlier
    forecasts (made ``r`` steps before the time they predict) instead of the
    observed values, falling back to observations where no forecast exists.
    """
    topo = model.topology
    if horizon is not None and horizon != topo.horizon:
        raise ValueError(f"model was trained for horizon {topo.horizon}, not {horizon}")
    values = np.asarray(getattr(series, "values", series), dtype=float)
    z = (values - model.stats.mean) / model.stats.std
    coeffs = dwt.decompose_undecimated(z, topo.levels, topo.bank(), causal=True)
    r = topo.horizon
    steps = np.arange(topo.warmup, values.size - r)
    if steps.size == 0:
        raise ValueError(f"series of length {values.size} is too short to forecast; "
                         f"need more than {topo.warmup + r} samples")
    if not closed_loop:
        out, _ = _forward_batch(model.params, _design_matrix(coeffs, z, steps, topo))
    else:
        fed = z.copy()
        out = np.empty(steps.size)
        for j, n in enumerate(steps):
            out[j] = forward(model, build_input_vector(coeffs, fed, n, topo))
            fed[n + r] = out[j]
    return Prediction(steps + r, destandardize(out, model.stats), r)


# -- serialization ---------------------------------------------------------

def _format_array(a):
    return " ".join(float(v).hex() for v in np.asarray(a).ravel())


def save_model(model, path):
    """Write a model as versioned ``key = value`` text.

    Floats are stored in hexadecimal so loading is bit-exact.
    """
    t = model.topology
    lines = ["# wrnn model",
             f"format_version = {FORMAT_VERSION}",
             f"levels = {t.levels}",
             f"exogenous_delays = {t.exogenous_delays}",
             f"feedback_taps = {t.feedback_taps}",
             f"hidden = {' '.join(str(h) for h in t.hidden)}",
             f"horizon = {t.horizon}",
             f"wavelet = {t.wavelet}",
             f"extension = {t.extension}",
             f"seed = {model.seed}",
             f"norm_mean = {float(model.stats.mean).hex()}",
             f"norm_std = {float(model.stats.std).hex()}"]
    for name in PARAM_NAMES:
        lines.append(f"{name} = {_format_array(model.params[name])}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def load_model(path):
    entries = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, _, value = line.partition("=")
            entries[key.strip()] = value.strip()
    version = int(entries.get("format_version", -1))
    if version != FORMAT_VERSION:
        raise ValueError(f"unsupported model format version {version}")
    topo = WrnnTopology(levels=int(entries["levels"]),
                        exogenous_delays=int(entries["exogenous_delays"]),
                        feedback_taps=int(entries["feedback_taps"]),
                        hidden=tuple(int(h) for h in entries["hidden"].split()),
                        horizon=int(entries["horizon"]),
                        wavelet=entries["wavelet"],
                        extension=entries["extension"])
    shapes = topo.shapes()
    params = {}
    for name in PARAM_NAMES:
        flat = np.array([float.fromhex(v) for v in entries[name].split()])
        params[name] = flat.reshape(shapes[name])
    stats = NormStats(float.fromhex(entries["norm_mean"]), float.fromhex(entries["norm_std"]))
    return WrnnModel(topo, params, stats, int(entries["seed"]))
