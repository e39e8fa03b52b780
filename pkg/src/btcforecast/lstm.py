"""Single-layer LSTM with a dense head, trained by full-batch BPTT + Adam.

The cell follows the standard formulation: per step, with z = [h; x],

    f, i, o = sigmoid(W. @ z + b.)      (forget / input / output gates)
    g       = tanh(Wg @ z + bg)         (candidate)
    c       = f * c_prev + i * g
    h       = o * tanh(c)

and prediction = Wd @ h_last + bd after the final step. Training minimizes
mean absolute error with one Adam step per epoch (full batch), which makes
runs bit-reproducible for a fixed seed. Everything is float64.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .dataset import SupervisedDataset, unscale_column

PARAM_NAMES = ("Wf", "Wi", "Wo", "Wg", "bf", "bi", "bo", "bg", "Wd", "bd")


class TrainingDiverged(RuntimeError):
    """Raised when the training loss stops being finite."""


@dataclass(frozen=True)
class LstmConfig:
    n_features: int = 1
    hidden_size: int = 32
    lag: int = 1
    epochs: int = 200
    learning_rate: float = 0.01
    seed: int = 0

    def __post_init__(self):
        if self.n_features not in (1, 2):
            raise ValueError("n_features must be 1 or 2")
        if self.hidden_size < 1 or self.lag < 1 or self.epochs < 0:
            raise ValueError("hidden_size and lag must be positive, epochs >= 0")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")


@dataclass
class LstmModel:
    """All cell parameters. Gate weights act on z = [h; x], so their shape
    is (hidden, hidden + n_features)."""

    Wf: np.ndarray
    Wi: np.ndarray
    Wo: np.ndarray
    Wg: np.ndarray
    bf: np.ndarray
    bi: np.ndarray
    bo: np.ndarray
    bg: np.ndarray
    Wd: np.ndarray
    bd: np.ndarray
    n_features: int
    hidden_size: int
    lag: int

    def params(self) -> dict[str, np.ndarray]:
        return {name: getattr(self, name) for name in PARAM_NAMES}

    def with_params(self, params: dict[str, np.ndarray]) -> "LstmModel":
        return LstmModel(
            **params,
            n_features=self.n_features,
            hidden_size=self.hidden_size,
            lag=self.lag,
        )


@dataclass
class AdamState:
    """Per-parameter first/second moments and the step counter."""

    m: dict[str, np.ndarray]
    v: dict[str, np.ndarray]
    t: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    @classmethod
    def for_params(cls, params: dict[str, np.ndarray]) -> "AdamState":
        return cls(
            m={k: np.zeros_like(p) for k, p in params.items()},
            v={k: np.zeros_like(p) for k, p in params.items()},
        )


@dataclass
class TrainHistory:
    """Per-epoch MAE (scaled units) plus wall-clock timings in ms."""

    losses: list[float] = field(default_factory=list)
    build_time_ms: float = 0.0
    epoch_times_ms: list[float] = field(default_factory=list)

    @property
    def train_time_ms(self) -> float:
        return float(sum(self.epoch_times_ms))


def init(config: LstmConfig) -> LstmModel:
    """Seeded uniform [-k, k] weights with k = 1/sqrt(hidden); zero biases."""
    rng = np.random.default_rng(config.seed)
    h, f = config.hidden_size, config.n_features
    k = 1.0 / np.sqrt(h)

    def w(*shape):
        return rng.uniform(-k, k, size=shape)

    return LstmModel(
        Wf=w(h, h + f),
        Wi=w(h, h + f),
        Wo=w(h, h + f),
        Wg=w(h, h + f),
        bf=np.zeros(h),
        bi=np.zeros(h),
        bo=np.zeros(h),
        bg=np.zeros(h),
        Wd=w(1, h),
        bd=np.zeros(1),
        n_features=f,
        hidden_size=h,
        lag=config.lag,
    )


def _sigmoid(x: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-x))


@dataclass
class _Cache:
    z: list[np.ndarray]       # (n, h+f) per step
    f: list[np.ndarray]
    i: list[np.ndarray]
    o: list[np.ndarray]
    g: list[np.ndarray]
    c_prev: list[np.ndarray]
    tanh_c: list[np.ndarray]
    h_last: np.ndarray


def _forward_batch(model: LstmModel, windows: np.ndarray) -> tuple[np.ndarray, _Cache]:
    """Run the recurrence over a (n, lag, n_features) batch."""
    n, lag, f = windows.shape
    h = model.hidden_size
    if f != model.n_features:
        raise ValueError(f"model expects {model.n_features} features, got {f}")
    if not np.isfinite(windows).all():
        raise ValueError("non-finite input window")

    H = np.zeros((n, h))
    C = np.zeros((n, h))
    cache = _Cache([], [], [], [], [], [], [], H)
    for t in range(lag):
        z = np.concatenate([H, windows[:, t, :]], axis=1)
        ft = _sigmoid(z @ model.Wf.T + model.bf)
        it = _sigmoid(z @ model.Wi.T + model.bi)
        ot = _sigmoid(z @ model.Wo.T + model.bo)
        gt = np.tanh(z @ model.Wg.T + model.bg)
        cache.z.append(z)
        cache.f.append(ft)
        cache.i.append(it)
        cache.o.append(ot)
        cache.g.append(gt)
        cache.c_prev.append(C)
        C = ft * C + it * gt
        tanh_c = np.tanh(C)
        cache.tanh_c.append(tanh_c)
        H = ot * tanh_c
    cache.h_last = H
    pred = H @ model.Wd.T + model.bd
    return pred[:, 0], cache


def _backward_batch(model: LstmModel, cache: _Cache, d_pred: np.ndarray) -> dict[str, np.ndarray]:
    """Exact gradients, summed over the batch weighted by d_pred."""
    h = model.hidden_size
    lag = len(cache.z)
    grads = {name: np.zeros_like(p) for name, p in model.params().items()}

    grads["Wd"] += d_pred[None, :] @ cache.h_last
    grads["bd"] += d_pred.sum(keepdims=True)
    dH = np.outer(d_pred, model.Wd[0])
    dC = np.zeros_like(dH)
    for t in reversed(range(lag)):
        ft, it, ot, gt = cache.f[t], cache.i[t], cache.o[t], cache.g[t]
        tanh_c = cache.tanh_c[t]
        dO = dH * tanh_c
        dC = dC + dH * ot * (1.0 - tanh_c * tanh_c)
        dF = dC * cache.c_prev[t]
        dI = dC * gt
        dG = dC * it
        da_f = dF * ft * (1.0 - ft)
        da_i = dI * it * (1.0 - it)
        da_o = dO * ot * (1.0 - ot)
        da_g = dG * (1.0 - gt * gt)
        z = cache.z[t]
        grads["Wf"] += da_f.T @ z
        grads["Wi"] += da_i.T @ z
        grads["Wo"] += da_o.T @ z
        grads["Wg"] += da_g.T @ z
        grads["bf"] += da_f.sum(axis=0)
        grads["bi"] += da_i.sum(axis=0)
        grads["bo"] += da_o.sum(axis=0)
        grads["bg"] += da_g.sum(axis=0)
        dz = da_f @ model.Wf + da_i @ model.Wi + da_o @ model.Wo + da_g @ model.Wg
        dH = dz[:, :h]
        dC = dC * ft
    return grads


def forward(model: LstmModel, window: np.ndarray) -> tuple[float, _Cache]:
    """Prediction for one (lag, n_features) window, plus the cache backward needs."""
    window = np.asarray(window, dtype=np.float64)
    if window.ndim == 1:
        window = window[:, None]
    preds, cache = _forward_batch(model, window[None, :, :])
    return float(preds[0]), cache


def backward(model: LstmModel, cache: _Cache, d_prediction: float) -> dict[str, np.ndarray]:
    """Gradients of d_prediction * prediction w.r.t. every parameter (BPTT)."""
    return _backward_batch(model, cache, np.array([float(d_prediction)]))


def adam_step(
    params: dict[str, np.ndarray],
    grads: dict[str, np.ndarray],
    state: AdamState,
    lr: float,
) -> tuple[dict[str, np.ndarray], AdamState]:
    """One bias-corrected Adam update; returns new params and state."""
    t = state.t + 1
    new_params, new_m, new_v = {}, {}, {}
    for name, p in params.items():
        g = grads[name]
        if g.shape != p.shape:
            raise ValueError(f"gradient shape mismatch for {name}")
        m = state.beta1 * state.m[name] + (1.0 - state.beta1) * g
        v = state.beta2 * state.v[name] + (1.0 - state.beta2) * g * g
        m_hat = m / (1.0 - state.beta1**t)
        v_hat = v / (1.0 - state.beta2**t)
        new_params[name] = p - lr * m_hat / (np.sqrt(v_hat) + state.eps)
        new_m[name] = m
        new_v[name] = v
    return new_params, AdamState(new_m, new_v, t, state.beta1, state.beta2, state.eps)


def train(config: LstmConfig, dataset: SupervisedDataset) -> tuple[LstmModel, TrainHistory]:
    """Full-batch MAE training: one Adam step per epoch, deterministic per seed."""
    if len(dataset) == 0:
        raise ValueError("dataset is empty")
    if dataset.inputs.shape[2] != config.n_features:
        raise ValueError(
            f"dataset has {dataset.inputs.shape[2]} features, config expects {config.n_features}"
        )
    if dataset.lag != config.lag:
        raise ValueError(f"dataset lag {dataset.lag} != config lag {config.lag}")

    t0 = time.perf_counter()
    model = init(config)
    history = TrainHistory(build_time_ms=(time.perf_counter() - t0) * 1000.0)

    X = np.asarray(dataset.inputs, dtype=np.float64)
    y = np.asarray(dataset.targets, dtype=np.float64)
    n = len(y)
    params = model.params()
    state = AdamState.for_params(params)
    for epoch in range(config.epochs):
        t_epoch = time.perf_counter()
        preds, cache = _forward_batch(model, X)
        resid = preds - y
        loss = float(np.mean(np.abs(resid)))
        if not np.isfinite(loss):
            raise TrainingDiverged(f"non-finite loss {loss} at epoch {epoch}")
        # MAE subgradient: sign(residual), 0 at an exact zero residual.
        d_pred = np.sign(resid) / n
        grads = _backward_batch(model, cache, d_pred)
        params, state = adam_step(params, grads, state, config.learning_rate)
        model = model.with_params(params)
        history.losses.append(loss)
        history.epoch_times_ms.append((time.perf_counter() - t_epoch) * 1000.0)
    return model, history


def predict_series(model: LstmModel, dataset: SupervisedDataset) -> np.ndarray:
    """One prediction per sample, inverse-scaled to original USD units."""
    preds, _ = _forward_batch(model, np.asarray(dataset.inputs, dtype=np.float64))
    return unscale_column(preds, dataset.scaler, "price")


def predict_scaled(model: LstmModel, dataset: SupervisedDataset) -> np.ndarray:
    """One prediction per sample in scaled [0, 1] units."""
    preds, _ = _forward_batch(model, np.asarray(dataset.inputs, dtype=np.float64))
    return preds


def save_model(model: LstmModel, path: str | Path) -> None:
    """Flat text format: a header line, then per tensor a ``name dims...``
    line followed by the row-major values."""
    lines = [
        "btcforecast-lstm 1",
        f"n_features {model.n_features}",
        f"hidden_size {model.hidden_size}",
        f"lag {model.lag}",
    ]
    for name, p in model.params().items():
        dims = " ".join(str(d) for d in p.shape)
        lines.append(f"{name} {dims}")
        lines.append(" ".join(repr(v) for v in p.ravel().tolist()))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_model(path: str | Path) -> LstmModel:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or not lines[0].startswith("btcforecast-lstm"):
        raise ValueError(f"not a model file: {path}")
    meta = {}
    for line in lines[1:4]:
        key, value = line.split()
        meta[key] = int(value)
    tensors: dict[str, np.ndarray] = {}
    i = 4
    while i < len(lines):
        if not lines[i].strip():
            i += 1
            continue
        head = lines[i].split()
        name, shape = head[0], tuple(int(d) for d in head[1:])
        values = np.array([float(v) for v in lines[i + 1].split()])
        tensors[name] = values.reshape(shape)
        i += 2
    missing = set(PARAM_NAMES) - set(tensors)
    if missing:
        raise ValueError(f"model file missing tensors: {sorted(missing)}")
    return LstmModel(**tensors, **meta)
