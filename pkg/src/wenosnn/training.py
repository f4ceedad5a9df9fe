"""Two-stage supervised training of the SNN weighting function.

Stage 1 fits the network to the linear weights on smooth stencils (loss L0).
Stage 2 fits it to JS weights on a piecewise-smooth profile while pulling it
towards the linear weights, either through a smoothness-weighted MSE (L1) or
a log-space loss with a global linear term (L2). Gradients are analytic and
the optimizer is Adam with decoupled weight decay.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Callable, NamedTuple

import numpy as np

from wenosnn.problems import eval_train_ic
from wenosnn.snn import N_FEATURES, N_HIDDEN, N_OUT, ModelFormatError, SnnModel, _delta, gelu_arr, gelu_grad
from wenosnn.solver1d import lf_split
from wenosnn.weno import DEFAULT_KERNEL, InvalidInputError, KernelConfig, WeightPair, _js

LN2 = math.log(2.0)
LABEL_FLOOR = 1e-300


class TrainingDivergedError(RuntimeError):
    def __init__(self, stage: str, epoch: int, loss: float):
        super().__init__(f"training diverged in stage {stage!r} at epoch {epoch} (loss={loss})")
        self.stage = stage
        self.epoch = epoch


class LabelFloorWarning(RuntimeWarning):
    pass


@dataclass(frozen=True)
class LossConfig:
    kind: str = "L2"
    c: float = 35.0
    d: float = 2.5

    def __post_init__(self):
        if self.kind not in ("L0", "L1", "L2"):
            raise ValueError(f"unknown loss kind {self.kind!r}")
        if not self.c > 0:
            raise ValueError("C must be positive")
        if not self.d >= 0:
            raise ValueError("D must be nonnegative")

    @property
    def hyper(self) -> float:
        return {"L0": 0.0, "L1": self.c, "L2": self.d}[self.kind]


@dataclass(frozen=True)
class TrainConfig:
    lr: float = 1e-3
    weight_decay: float = 0.01
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    epochs: int = 500
    batch_size: int | None = None  # None: full batch
    n_samples: int = 20_000  # stage-1 dataset size

    def __post_init__(self):
        if not self.lr > 0:
            raise ValueError("learning rate must be positive")
        if not (0 <= self.beta1 < 1 and 0 <= self.beta2 < 1):
            raise ValueError("Adam betas must lie in [0, 1)")


STAGE1 = TrainConfig(epochs=500)
STAGE2 = TrainConfig(epochs=5000)


# --- datasets -----------------------------------------------------------------

class TrainSample(NamedTuple):
    stencil: tuple
    label: WeightPair
    lam: float


@dataclass(frozen=True)
class TrainingSet:
    """Aligned arrays: stencils (n, 3), labels (n, 2), lam (n,)."""

    stencils: np.ndarray
    labels: np.ndarray | None = None
    lam: np.ndarray | None = None

    def __len__(self):
        return len(self.stencils)

    def __getitem__(self, i) -> TrainSample:
        label = WeightPair(*self.labels[i]) if self.labels is not None else None
        lam = float(self.lam[i]) if self.lam is not None else 0.0
        return TrainSample(tuple(self.stencils[i]), label, lam)

    def repeat(self, k: int) -> "TrainingSet":
        def rep(a):
            return None if a is None else np.concatenate([a] * k)

        return TrainingSet(rep(self.stencils), rep(self.labels), rep(self.lam))

    def take(self, idx) -> "TrainingSet":
        def sel(a):
            return None if a is None else a[idx]

        return TrainingSet(sel(self.stencils), sel(self.labels), sel(self.lam))


def gen_stage1_dataset(seed: int, n_samples: int, h: float | None = None) -> np.ndarray:
    """Three-point samples of random smooth functions, shape (n, 3).

    Families cycle through constant, polynomial (degree 1-3), trigonometric
    and exponential, so a quarter of the stencils are exactly constant.
    Spacing is log-uniform in [1e-3, 1e-1] unless ``h`` is given.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be at least 1")
    rng = np.random.default_rng(seed)
    n = n_samples
    family = np.arange(n) % 4
    hh = np.full(n, h) if h is not None else 10 ** rng.uniform(-3, -1, n)
    x0 = rng.uniform(-1, 1, n)
    amp = 10 ** rng.uniform(-2, 1, n)
    shift = rng.uniform(-1, 1, n)
    coef = rng.normal(size=(n, 4))
    degree = rng.integers(1, 4, n)
    k_trig = rng.uniform(0.5, 2 * np.pi, n)
    phase = rng.uniform(0, 2 * np.pi, n)
    k_exp = rng.uniform(-3, 3, n)

    def evaluate(x):
        poly = sum(np.where(degree >= p, coef[:, p], 0.0) * x**p for p in range(1, 4)) + coef[:, 0]
        trig = np.sin(k_trig * x + phase)
        expo = np.exp(k_exp * x)
        val = np.select([family == 1, family == 2, family == 3], [poly, trig, expo], 0.0)
        return shift + amp * val

    pts = x0[:, None] + hh[:, None] * np.array([-1.0, 0.0, 1.0])
    return np.stack([evaluate(pts[:, j]) for j in range(3)], axis=1)


def lambda_smoothness(label, c: float = 35.0):
    """``exp(-(r - 1)/C)`` with ``r = max(2 w0/w1, w1/(2 w0))``.

    Zero label components are floored at 1e-300 so doubly degenerate labels
    give lambda = 0 instead of NaN.
    """
    w0 = np.maximum(np.asarray(label[0], dtype=np.float64), LABEL_FLOOR)
    w1 = np.maximum(np.asarray(label[1], dtype=np.float64), LABEL_FLOOR)
    r = np.maximum(2 * w0 / w1, w1 / (2 * w0))
    lam = np.exp(-(r - 1) / c)
    return lam.item() if lam.ndim == 0 else lam


def gen_stage2_dataset(cfg: KernelConfig = DEFAULT_KERNEL, loss: LossConfig = LossConfig()) -> TrainingSet:
    """Stencils of the split piecewise profile on 200 cells of [-1, 1].

    Rows 0..199 are the periodic f+ stencils (f[i-1], f[i], f[i+1]); rows
    200..399 the reversed f- stencils (f[i+2], f[i+1], f[i]).
    """
    n, dx = 200, 0.01
    x = -1 + dx / 2 + dx * np.arange(n)
    u = eval_train_ic(x)
    fp, fm = lf_split(u, u, 1.0)
    plus = np.stack([np.roll(fp, 1), fp, np.roll(fp, -1)], axis=1)
    minus = np.stack([np.roll(fm, -2), np.roll(fm, -1), fm], axis=1)
    stencils = np.concatenate([plus, minus])
    labels = np.stack(_js(stencils[:, 0], stencils[:, 1], stencils[:, 2], cfg.epsilon_js), axis=1)
    lam = lambda_smoothness(labels.T, loss.c) if loss.kind == "L1" else None
    return TrainingSet(stencils, labels, lam)


# --- losses -----------------------------------------------------------------

def _as_pairs(predictions) -> np.ndarray:
    p = np.asarray(predictions, dtype=np.float64)
    if p.ndim == 1:
        p = p[None, :]
    if p.shape[-1] != 2:
        raise InvalidInputError("predictions must be weight pairs")
    return p


def loss_l0(predictions) -> float:
    """Mean over samples of ``(log(2 w0) - log(w1))**2``."""
    p = _as_pairs(predictions)
    if np.any(p <= 0):
        raise InvalidInputError("L0 needs strictly positive weights")
    return float(np.mean((np.log(2 * p[:, 0]) - np.log(p[:, 1])) ** 2))


def _labels_lam(batch: TrainingSet, n: int, need_lam: bool):
    if len(batch) != n:
        raise InvalidInputError(f"{len(batch)} samples but {n} predictions")
    if batch.labels is None:
        raise InvalidInputError("batch has no labels")
    if need_lam and batch.lam is None:
        raise InvalidInputError("batch has no smoothness indicators (lambda)")
    return batch.labels, batch.lam


def loss_l1(batch: TrainingSet, predictions) -> float:
    """Sum of ``(1-lam)*|w - w_js|^2 + lam*(2 w0 - w1)^2`` over the batch."""
    p = _as_pairs(predictions)
    y, lam = _labels_lam(batch, len(p), True)
    js = np.sum((p - y) ** 2, axis=1)
    ln = (2 * p[:, 0] - p[:, 1]) ** 2
    return float(np.sum((1 - lam) * js + lam * ln))


def _floor_labels(y):
    bad = y <= 0
    if np.any(bad):
        warnings.warn(f"{int(bad.sum())} label component(s) floored at {LABEL_FLOOR}", LabelFloorWarning)
        y = np.maximum(y, LABEL_FLOOR)
    return y


def loss_l2(batch: TrainingSet, predictions, d: float = 2.5) -> float:
    """Sum of squared log errors to the JS labels plus ``D`` times the log-ratio term."""
    p = _as_pairs(predictions)
    y, _ = _labels_lam(batch, len(p), False)
    if np.any(p <= 0):
        raise InvalidInputError("L2 needs strictly positive predictions")
    y = _floor_labels(y)
    js = np.sum((np.log(p) - np.log(y)) ** 2)
    ln = np.sum((np.log(2 * p[:, 0]) - np.log(p[:, 1])) ** 2)
    return float(js + d * ln)


# --- forward/backward -------------------------------------------------------

class _Forward(NamedTuple):
    x: np.ndarray
    h: np.ndarray
    a: np.ndarray
    s: np.ndarray  # logit difference z0 - z1
    w0: np.ndarray
    w1: np.ndarray
    logw0: np.ndarray
    logw1: np.ndarray


def _forward(params, stencils) -> _Forward:
    w0m, b0, w1m, b1 = params
    x = _delta(stencils[:, 0], stencils[:, 1], stencils[:, 2])
    h = x @ w0m.T + b0
    a = gelu_arr(h)
    z = a @ w1m.T + b1
    s = z[:, 0] - z[:, 1]
    # log-softmax in terms of s, stable for large |s|
    logw0 = -np.logaddexp(0.0, -s)
    logw1 = -np.logaddexp(0.0, s)
    return _Forward(x, h, a, s, np.exp(logw0), np.exp(logw1), logw0, logw1)


def _loss_and_ds(fw: _Forward, batch: TrainingSet, loss: LossConfig):
    """Loss value and its derivative with respect to the logit difference."""
    n = len(fw.s)
    q = LN2 + fw.s  # log(2 w0) - log(w1)
    if loss.kind == "L0":
        return float(np.mean(q * q)), 2 * q / n
    y, lam = _labels_lam(batch, n, loss.kind == "L1")
    w0, w1 = fw.w0, fw.w1
    if loss.kind == "L1":
        e0, e1 = w0 - y[:, 0], w1 - y[:, 1]
        lin = 2 * w0 - w1
        val = np.sum((1 - lam) * (e0 * e0 + e1 * e1) + lam * lin * lin)
        # dw0/ds = w0 w1 = -dw1/ds
        ds = (2 * (1 - lam) * (e0 - e1) + 6 * lam * lin) * w0 * w1
        return float(val), ds
    y = _floor_labels(y)
    r0 = fw.logw0 - np.log(y[:, 0])
    r1 = fw.logw1 - np.log(y[:, 1])
    val = np.sum(r0 * r0 + r1 * r1) + loss.d * np.sum(q * q)
    # dlog w0/ds = w1, dlog w1/ds = -w0
    ds = 2 * r0 * w1 - 2 * r1 * w0 + 2 * loss.d * q
    return float(val), ds


def _backward(params, fw: _Forward, ds):
    _, _, w1m, _ = params
    dz = np.stack([ds, -ds], axis=1)
    gw1 = dz.T @ fw.a
    gb1 = dz.sum(axis=0)
    dh = (dz @ w1m) * gelu_grad(fw.h)
    gw0 = dh.T @ fw.x
    gb0 = dh.sum(axis=0)
    return (gw0, gb0, gw1, gb1)


def _batch_of(batch) -> TrainingSet:
    if isinstance(batch, TrainingSet):
        return batch
    return TrainingSet(np.asarray(batch, dtype=np.float64).reshape(-1, 3))


def loss_value(m: SnnModel, batch, loss: LossConfig) -> float:
    batch = _batch_of(batch)
    fw = _forward(m.params, batch.stencils)
    return _loss_and_ds(fw, batch, loss)[0]


def value_and_gradients(m: SnnModel, batch, loss: LossConfig):
    batch = _batch_of(batch)
    if len(batch) == 0:
        raise InvalidInputError("empty batch")
    fw = _forward(m.params, batch.stencils)
    val, ds = _loss_and_ds(fw, batch, loss)
    return val, m.with_params(_backward(m.params, fw, ds))


def gradients(m: SnnModel, batch, loss: LossConfig) -> SnnModel:
    """Exact gradient of the selected loss, returned as an `SnnModel`-shaped set."""
    return value_and_gradients(m, batch, loss)[1]


# --- optimizer --------------------------------------------------------------

@dataclass
class AdamState:
    m: tuple
    v: tuple
    step: int = 0

    @classmethod
    def zeros_like(cls, model: SnnModel) -> "AdamState":
        return cls(tuple(np.zeros_like(p) for p in model.params), tuple(np.zeros_like(p) for p in model.params))


def adam_step(model: SnnModel, grad: SnnModel, state: AdamState, cfg: TrainConfig):
    """Bias-corrected Adam with weight decay applied directly to the parameters."""
    t = state.step + 1
    b1, b2 = cfg.beta1, cfg.beta2
    new_m, new_v, new_p = [], [], []
    for p, g, m, v in zip(model.params, grad.params, state.m, state.v):
        m = b1 * m + (1 - b1) * g
        v = b2 * v + (1 - b2) * g * g
        m_hat = m / (1 - b1**t)
        v_hat = v / (1 - b2**t)
        new_p.append(p - cfg.lr * (m_hat / (np.sqrt(v_hat) + cfg.eps)) - cfg.lr * cfg.weight_decay * p)
        new_m.append(m)
        new_v.append(v)
    return model.with_params(new_p), AdamState(tuple(new_m), tuple(new_v), t)


# --- training loop ----------------------------------------------------------

def init_model(seed: int) -> SnnModel:
    """Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) per layer."""
    rng = np.random.default_rng([seed, 0])
    k0 = 1 / math.sqrt(N_FEATURES)
    k1 = 1 / math.sqrt(N_HIDDEN)
    return SnnModel(
        rng.uniform(-k0, k0, (N_HIDDEN, N_FEATURES)),
        rng.uniform(-k0, k0, N_HIDDEN),
        rng.uniform(-k1, k1, (N_OUT, N_HIDDEN)),
        rng.uniform(-k1, k1, N_OUT),
        stage="init",
        seed=seed,
    )


def fit(model: SnnModel, data: TrainingSet, loss: LossConfig, cfg: TrainConfig, stage: str,
        seed: int = 0, log: Callable | None = None) -> SnnModel:
    """Run ``cfg.epochs`` epochs of Adam; ``log(stage, epoch, loss)`` is called per epoch."""
    state = AdamState.zeros_like(model)
    rng = np.random.default_rng([seed, 1 if stage == "init" else 2])
    n = len(data)
    for epoch in range(cfg.epochs):
        if cfg.batch_size is None or cfg.batch_size >= n:
            batches = [data]
        else:
            order = rng.permutation(n)
            batches = [data.take(order[i : i + cfg.batch_size]) for i in range(0, n, cfg.batch_size)]
        total = 0.0
        for batch in batches:
            try:
                with np.errstate(over="ignore", invalid="ignore"):
                    val, grad = value_and_gradients(model, batch, loss)
                if not math.isfinite(val):
                    raise TrainingDivergedError(stage, epoch, val)
                model, state = adam_step(model, grad, state, cfg)
            except ModelFormatError:  # non-finite gradients or parameters
                raise TrainingDivergedError(stage, epoch, float("nan")) from None
            total += val
        if log is not None:
            log(stage, epoch, total / len(batches))
    final = loss_value(model, data, loss)
    if not math.isfinite(final):
        raise TrainingDivergedError(stage, cfg.epochs, final)
    return model


def train_stage1(cfg: TrainConfig = STAGE1, seed: int = 0, log=None) -> SnnModel:
    data = TrainingSet(gen_stage1_dataset(seed, cfg.n_samples))
    return fit(init_model(seed), data, LossConfig("L0"), cfg, "init", seed, log)


def train_stage2(model: SnnModel, cfg: TrainConfig = STAGE2, loss: LossConfig = LossConfig(),
                 seed: int = 0, kernel: KernelConfig = DEFAULT_KERNEL, log=None) -> SnnModel:
    if loss.kind == "L0":
        raise ValueError("stage 2 uses loss L1 or L2")
    data = gen_stage2_dataset(kernel, loss)
    stage = "snn1" if loss.kind == "L1" else "snn2"
    out = fit(model, data, loss, cfg, stage, seed, log)
    return out.with_params(out.params, stage=stage, hyper=loss.hyper)


def train(stage1_cfg: TrainConfig = STAGE1, stage2_cfg: TrainConfig = STAGE2,
          loss: LossConfig = LossConfig(), seed: int = 0, log=None) -> SnnModel:
    """Full pipeline: seeded init, stage 1 on smooth data, stage 2 with ``loss``."""
    model = train_stage1(stage1_cfg, seed, log)
    return train_stage2(model, stage2_cfg, loss, seed, log=log)


# --- config files and logs ----------------------------------------------------

@dataclass(frozen=True)
class TrainingPlan:
    """Everything `train` needs, as read from a TOML or JSON file."""

    seed: int = 0
    loss: LossConfig = LossConfig()
    stage1: TrainConfig = STAGE1
    stage2: TrainConfig = STAGE2

    _KEYS = ("seed", "loss", "c", "d", "lr", "weight_decay", "beta1", "beta2", "eps",
             "stage1_epochs", "stage2_epochs", "batch_size", "n_samples")

    @classmethod
    def from_dict(cls, d: dict) -> "TrainingPlan":
        unknown = set(d) - set(cls._KEYS)
        if unknown:
            raise ValueError(f"unknown training config keys: {sorted(unknown)}")
        seed = int(d.get("seed", 0))
        if not 0 <= seed < 2**64:
            raise ValueError("seed must fit in 64 bits")
        loss = LossConfig(d.get("loss", "L2"), float(d.get("c", 35.0)), float(d.get("d", 2.5)))
        shared = {k: d[k] for k in ("lr", "weight_decay", "beta1", "beta2", "eps", "batch_size") if k in d}
        s1 = replace(STAGE1, **shared, epochs=int(d.get("stage1_epochs", STAGE1.epochs)),
                     n_samples=int(d.get("n_samples", STAGE1.n_samples)))
        s2 = replace(STAGE2, **shared, epochs=int(d.get("stage2_epochs", STAGE2.epochs)))
        return cls(seed, loss, s1, s2)

    @classmethod
    def load(cls, path) -> "TrainingPlan":
        from pathlib import Path

        path = Path(path)
        text = path.read_text()
        if path.suffix == ".toml":
            import tomli

            data = tomli.loads(text)
        else:
            import json

            data = json.loads(text)
        return cls.from_dict(data)

    def run(self, log=None) -> SnnModel:
        return train(self.stage1, self.stage2, self.loss, self.seed, log)


class CsvLog:
    """Collects ``(stage, epoch, loss)`` rows; ``dump`` writes them as CSV."""

    def __init__(self):
        self.rows = []

    def __call__(self, stage, epoch, loss):
        self.rows.append((stage, epoch, loss))

    def dump(self, path):
        with open(path, "w") as fh:
            fh.write("stage,epoch,loss\n")
            for stage, epoch, loss in self.rows:
                fh.write(f"{stage},{epoch},{float(loss)!r}\n")
