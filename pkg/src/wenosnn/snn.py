"""Shallow-network weighting function: Delta features -> 16 GELU units -> softmax.

The model maps a three-point stencil to a pair of nonnegative weights summing
to one, and is used in place of the JS/Z kernels in the solvers.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.special import erfc as _erfc_lib
from scipy.special import erfcx

from wenosnn.weno import WeightPair, _unwrap, as_stencil, check_finite

N_FEATURES = 4
N_HIDDEN = 16
N_OUT = 2
DELTA_EPS = 1e-12

STAGES = ("init", "snn1", "snn2")

_SQRT2 = math.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


class ModelFormatError(ValueError):
    pass


class ChecksumMismatchError(ModelFormatError):
    pass


class UnsupportedVersionError(ModelFormatError):
    pass


class ShapeMismatchError(ModelFormatError):
    pass


def _delta(f0, f1, f2):
    d1 = np.abs(f0 - f1)
    d2 = np.abs(f1 - f2)
    d3 = np.abs(f0 - f2)
    d4 = np.abs(f0 - 2.0 * f1 + f2)
    norm = np.maximum(np.maximum(d1, d2), DELTA_EPS)
    return np.stack([d1 / norm, d2 / norm, d3 / norm, d4 / norm], axis=-1)


def delta_features(s) -> np.ndarray:
    """Normalized undivided differences, shape ``(..., 4)``.

    The first two entries are ``|f0-f1|`` and ``|f1-f2|`` divided by
    ``max(|f0-f1|, |f1-f2|, 1e-12)``; the last two are ``|f0-f2|`` and
    ``|f0-2f1+f2|`` under the same normalizer.
    """
    s = check_finite(as_stencil(s))
    return _delta(*s)


def _split(a):
    # Veltkamp split: hi carries the top 26 bits so hi*hi is exact
    c = 134217729.0 * a
    hi = c - (c - a)
    return hi, a - hi


def erfc(y):
    """Complementary error function with relative error below 1e-15 for normal results.

    For ``y >= 0.5`` it is ``exp(-y^2) * erfcx(y)`` with ``y^2`` carried as an
    exact two-term sum, so the Gaussian factor keeps full precision.
    """
    y = np.asarray(y, dtype=np.float64)
    out = np.array(_erfc_lib(y), ndmin=1)
    far = np.atleast_1d(y >= 0.5)
    if np.any(far):
        t = np.atleast_1d(y)[far]
        hi, lo = _split(t)
        sq = t * t
        sq_err = ((hi * hi - sq) + 2 * hi * lo) + lo * lo
        with np.errstate(over="ignore", invalid="ignore"):
            out[far] = np.exp(-sq) * np.exp(-sq_err) * erfcx(t)
    return out.reshape(y.shape)


def gelu(x):
    # x/2 * (1 + erf(x/sqrt2)) written with erfc so the negative tail does not cancel
    x = np.asarray(x, dtype=np.float64)
    return _unwrap(0.5 * x * erfc(-x / _SQRT2))


def gelu_grad(x):
    x = np.asarray(x, dtype=np.float64)
    return 0.5 * erfc(-x / _SQRT2) + x * _INV_SQRT_2PI * np.exp(-0.5 * x * x)


def softmax2(z0, z1) -> WeightPair:
    z0 = np.asarray(z0, dtype=np.float64)
    z1 = np.asarray(z1, dtype=np.float64)
    m = np.maximum(z0, z1)
    e0 = np.exp(z0 - m)
    e1 = np.exp(z1 - m)
    s = e0 + e1
    return WeightPair(_unwrap(e0 / s), _unwrap(e1 / s))


def _frozen(a, shape, name):
    arr = np.array(a, dtype=np.float64)
    if arr.shape != shape:
        raise ShapeMismatchError(f"{name} has shape {arr.shape}, expected {shape}")
    if not np.all(np.isfinite(arr)):
        raise ModelFormatError(f"{name} contains non-finite values")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class SnnModel:
    """Parameters of the weighting network.

    ``w0`` maps the 4 Delta features to 16 hidden units and ``w1`` maps the
    hidden units to the 2 logits, so a forward pass reads
    ``softmax(w1 @ gelu(w0 @ delta + b0) + b1)``.
    """

    w0: np.ndarray
    b0: np.ndarray
    w1: np.ndarray
    b1: np.ndarray
    stage: str = "init"
    seed: int = 0
    hyper: float = 0.0
    name: str = field(default="snn", compare=False)

    def __post_init__(self):
        for attr, shape in (
            ("w0", (N_HIDDEN, N_FEATURES)),
            ("b0", (N_HIDDEN,)),
            ("w1", (N_OUT, N_HIDDEN)),
            ("b1", (N_OUT,)),
        ):
            object.__setattr__(self, attr, _frozen(getattr(self, attr), shape, attr))
        if self.stage not in STAGES:
            raise ModelFormatError(f"unknown stage tag {self.stage!r}")
        if not 0 <= int(self.seed) < 2**64:
            raise ModelFormatError("seed must fit in an unsigned 64-bit integer")
        object.__setattr__(self, "seed", int(self.seed))
        object.__setattr__(self, "hyper", float(self.hyper))

    @classmethod
    def zeros(cls, **meta) -> "SnnModel":
        return cls(
            np.zeros((N_HIDDEN, N_FEATURES)),
            np.zeros(N_HIDDEN),
            np.zeros((N_OUT, N_HIDDEN)),
            np.zeros(N_OUT),
            **meta,
        )

    @classmethod
    def from_params(cls, params, **meta) -> "SnnModel":
        return cls(*params, **meta)

    @property
    def params(self) -> tuple[np.ndarray, ...]:
        return (self.w0, self.b0, self.w1, self.b1)

    def with_params(self, params, **meta) -> "SnnModel":
        kw = dict(stage=self.stage, seed=self.seed, hyper=self.hyper)
        kw.update(meta)
        return SnnModel(*params, **kw)

    def equals(self, other: "SnnModel") -> bool:
        """Bit-exact comparison of parameters and metadata."""
        return (
            all(
                a.shape == b.shape and a.tobytes() == b.tobytes()
                for a, b in zip(self.params, other.params)
            )
            and (self.stage, self.seed) == (other.stage, other.seed)
            and struct.pack("<d", self.hyper) == struct.pack("<d", other.hyper)
        )

    def logits(self, features: np.ndarray) -> np.ndarray:
        hidden = gelu_arr(features @ self.w0.T + self.b0)
        return hidden @ self.w1.T + self.b1

    def __call__(self, f0, f1, f2):
        z = self.logits(_delta(f0, f1, f2))
        w = softmax2(z[..., 0], z[..., 1])
        return np.asarray(w.w0), np.asarray(w.w1)


def gelu_arr(x: np.ndarray) -> np.ndarray:
    return 0.5 * x * erfc(-x / _SQRT2)


def forward(s, m: SnnModel) -> WeightPair:
    """Weights produced by the network for stencil(s) ``s``."""
    if not isinstance(m, SnnModel):
        raise ModelFormatError("forward expects an SnnModel")
    s = check_finite(as_stencil(s))
    w0, w1 = m(*s)
    return WeightPair(_unwrap(w0), _unwrap(w1))


# --- model file -------------------------------------------------------------

MAGIC = b"WSNN"
FORMAT_VERSION = 1
_HEADER = struct.Struct("<4sI3I")
_META = struct.Struct("<8sQd")
_CRC = struct.Struct("<Q")

_CRC64_POLY = 0xC96C5795D7870F42  # ECMA-182, reflected (CRC-64/XZ)


def _crc64_table():
    table = []
    for i in range(256):
        crc = i
        for _ in range(8):
            crc = (crc >> 1) ^ _CRC64_POLY if crc & 1 else crc >> 1
        table.append(crc)
    return table


_CRC64_TABLE = _crc64_table()


def crc64(data: bytes) -> int:
    """CRC-64/XZ of ``data``."""
    crc = 0xFFFFFFFFFFFFFFFF
    for b in data:
        crc = _CRC64_TABLE[(crc ^ b) & 0xFF] ^ (crc >> 8)
    return crc ^ 0xFFFFFFFFFFFFFFFF


def model_to_bytes(m: SnnModel) -> bytes:
    parts = [_HEADER.pack(MAGIC, FORMAT_VERSION, N_FEATURES, N_HIDDEN, N_OUT)]
    for p in m.params:
        parts.append(np.ascontiguousarray(p, dtype="<f8").tobytes())
    parts.append(_META.pack(m.stage.encode("ascii"), m.seed, m.hyper))
    payload = b"".join(parts)
    return payload + _CRC.pack(crc64(payload))


def model_from_bytes(data: bytes) -> SnnModel:
    if len(data) < _HEADER.size + _CRC.size or data[:4] != MAGIC:
        raise ModelFormatError("not a WSNN model file")
    payload, (stored,) = data[: -_CRC.size], _CRC.unpack(data[-_CRC.size :])
    if crc64(payload) != stored:
        raise ChecksumMismatchError("model file checksum mismatch")
    _, version, nf, nh, no = _HEADER.unpack_from(payload)
    if version != FORMAT_VERSION:
        raise UnsupportedVersionError(f"unsupported model file version {version}")
    if (nf, nh, no) != (N_FEATURES, N_HIDDEN, N_OUT):
        raise ShapeMismatchError(f"shape header {(nf, nh, no)} != {(N_FEATURES, N_HIDDEN, N_OUT)}")
    shapes = [(nh, nf), (nh,), (no, nh), (no,)]
    expected = _HEADER.size + 8 * sum(math.prod(s) for s in shapes) + _META.size
    if len(payload) != expected:
        raise ShapeMismatchError(f"payload is {len(payload)} bytes, expected {expected}")
    offset = _HEADER.size
    params = []
    for shape in shapes:
        count = math.prod(shape)
        params.append(np.frombuffer(payload, "<f8", count, offset).reshape(shape))
        offset += 8 * count
    tag, seed, hyper = _META.unpack_from(payload, offset)
    return SnnModel(*params, stage=tag.rstrip(b"\0").decode("ascii"), seed=seed, hyper=hyper)


def save_model(m: SnnModel, path) -> Path:
    path = Path(path)
    path.write_bytes(model_to_bytes(m))
    return path


def load_model(path) -> SnnModel:
    return model_from_bytes(Path(path).read_bytes())
