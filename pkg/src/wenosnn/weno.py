"""Classical WENO3 weighting kernels on three-point stencils.

All functions broadcast: the stencil entries may be scalars or numpy arrays
of a common shape, in which case every output is an array of that shape.
The right-biased reconstruction reuses the same kernels on the reversed
stencil ``(f[i+2], f[i+1], f[i])``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

D0 = 1.0 / 3.0
D1 = 2.0 / 3.0


class InvalidInputError(ValueError):
    """Raised when a stencil or label contains non-finite or invalid values."""


class Stencil(NamedTuple):
    f0: np.ndarray | float
    f1: np.ndarray | float
    f2: np.ndarray | float

    def shift(self, delta: float) -> "Stencil":
        return Stencil(self.f0 + delta, self.f1 + delta, self.f2 + delta)

    def scale(self, lam: float) -> "Stencil":
        return Stencil(lam * self.f0, lam * self.f1, lam * self.f2)

    def reversed(self) -> "Stencil":
        return Stencil(self.f2, self.f1, self.f0)


class SmoothnessPair(NamedTuple):
    beta0: np.ndarray | float
    beta1: np.ndarray | float

    @property
    def tau3(self):
        return np.abs(self.beta0 - self.beta1)


class WeightPair(NamedTuple):
    w0: np.ndarray | float
    w1: np.ndarray | float


@dataclass(frozen=True)
class KernelConfig:
    epsilon_js: float = 1e-6
    epsilon_z: float = 1e-40

    def __post_init__(self):
        if not (self.epsilon_js > 0 and self.epsilon_z > 0):
            raise ValueError("kernel epsilons must be strictly positive")


DEFAULT_KERNEL = KernelConfig()


def as_stencil(s) -> Stencil:
    """Coerce a 3-sequence (or a (..., 3) array) to a float64 `Stencil`."""
    if isinstance(s, Stencil):
        f0, f1, f2 = s
    else:
        arr = np.asarray(s, dtype=np.float64)
        if arr.shape[-1:] != (3,):
            raise InvalidInputError(f"stencil must have 3 entries, got shape {arr.shape}")
        f0, f1, f2 = arr[..., 0], arr[..., 1], arr[..., 2]
    return Stencil(np.asarray(f0, np.float64), np.asarray(f1, np.float64), np.asarray(f2, np.float64))


def check_finite(s: Stencil) -> Stencil:
    for v in s:
        if not np.all(np.isfinite(v)):
            raise InvalidInputError("stencil contains non-finite values")
    return s


def _unwrap(x):
    return x.item() if isinstance(x, np.ndarray) and x.ndim == 0 else x


def _pair(cls, a, b):
    return cls(_unwrap(a), _unwrap(b))


# Unchecked array kernels used in the solver hot path.

def _beta(f0, f1, f2):
    return (f0 - f1) ** 2, (f1 - f2) ** 2


def _js(f0, f1, f2, eps):
    b0, b1 = _beta(f0, f1, f2)
    a0 = D0 / (b0 + eps) ** 2
    a1 = D1 / (b1 + eps) ** 2
    s = a0 + a1
    return a0 / s, a1 / s


def _z(f0, f1, f2, eps):
    b0, b1 = _beta(f0, f1, f2)
    tau = np.abs(b0 - b1)
    a0 = D0 * (1.0 + tau / (b0 + eps))
    a1 = D1 * (1.0 + tau / (b1 + eps))
    s = a0 + a1
    return a0 / s, a1 / s


def smoothness_indicators(s) -> SmoothnessPair:
    """Squared undivided differences of the two substencils."""
    s = check_finite(as_stencil(s))
    return _pair(SmoothnessPair, *_beta(*s))


def js_weights(s, cfg: KernelConfig = DEFAULT_KERNEL) -> WeightPair:
    """Jiang-Shu weights ``alpha_k = d_k / (beta_k + eps)^2``, normalized."""
    s = check_finite(as_stencil(s))
    return _pair(WeightPair, *_js(*s, cfg.epsilon_js))


def z_weights(s, cfg: KernelConfig = DEFAULT_KERNEL) -> WeightPair:
    """Z-type weights built on ``tau3 = |beta0 - beta1|``."""
    s = check_finite(as_stencil(s))
    return _pair(WeightPair, *_z(*s, cfg.epsilon_z))


def candidate_fluxes(s):
    """The two second-order interface values of the left-biased substencils."""
    f0, f1, f2 = as_stencil(s)
    return _unwrap(-0.5 * f0 + 1.5 * f1), _unwrap(0.5 * f1 + 0.5 * f2)


def reconstruct(s, w) -> float | np.ndarray:
    """Convex combination ``w0 * fhat0 + w1 * fhat1``."""
    c0, c1 = candidate_fluxes(s)
    w0, w1 = w
    return _unwrap(np.asarray(w0 * c0 + w1 * c1))


# Weighting functions as used by the solvers: callables (f0, f1, f2) -> (w0, w1)
# on arrays, without validation.

class JSWeighting:
    name = "js"

    def __init__(self, eps: float = DEFAULT_KERNEL.epsilon_js):
        self.eps = eps

    def __call__(self, f0, f1, f2):
        return _js(f0, f1, f2, self.eps)


class ZWeighting:
    name = "z"

    def __init__(self, eps: float = DEFAULT_KERNEL.epsilon_z):
        self.eps = eps

    def __call__(self, f0, f1, f2):
        return _z(f0, f1, f2, self.eps)


class LinearWeighting:
    """Always returns the linear weights; gives the third-order upwind scheme."""

    name = "linear"

    def __call__(self, f0, f1, f2):
        shape = np.broadcast(f0, f1, f2).shape
        return np.full(shape, D0), np.full(shape, D1)


def reconstruct_left(fm1, f0, fp1, weighting):
    """Left-biased interface value from ``(f[i-1], f[i], f[i+1])``."""
    w0, w1 = weighting(fm1, f0, fp1)
    return w0 * (-0.5 * fm1 + 1.5 * f0) + w1 * (0.5 * f0 + 0.5 * fp1)
