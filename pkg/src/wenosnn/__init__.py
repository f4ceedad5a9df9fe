"""Third-order finite-difference WENO schemes with classical and
shallow-neural-network weighting functions."""

from wenosnn.weno import (
    D0,
    D1,
    InvalidInputError,
    KernelConfig,
    SmoothnessPair,
    Stencil,
    WeightPair,
    candidate_fluxes,
    js_weights,
    reconstruct,
    smoothness_indicators,
    z_weights,
)

__version__ = "0.1.0"

__all__ = [
    "D0",
    "D1",
    "InvalidInputError",
    "KernelConfig",
    "SmoothnessPair",
    "Stencil",
    "WeightPair",
    "candidate_fluxes",
    "js_weights",
    "reconstruct",
    "smoothness_indicators",
    "z_weights",
]
