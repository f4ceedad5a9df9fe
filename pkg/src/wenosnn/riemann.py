"""Exact solution of the Riemann problem for the 1D Euler equations.

Newton iteration on the pressure function, started from the
two-rarefaction estimate and safeguarded by bisection so that near-vacuum
data (star pressure close to zero) still converge.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class VacuumError(ValueError):
    """The data generate a vacuum between the two rarefactions."""


@dataclass(frozen=True)
class RiemannStates:
    rho_l: float
    u_l: float
    p_l: float
    rho_r: float
    u_r: float
    p_r: float
    gamma: float = 1.4

    def __post_init__(self):
        if min(self.rho_l, self.p_l, self.rho_r, self.p_r) <= 0:
            raise ValueError("Riemann states need positive density and pressure")

    @property
    def c_l(self):
        return math.sqrt(self.gamma * self.p_l / self.rho_l)

    @property
    def c_r(self):
        return math.sqrt(self.gamma * self.p_r / self.rho_r)

    @property
    def left(self):
        return (self.rho_l, self.u_l, self.p_l)

    @property
    def right(self):
        return (self.rho_r, self.u_r, self.p_r)


def _f_side(p, rho, pk, ck, g):
    """Pressure function of one side and its derivative."""
    if p > pk:
        a = 2.0 / ((g + 1) * rho)
        b = (g - 1) / (g + 1) * pk
        root = math.sqrt(a / (p + b))
        return (p - pk) * root, root * (1 - 0.5 * (p - pk) / (b + p))
    z = (g - 1) / (2 * g)
    ratio = p / pk
    f = 2 * ck / (g - 1) * (ratio**z - 1)
    df = math.inf if p == 0 else ratio ** (-(g + 1) / (2 * g)) / (rho * ck)
    return f, df


def pressure_function(p: float, s: RiemannStates) -> float:
    g = s.gamma
    fl, _ = _f_side(p, s.rho_l, s.p_l, s.c_l, g)
    fr, _ = _f_side(p, s.rho_r, s.p_r, s.c_r, g)
    return fl + fr + (s.u_r - s.u_l)


def star_state(s: RiemannStates, tol: float = 1e-12, max_iter: int = 200):
    """Return ``(p_star, u_star)``."""
    g = s.gamma
    cl, cr = s.c_l, s.c_r
    du = s.u_r - s.u_l
    critical = 2 * (cl + cr) / (g - 1)
    if du > critical * (1 + 1e-12):
        raise VacuumError(f"velocity jump {du} exceeds the vacuum limit {critical}")

    def fun(p):
        fl, dl = _f_side(p, s.rho_l, s.p_l, cl, g)
        fr, dr = _f_side(p, s.rho_r, s.p_r, cr, g)
        return fl + fr + du, dl + dr

    if fun(0.0)[0] >= 0:
        # velocity jump sits at the vacuum limit
        p = 0.0
    else:
        z = (g - 1) / (2 * g)
        guess = ((cl + cr - 0.5 * (g - 1) * du) / (cl / s.p_l**z + cr / s.p_r**z)) ** (1 / z)
        lo, hi = 0.0, max(s.p_l, s.p_r)
        while fun(hi)[0] < 0:
            lo, hi = hi, 2 * hi
        p = min(max(guess, lo), hi)
        for _ in range(max_iter):
            f, df = fun(p)
            if f < 0:
                lo = max(lo, p)
            else:
                hi = min(hi, p)
            step = f / df if math.isfinite(df) and df > 0 else math.nan
            p_new = p - step
            if not (lo < p_new < hi) or not math.isfinite(p_new):
                p_new = 0.5 * (lo + hi)
            if abs(p_new - p) <= tol * max(p_new, 1e-300) or hi - lo <= tol * max(p_new, 1e-300):
                p = p_new
                break
            p = p_new
        else:  # pragma: no cover
            raise RuntimeError("star-pressure iteration did not converge")
    fl, _ = _f_side(p, s.rho_l, s.p_l, cl, g)
    fr, _ = _f_side(p, s.rho_r, s.p_r, cr, g)
    u = 0.5 * (s.u_l + s.u_r) + 0.5 * (fr - fl)
    return p, u


def exact_riemann_euler(s: RiemannStates, xi):
    """Self-similar solution ``(rho, u, P)`` sampled at ``xi = x / t``."""
    xi_arr = np.atleast_1d(np.asarray(xi, dtype=np.float64))
    p_star, u_star = star_state(s)
    g = s.gamma
    out = np.empty((xi_arr.size, 3))
    for k, x in enumerate(xi_arr.ravel()):
        out[k] = _sample(s, p_star, u_star, x, g)
    rho, u, p = out[:, 0], out[:, 1], out[:, 2]
    if np.ndim(xi) == 0:
        return float(rho[0]), float(u[0]), float(p[0])
    shape = np.shape(xi)
    return rho.reshape(shape), u.reshape(shape), p.reshape(shape)


def _sample(s, p_star, u_star, x, g):
    gm = (g - 1) / (g + 1)
    if x <= u_star:
        rho, u, p, c, sign = s.rho_l, s.u_l, s.p_l, s.c_l, 1.0
    else:
        rho, u, p, c, sign = s.rho_r, s.u_r, s.p_r, s.c_r, -1.0
    # mirror the right side so one set of formulas serves both
    xs, us, uss = sign * x, sign * u, sign * u_star
    if p_star > p:
        shock = us - c * math.sqrt((g + 1) / (2 * g) * p_star / p + (g - 1) / (2 * g))
        if xs <= shock:
            return rho, u, p
        rho_star = rho * (p_star / p + gm) / (gm * p_star / p + 1)
        return rho_star, u_star, p_star
    head = us - c
    if xs <= head:
        return rho, u, p
    c_star = c * (p_star / p) ** ((g - 1) / (2 * g))
    tail = uss - c_star
    if xs > tail:
        rho_star = rho * (p_star / p) ** (1 / g)
        return rho_star, u_star, p_star
    # inside the fan
    cf = 2 / (g + 1) * (c + 0.5 * (g - 1) * (us - xs))
    uf = 2 / (g + 1) * (c + 0.5 * (g - 1) * us + xs)
    rhof = rho * (cf / c) ** (2 / (g - 1))
    pf = p * (cf / c) ** (2 * g / (g - 1))
    return rhof, sign * uf, pf
