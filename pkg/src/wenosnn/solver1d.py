"""Method-of-lines WENO3 solver in one space dimension.

Scalar laws use global Lax-Friedrichs splitting; the Euler system is split
characteristic-wise with Roe-averaged eigenvectors at every interface. The
interface kernels work along the last (scalar) or second-to-last (system)
axis of arbitrarily batched arrays, which is what the 2D solver reuses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

import numpy as np

from wenosnn.weno import (
    DEFAULT_KERNEL,
    JSWeighting,
    KernelConfig,
    LinearWeighting,
    ZWeighting,
    reconstruct_left,
)

NG = 2  # ghost cells per side
GAMMA = 1.4


class SolverError(RuntimeError):
    """Non-finite intermediate values in the spatial operator."""

    def __init__(self, msg, index=None, t=None):
        super().__init__(msg)
        self.index = index
        self.t = t


class PositivityError(SolverError):
    """Nonpositive density or pressure."""


class ConfigError(ValueError):
    pass


# --- grids and configuration --------------------------------------------------

@dataclass(frozen=True)
class Grid1D:
    a: float
    b: float
    n: int

    def __post_init__(self):
        if self.n < 5:
            raise ConfigError("a grid needs at least 5 cells")
        if not self.b > self.a:
            raise ConfigError("empty domain")

    @property
    def dx(self) -> float:
        return (self.b - self.a) / self.n

    @property
    def x(self) -> np.ndarray:
        return self.a + self.dx / 2 + self.dx * np.arange(self.n)


@dataclass(frozen=True)
class SolverConfig:
    cfl: float = 0.4
    weighting: str = "js"
    model: object = None
    kernel: KernelConfig = DEFAULT_KERNEL
    # "fixed": dt = cfl*dx (linear advection); "adaptive": dt = cfl*dx/max speed
    dt_policy: str = "adaptive"

    def __post_init__(self):
        if not 0 < self.cfl <= 1:
            raise ConfigError("cfl must lie in (0, 1]")
        if self.dt_policy not in ("fixed", "adaptive"):
            raise ConfigError(f"unknown dt policy {self.dt_policy!r}")
        make_weighting(self.weighting, self.model, self.kernel)


def make_weighting(name, model=None, kernel: KernelConfig = DEFAULT_KERNEL):
    """Resolve a scheme name (or a ready callable) to a weighting function."""
    if callable(name):
        return name
    if name == "js":
        return JSWeighting(kernel.epsilon_js)
    if name == "z":
        return ZWeighting(kernel.epsilon_z)
    if name == "linear":
        return LinearWeighting()
    if name in ("snn", "snn1", "snn2"):
        if model is None:
            raise ConfigError(f"scheme {name!r} requires a trained model")
        return model
    raise ConfigError(f"unknown weighting {name!r}")


# --- scalar fluxes ------------------------------------------------------------

@dataclass(frozen=True)
class ScalarFlux:
    name: str
    f: Callable[[np.ndarray], np.ndarray]
    df: Callable[[np.ndarray], np.ndarray]
    convex: bool = True

    def max_speed(self, u: np.ndarray) -> float:
        """max |f'| over the range of ``u``.

        For nonconvex fluxes the extremum of f' can sit strictly inside
        [min u, max u], so that interval is sampled as well.
        """
        speed = float(np.max(np.abs(self.df(u)))) if u.size else 0.0
        if not self.convex and u.size:
            lo, hi = float(np.min(u)), float(np.max(u))
            if hi > lo:
                speed = max(speed, float(np.max(np.abs(self.df(np.linspace(lo, hi, 201))))))
        return speed


LINEAR = ScalarFlux("linear", lambda u: u, lambda u: np.ones_like(u))
BURGERS = ScalarFlux("burgers", lambda u: 0.5 * u * u, lambda u: u)


def _bl_f(u):
    return 4 * u * u / (4 * u * u + (1 - u) ** 2)


def _bl_df(u):
    den = 4 * u * u + (1 - u) ** 2
    return 8 * u * (1 - u) / den**2


BUCKLEY_LEVERETT = ScalarFlux("buckley-leverett", _bl_f, _bl_df, convex=False)
QUARTIC = ScalarFlux(
    "quartic",
    lambda u: 0.25 * (u * u - 1) * (u * u - 4),
    lambda u: u**3 - 2.5 * u,
    convex=False,
)

FLUXES = {f.name: f for f in (LINEAR, BURGERS, BUCKLEY_LEVERETT, QUARTIC)}


def lf_split(f_value, u_value, alpha):
    """Lax-Friedrichs splitting ``f± = (f ± alpha*u) / 2``."""
    return 0.5 * (f_value + alpha * u_value), 0.5 * (f_value - alpha * u_value)


# --- ghost cells --------------------------------------------------------------

def _side(kinds, i):
    if isinstance(kinds, str):
        return kinds
    return kinds[i]


def fill_ghosts(u: np.ndarray, kind="periodic", axis: int = 0, odd: Sequence[int] = (), ng: int = NG):
    """Return ``u`` extended by ``ng`` ghost cells on both ends of ``axis``.

    ``kind`` is one of "periodic", "outflow", "reflective", or a
    ``(left, right)`` pair whose entries are those strings or a fixed state
    (array broadcastable to one cell). ``odd`` lists the component indices
    (last axis) that change sign under reflection.
    """
    u = np.asarray(u)
    axis = axis % u.ndim
    n = u.shape[axis]
    if n < ng + 3:
        raise ConfigError("field too small for the ghost layer")

    def take(idx):
        return np.take(u, idx, axis=axis)

    parts = []
    for side in (0, 1):
        k = _side(kind, side)
        if isinstance(k, str):
            if k == "periodic":
                idx = np.arange(n - ng, n) if side == 0 else np.arange(ng)
                g = take(idx)
            elif k == "outflow":
                g = take(np.full(ng, 0 if side == 0 else n - 1))
            elif k == "reflective":
                idx = np.arange(ng - 1, -1, -1) if side == 0 else np.arange(n - 1, n - ng - 1, -1)
                g = take(idx).copy()
                if odd:
                    g[..., list(odd)] *= -1
            else:
                raise ConfigError(f"unknown boundary kind {k!r}")
        else:
            shape = list(u.shape)
            shape[axis] = ng
            # scalar, or a components-last state
            g = np.broadcast_to(np.asarray(k, dtype=u.dtype), shape).copy()
        parts.append(g)
    return np.concatenate([parts[0], u, parts[1]], axis=axis)


# --- scalar operator ----------------------------------------------------------

def interface_flux_scalar(ue, fe, alpha, weighting):
    """Numerical fluxes at the n+1 interfaces of a ghost-extended array.

    Works along the last axis; ``ue.shape[-1] == n + 2*NG``.
    """
    fp, fm = lf_split(fe, ue, alpha)
    m = ue.shape[-1]
    left = reconstruct_left(fp[..., 0 : m - 3], fp[..., 1 : m - 2], fp[..., 2 : m - 1], weighting)
    right = reconstruct_left(fm[..., 3:m], fm[..., 2 : m - 1], fm[..., 1 : m - 2], weighting)
    return left + right


def spatial_operator_scalar(u, flux: ScalarFlux, grid: Grid1D, weighting, boundary="periodic"):
    """du/dt = -(h[i+1/2] - h[i-1/2]) / dx for a scalar law."""
    ue = fill_ghosts(u, boundary)
    alpha = flux.max_speed(ue)
    h = interface_flux_scalar(ue, flux.f(ue), alpha, weighting)
    out = -(h[1:] - h[:-1]) / grid.dx
    _check_finite(out)
    return out


def _check_finite(out, t=None):
    bad = ~np.isfinite(out)
    if bad.any():
        idx = np.argwhere(bad)[0]
        raise SolverError(f"non-finite operator value at cell {tuple(idx)}", index=tuple(idx), t=t)


# --- Euler ------------------------------------------------------------------

def euler_prim_to_cons(rho, u, p, gamma=GAMMA, v=None):
    """(rho, u[, v], P) -> (rho, rho*u[, rho*v], E), stacked on the last axis."""
    rho = np.asarray(rho, dtype=np.float64)
    u = np.asarray(u, dtype=np.float64)
    p = np.asarray(p, dtype=np.float64)
    _check_positive(rho, p)
    if v is None:
        e = p / (gamma - 1) + 0.5 * rho * u * u
        return np.stack(np.broadcast_arrays(rho, rho * u, e), axis=-1)
    v = np.asarray(v, dtype=np.float64)
    e = p / (gamma - 1) + 0.5 * rho * (u * u + v * v)
    return np.stack(np.broadcast_arrays(rho, rho * u, rho * v, e), axis=-1)


def euler_cons_to_prim(q, gamma=GAMMA):
    """Inverse of `euler_prim_to_cons`: returns (rho, u, P) or (rho, u, v, P)."""
    q = np.asarray(q, dtype=np.float64)
    rho = q[..., 0]
    u = q[..., 1] / rho
    if q.shape[-1] == 3:
        p = (gamma - 1) * (q[..., 2] - 0.5 * rho * u * u)
        _check_positive(rho, p)
        return rho, u, p
    v = q[..., 2] / rho
    p = (gamma - 1) * (q[..., 3] - 0.5 * rho * (u * u + v * v))
    _check_positive(rho, p)
    return rho, u, v, p


def _check_positive(rho, p, t=None):
    bad = ~((rho > 0) & (p > 0))
    if np.any(bad):
        idx = tuple(int(i) for i in np.argwhere(np.atleast_1d(bad))[0])
        raise PositivityError(f"nonpositive density or pressure at cell {idx}", index=idx, t=t)


def euler_flux(q, gamma=GAMMA):
    """x-direction Euler flux for conserved states with 3 or 4 components."""
    rho = q[..., 0]
    u = q[..., 1] / rho
    if q.shape[-1] == 3:
        p = (gamma - 1) * (q[..., 2] - 0.5 * rho * u * u)
        return np.stack([q[..., 1], q[..., 1] * u + p, u * (q[..., 2] + p)], axis=-1)
    v = q[..., 2] / rho
    p = (gamma - 1) * (q[..., 3] - 0.5 * rho * (u * u + v * v))
    return np.stack([q[..., 1], q[..., 1] * u + p, q[..., 2] * u, u * (q[..., 3] + p)], axis=-1)


def euler_max_speed(q, gamma=GAMMA):
    """Per-family splitting speeds: (max(|u|+c), max|u|, [max|u|,] max(|u|+c))."""
    prim = euler_cons_to_prim(q, gamma)
    rho, u, p = prim[0], prim[1], prim[-1]
    c = np.sqrt(gamma * p / rho)
    # the two acoustic families share one speed so the splitting is mirror-symmetric
    a_ac = np.max(np.abs(u) + c)
    a_mid = np.max(np.abs(u))
    if q.shape[-1] == 3:
        return np.array([a_ac, a_mid, a_ac])
    return np.array([a_ac, a_mid, a_mid, a_ac])


class EulerEigenContext(NamedTuple):
    u: np.ndarray
    v: np.ndarray | None
    h: np.ndarray
    c: np.ndarray
    left: np.ndarray
    right: np.ndarray

    @property
    def eigenvalues(self):
        if self.v is None:
            return np.stack([self.u - self.c, self.u, self.u + self.c], axis=-1)
        return np.stack([self.u - self.c, self.u, self.u, self.u + self.c], axis=-1)


def euler_eigensystem(ql, qr, gamma=GAMMA) -> EulerEigenContext:
    """Roe-averaged x-direction eigenvectors between conserved states ``ql``, ``qr``."""
    ql = np.asarray(ql, dtype=np.float64)
    qr = np.asarray(qr, dtype=np.float64)
    nc = ql.shape[-1]
    pl = euler_cons_to_prim(ql, gamma)
    pr = euler_cons_to_prim(qr, gamma)
    sl = np.sqrt(pl[0])
    sr = np.sqrt(pr[0])
    hl = (ql[..., -1] + pl[-1]) / pl[0]
    hr = (qr[..., -1] + pr[-1]) / pr[0]
    w = sl + sr
    u = (sl * pl[1] + sr * pr[1]) / w
    h = (sl * hl + sr * hr) / w
    if nc == 3:
        v = None
        q2 = u * u
    else:
        v = (sl * pl[2] + sr * pr[2]) / w
        q2 = u * u + v * v
    c2 = (gamma - 1) * (h - 0.5 * q2)
    if np.any(c2 <= 0):
        raise PositivityError("nonpositive Roe-averaged sound speed")
    c = np.sqrt(c2)
    b1 = (gamma - 1) / c2
    b2 = 0.5 * b1 * q2
    one = np.ones_like(u)
    zero = np.zeros_like(u)
    if nc == 3:
        right = np.stack(
            [
                np.stack([one, one, one], -1),
                np.stack([u - c, u, u + c], -1),
                np.stack([h - u * c, 0.5 * q2, h + u * c], -1),
            ],
            -2,
        )
        left = np.stack(
            [
                np.stack([0.5 * (b2 + u / c), -0.5 * (b1 * u + 1 / c), 0.5 * b1], -1),
                np.stack([1 - b2, b1 * u, -b1], -1),
                np.stack([0.5 * (b2 - u / c), -0.5 * (b1 * u - 1 / c), 0.5 * b1], -1),
            ],
            -2,
        )
    else:
        right = np.stack(
            [
                np.stack([one, one, zero, one], -1),
                np.stack([u - c, u, zero, u + c], -1),
                np.stack([v, v, one, v], -1),
                np.stack([h - u * c, 0.5 * q2, v, h + u * c], -1),
            ],
            -2,
        )
        left = np.stack(
            [
                np.stack([0.5 * (b2 + u / c), -0.5 * (b1 * u + 1 / c), -0.5 * b1 * v, 0.5 * b1], -1),
                np.stack([1 - b2, b1 * u, b1 * v, -b1], -1),
                np.stack([-v, zero, one, zero], -1),
                np.stack([0.5 * (b2 - u / c), -0.5 * (b1 * u - 1 / c), -0.5 * b1 * v, 0.5 * b1], -1),
            ],
            -2,
        )
    return EulerEigenContext(u, v, h, c, left, right)


def _matvec(m, x):
    # explicit sums keep the reduction order fixed (and mirror-symmetric)
    nc = x.shape[-1]
    out = m[..., :, 0] * x[..., None, 0]
    for k in range(1, nc):
        out = out + m[..., :, k] * x[..., None, k]
    return out


def interface_flux_euler(qe, weighting, gamma=GAMMA, alpha=None):
    """Characteristic-wise split WENO fluxes along axis -2 of ``qe``.

    ``qe`` has shape (..., n + 2*NG, nc); returns (..., n + 1, nc).
    """
    m = qe.shape[-2]
    fe = euler_flux(qe, gamma)
    if alpha is None:
        alpha = euler_max_speed(qe, gamma)
    ctx = euler_eigensystem(qe[..., 1 : m - 2, :], qe[..., 2 : m - 1, :], gamma)
    lmat = ctx.left
    cells = [slice(k, m - 3 + k) for k in range(4)]  # i-1, i, i+1, i+2
    v = [_matvec(lmat, qe[..., s, :]) for s in cells]
    g = [_matvec(lmat, fe[..., s, :]) for s in cells]
    gp = [0.5 * (gk + alpha * vk) for gk, vk in zip(g, v)]
    gm = [0.5 * (gk - alpha * vk) for gk, vk in zip(g, v)]
    hat = reconstruct_left(gp[0], gp[1], gp[2], weighting) + reconstruct_left(gm[3], gm[2], gm[1], weighting)
    return _matvec(ctx.right, hat)


def spatial_operator_euler(q, grid: Grid1D, weighting, boundary="outflow", gamma=GAMMA, t=None):
    """d(rho, rho u, E)/dt for the 1D Euler equations."""
    q = np.asarray(q)
    euler_cons_to_prim(q, gamma)
    qe = fill_ghosts(q, boundary, axis=0, odd=(1,))
    h = interface_flux_euler(qe, weighting, gamma)
    out = -(h[1:] - h[:-1]) / grid.dx
    _check_finite(out, t)
    return out


# --- time stepping ----------------------------------------------------------

def rk3_step(u, dt, operator, t=0.0):
    """One step of the three-stage TVD Runge-Kutta method.

    ``operator(u, t)`` returns du/dt.
    """
    u1 = u + dt * operator(u, t)
    u2 = 0.75 * u + 0.25 * u1 + 0.25 * dt * operator(u1, t + dt)
    return u / 3 + 2.0 / 3.0 * u2 + 2.0 / 3.0 * dt * operator(u2, t + 0.5 * dt)


@dataclass
class SolverState:
    u: np.ndarray
    t: float = 0.0
    steps: list = field(default_factory=list)


class MethodOfLines:
    """Shared stepping loop; subclasses provide `operator` and `max_dt`."""

    cfg: SolverConfig

    def operator(self, u, t):
        raise NotImplementedError

    def max_dt(self, u) -> float:
        raise NotImplementedError

    def initial_state(self, u0) -> SolverState:
        return SolverState(np.array(u0, dtype=np.float64), 0.0)

    def step(self, state: SolverState, dt: float) -> SolverState:
        try:
            u = rk3_step(state.u, dt, self.operator, state.t)
        except SolverError as err:
            err.t = state.t
            raise
        return SolverState(u, state.t + dt, state.steps + [dt])

    def advance_to(self, state: SolverState, t_final: float, callback=None) -> SolverState:
        """Step until ``t_final``; the last step is clamped to land on it exactly."""
        if t_final < state.t:
            raise ConfigError("cannot integrate backwards in time")
        u, t = state.u, state.t
        steps = list(state.steps)
        while t < t_final:
            try:
                dt = self.max_dt(u)
            except SolverError as err:
                err.t = t
                raise
            if not (dt > 0 and math.isfinite(dt)):
                raise SolverError(f"invalid time step {dt} at t={t}", t=t)
            remaining = t_final - t
            last = dt >= remaining * (1 - 1e-12)
            if last:
                dt = remaining
            try:
                u = rk3_step(u, dt, self.operator, t)
            except SolverError as err:
                err.t = t
                raise
            t = t_final if last else t + dt
            steps.append(dt)
            if callback is not None:
                callback(t, u)
        return SolverState(u, t, steps)


class Scalar1D(MethodOfLines):
    def __init__(self, grid: Grid1D, flux: ScalarFlux, cfg: SolverConfig = SolverConfig(), boundary="periodic"):
        self.grid = grid
        self.flux = flux
        self.cfg = cfg
        self.boundary = boundary
        self.weighting = make_weighting(cfg.weighting, cfg.model, cfg.kernel)

    def operator(self, u, t=0.0):
        try:
            return spatial_operator_scalar(u, self.flux, self.grid, self.weighting, self.boundary)
        except SolverError as err:
            err.t = t
            raise

    def max_dt(self, u):
        if self.cfg.dt_policy == "fixed":
            return self.cfg.cfl * self.grid.dx
        a = self.flux.max_speed(np.asarray(u))
        return self.cfg.cfl * self.grid.dx / a if a > 0 else self.cfg.cfl * self.grid.dx


class Euler1D(MethodOfLines):
    def __init__(self, grid: Grid1D, cfg: SolverConfig = SolverConfig(), boundary="outflow", gamma=GAMMA):
        self.grid = grid
        self.cfg = cfg
        self.boundary = boundary
        self.gamma = gamma
        self.weighting = make_weighting(cfg.weighting, cfg.model, cfg.kernel)

    def operator(self, q, t=0.0):
        return spatial_operator_euler(q, self.grid, self.weighting, self.boundary, self.gamma, t)

    def max_dt(self, q):
        if self.cfg.dt_policy == "fixed":
            return self.cfg.cfl * self.grid.dx
        return self.cfg.cfl * self.grid.dx / float(np.max(euler_max_speed(q, self.gamma)))
