"""Dimension-by-dimension extension of the 1D operators to 2D.

Fields are stored as ``(ny, nx)`` (scalar) or ``(ny, nx, 4)`` (Euler) so that
row ``j`` is the grid line at ``y[j]``. The y-sweep of the Euler system runs
the x-direction kernel on the transposed field with the two momentum
components swapped.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from wenosnn.solver1d import (
    GAMMA,
    ConfigError,
    MethodOfLines,
    ScalarFlux,
    SolverConfig,
    _check_finite,
    euler_cons_to_prim,
    euler_max_speed,
    fill_ghosts,
    interface_flux_euler,
    interface_flux_scalar,
    make_weighting,
)


@dataclass(frozen=True)
class Grid2D:
    ax: float
    bx: float
    ay: float
    by: float
    nx: int
    ny: int

    def __post_init__(self):
        if self.nx < 5 or self.ny < 5:
            raise ConfigError("a grid needs at least 5 cells per axis")
        if not (self.bx > self.ax and self.by > self.ay):
            raise ConfigError("empty domain")

    @property
    def dx(self) -> float:
        return (self.bx - self.ax) / self.nx

    @property
    def dy(self) -> float:
        return (self.by - self.ay) / self.ny

    @property
    def x(self) -> np.ndarray:
        return self.ax + self.dx / 2 + self.dx * np.arange(self.nx)

    @property
    def y(self) -> np.ndarray:
        return self.ay + self.dy / 2 + self.dy * np.arange(self.ny)

    def mesh(self):
        """Cell-center coordinates ``(X, Y)``, each of shape (ny, nx)."""
        return np.meshgrid(self.x, self.y)


def dt_2d(alpha_x: float, alpha_y: float, grid: Grid2D, cfl: float = 0.4) -> float:
    """``cfl / (alpha_x/dx + alpha_y/dy)``, or ``cfl*min(dx, dy)`` when both speeds vanish."""
    rate = alpha_x / grid.dx + alpha_y / grid.dy
    if rate <= 0:
        return cfl * min(grid.dx, grid.dy)
    return cfl / rate


def _swap_momenta(q):
    return q[..., [0, 2, 1, 3]]


class Scalar2D(MethodOfLines):
    """u_t + f(u)_x + g(u)_y = 0 with boundary kinds per axis.

    ``boundary`` is a string or a dict ``{"x": kind, "y": kind}`` where each
    kind follows `fill_ghosts`.
    """

    def __init__(self, grid: Grid2D, flux_x: ScalarFlux, flux_y: ScalarFlux,
                 cfg: SolverConfig = SolverConfig(), boundary="periodic"):
        self.grid = grid
        self.flux_x = flux_x
        self.flux_y = flux_y
        self.cfg = cfg
        self.boundary = boundary if isinstance(boundary, dict) else {"x": boundary, "y": boundary}
        self.weighting = make_weighting(cfg.weighting, cfg.model, cfg.kernel)

    def operator(self, u, t=0.0):
        return spatial_operator_2d(u, self.grid, self.weighting, self.flux_x, self.flux_y, self.boundary)

    def speeds(self, u):
        return self.flux_x.max_speed(u), self.flux_y.max_speed(u)

    def max_dt(self, u):
        return dt_2d(*self.speeds(u), self.grid, self.cfg.cfl)


def spatial_operator_2d(u, grid: Grid2D, weighting, flux_x: ScalarFlux, flux_y: ScalarFlux, boundary):
    """-(df/dx + dg/dy), each term from the 1D operator applied along grid lines."""
    ux = fill_ghosts(u, boundary["x"], axis=1)
    hx = interface_flux_scalar(ux, flux_x.f(ux), flux_x.max_speed(ux), weighting)
    uy = fill_ghosts(u, boundary["y"], axis=0).T
    hy = interface_flux_scalar(uy, flux_y.f(uy), flux_y.max_speed(uy), weighting).T
    out = -(hx[:, 1:] - hx[:, :-1]) / grid.dx - (hy[1:, :] - hy[:-1, :]) / grid.dy
    _check_finite(out)
    return out


class Euler2D(MethodOfLines):
    """2D Euler equations in conserved variables (rho, rho u, rho v, E).

    ``boundary`` is a string, a dict ``{"x": kind, "y": kind}``, or a callable
    ``ghosts(q, t) -> (qx, qy)`` returning the field extended along x (axis 1)
    and along y (axis 0); the callable form carries time-dependent boundaries.
    """

    def __init__(self, grid: Grid2D, cfg: SolverConfig = SolverConfig(), boundary="outflow", gamma=GAMMA):
        self.grid = grid
        self.cfg = cfg
        self.gamma = gamma
        self.weighting = make_weighting(cfg.weighting, cfg.model, cfg.kernel)
        if callable(boundary):
            self.ghosts = boundary
        else:
            kinds = boundary if isinstance(boundary, dict) else {"x": boundary, "y": boundary}

            def ghosts(q, t):
                return (
                    fill_ghosts(q, kinds["x"], axis=1, odd=(1,)),
                    fill_ghosts(q, kinds["y"], axis=0, odd=(2,)),
                )

            self.ghosts = ghosts

    def operator(self, q, t=0.0):
        euler_cons_to_prim(q, self.gamma)
        qx, qy = self.ghosts(q, t)
        hx = interface_flux_euler(qx, self.weighting, self.gamma)
        qy_t = _swap_momenta(np.swapaxes(qy, 0, 1))
        hy = np.swapaxes(_swap_momenta(interface_flux_euler(qy_t, self.weighting, self.gamma)), 0, 1)
        out = -(hx[:, 1:] - hx[:, :-1]) / self.grid.dx - (hy[1:] - hy[:-1]) / self.grid.dy
        _check_finite(out, t)
        return out

    def speeds(self, q):
        ax = float(np.max(euler_max_speed(q, self.gamma)))
        ay = float(np.max(euler_max_speed(_swap_momenta(q), self.gamma)))
        return ax, ay

    def max_dt(self, q):
        return dt_2d(*self.speeds(q), self.grid, self.cfg.cfl)
