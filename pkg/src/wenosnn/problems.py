"""Benchmark problems: initial data, fluxes, domains, final times, boundaries,
and exact or reference solutions."""

from __future__ import annotations

import hashlib
import io
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable

import numpy as np

from wenosnn.riemann import RiemannStates, exact_riemann_euler
from wenosnn.solver1d import (
    BUCKLEY_LEVERETT,
    BURGERS,
    GAMMA,
    LINEAR,
    NG,
    QUARTIC,
    Euler1D,
    Grid1D,
    Scalar1D,
    SolverConfig,
    euler_cons_to_prim,
    euler_prim_to_cons,
    fill_ghosts,
)
from wenosnn.solver2d import Euler2D, Grid2D, Scalar2D


class UnknownProblemError(KeyError):
    pass


class NoExactSolutionError(LookupError):
    pass


# --- training initial condition -------------------------------------------------

TRAIN_DELTA = 0.005
TRAIN_BETA = math.log(2) / (36 * TRAIN_DELTA**2)
TRAIN_Z = -0.7
TRAIN_ALPHA = 10.0
TRAIN_Y = 0.5


def _gauss(x, beta, z):
    return np.exp(-beta * (x - z) ** 2)


def _ellipse(x, alpha, y):
    return np.sqrt(np.maximum(1 - alpha**2 * (x - y) ** 2, 0))


def eval_train_ic(x):
    """Piecewise profile (Gaussians, plateau, triangle, ellipse) on [-1, 1]."""
    x = np.asarray(x, dtype=np.float64)
    d, b, z, a, y = TRAIN_DELTA, TRAIN_BETA, TRAIN_Z, TRAIN_ALPHA, TRAIN_Y
    out = np.zeros_like(x)
    m = (x >= -0.8) & (x <= -0.6)
    out[m] = (_gauss(x[m], b, z - d) + 4 * _gauss(x[m], b, z) + _gauss(x[m], b, z + d)) / 6
    m = (x >= -0.4) & (x <= -0.2)
    out[m] = 1.0
    m = (x >= 0) & (x <= 0.2)
    out[m] = 1 - np.abs(10 * (x[m] - 0.1))
    m = (x >= 0.4) & (x <= 0.6)
    out[m] = (_ellipse(x[m], a, y - d) + 4 * _ellipse(x[m], a, y) + _ellipse(x[m], a, y + d)) / 6
    return out if out.ndim else float(out)


def _periodic(x, a, b):
    return a + np.mod(x - a, b - a)


# --- problem definitions --------------------------------------------------------

@dataclass(frozen=True)
class ProblemSpec:
    """One benchmark.

    ``initial`` maps cell centers to the initial field: a scalar array, or
    primitive variables ``(rho, u, P)`` / ``(rho, u, v, P)`` for Euler.
    ``exact(x, t)`` (1D) or ``exact(X, Y, t)`` (2D) returns the same kind of
    data and is set only when ``solution`` is "exact" or "riemann-exact".
    """

    name: str
    kind: str  # scalar-1d | euler-1d | scalar-2d | euler-2d
    flux: str
    domain: tuple
    n: int | tuple
    t_final: float
    boundary: object
    initial: Callable
    solution: str = "none"  # exact | riemann-exact | fine-grid-reference | none
    exact: Callable | None = None
    cfl: float = 0.4
    dt_policy: str = "adaptive"
    gamma: float = GAMMA
    riemann: RiemannStates | None = None
    long_running: bool = False
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.t_final > 0:
            raise ValueError("final time must be positive")
        sizes = self.n if isinstance(self.n, tuple) else (self.n,)
        if min(sizes) < 5:
            raise ValueError("default grid needs at least 5 cells per axis")

    @property
    def is_2d(self) -> bool:
        return self.kind.endswith("2d")

    @property
    def is_euler(self) -> bool:
        return self.kind.startswith("euler")

    def grid(self, n=None):
        n = self.n if n is None else n
        if self.is_2d:
            nx, ny = (n, n) if isinstance(n, int) else n
            return Grid2D(*self.domain, nx, ny)
        return Grid1D(*self.domain, n)

    def initial_field(self, grid):
        """Initial data in the variables the solver evolves."""
        if self.is_2d:
            X, Y = grid.mesh()
            data = self.initial(X, Y)
        else:
            data = self.initial(grid.x)
        if self.is_euler:
            if self.is_2d:
                rho, u, v, p = data
                return euler_prim_to_cons(rho, u, p, self.gamma, v=v)
            rho, u, p = data
            return euler_prim_to_cons(rho, u, p, self.gamma)
        return np.asarray(data, dtype=np.float64)

    def solver(self, grid, cfg: SolverConfig):
        cfg = replace(cfg, dt_policy=self.dt_policy)
        if self.kind == "scalar-1d":
            return Scalar1D(grid, _FLUX[self.flux], cfg, self.boundary)
        if self.kind == "euler-1d":
            return Euler1D(grid, cfg, self.boundary, self.gamma)
        if self.kind == "scalar-2d":
            return Scalar2D(grid, _FLUX[self.flux], _FLUX[self.flux], cfg, self.boundary)
        boundary = self.boundary(grid) if self.params.get("boundary_factory") else self.boundary
        return Euler2D(grid, cfg, boundary, self.gamma)

    def exact_field(self, grid, t=None):
        t = self.t_final if t is None else t
        if self.exact is None:
            raise NoExactSolutionError(f"{self.name} has no exact solution ({self.solution})")
        if self.is_2d:
            X, Y = grid.mesh()
            return self.exact(X, Y, t)
        return self.exact(grid.x, t)


_FLUX = {
    "linear": LINEAR,
    "burgers": BURGERS,
    "buckley-leverett": BUCKLEY_LEVERETT,
    "quartic": QUARTIC,
}


def _riemann_ic(left, right, x0=0.0):
    def ic(x):
        mask = x <= x0
        return tuple(np.where(mask, lv, rv) * np.ones_like(x) for lv, rv in zip(left, right))

    return ic


def _riemann_exact(states, x0=0.0):
    def exact(x, t):
        return exact_riemann_euler(states, (np.asarray(x) - x0) / t)

    return exact


def _step_ic(ul, ur):
    return lambda x: np.where(x <= 0, ul, ur).astype(np.float64)


def _burgers2d_exact(X, Y, t):
    """Characteristic solution of the 2D Burgers problem (smooth for t < 2/pi).

    Along xi = x + y the data are u0(xi) = 1/4 + sin(pi xi / 2)/2 and
    characteristics move with speed 2u; solve xi0 + 2 t u0(xi0) = xi.
    """
    xi = X + Y

    def u0(s):
        return 0.25 + 0.5 * np.sin(0.5 * np.pi * s)

    # monotone in xi0 for t <= 2/pi, so bisection on a bracket of width 2*t
    lo = xi - 2 * t * 0.75 - 1e-12
    hi = xi + 2 * t * 0.25 + 1e-12
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        g = mid + 2 * t * u0(mid) - xi
        lo = np.where(g < 0, mid, lo)
        hi = np.where(g < 0, hi, mid)
    return u0(0.5 * (lo + hi))


def _square_ic(X, Y):
    r = 1 / math.sqrt(2)
    return ((np.abs(X + Y) < r) & (np.abs(X - Y) < r)).astype(np.float64)


def _dmr_factory(grid):
    """Woodward-Colella double Mach reflection boundaries.

    Bottom: post-shock for x < 1/6, reflecting wall beyond. Top: post-shock
    left of the moving shock x_s(t) = 1/6 + (1 + 20 t)/sqrt(3), pre-shock to
    the right. Left: post-shock inflow. Right: outflow.
    """
    post = euler_prim_to_cons(8.0, 8.25 * math.cos(math.pi / 6), 116.5, GAMMA, v=-8.25 * math.sin(math.pi / 6))
    pre = euler_prim_to_cons(1.4, 0.0, 1.0, GAMMA, v=0.0)
    xc = grid.x

    def ghosts(q, t):
        qx = fill_ghosts(q, (post, "outflow"), axis=1, odd=(1,))
        qy = fill_ghosts(q, ("reflective", "outflow"), axis=0, odd=(2,))
        inflow = xc < 1 / 6
        qy[:NG, inflow, :] = post
        shock = 1 / 6 + (1 + 20 * t) / math.sqrt(3)
        top = np.where((xc < shock)[:, None], post, pre)
        qy[-NG:, :, :] = top
        return qx, qy

    return ghosts


def _kh_ic(X, Y, L=0.00625):
    rho = np.where(np.abs(Y) < 0.25, 2.0, 1.0)
    u = np.select(
        [Y < -0.25, Y < 0, Y < 0.25],
        [
            -0.5 + 0.5 * np.exp((Y + 0.25) / L),
            0.5 - 0.5 * np.exp((-Y - 0.25) / L),
            0.5 - 0.5 * np.exp((Y - 0.25) / L),
        ],
        -0.5 + 0.5 * np.exp((-Y + 0.25) / L),
    )
    v = 0.01 * np.sin(4 * np.pi * X)
    return rho, u, v, np.full_like(X, 1.5)


def _riemann2d_ic(X, Y):
    ne = (X > 0.5) & (Y > 0.5)
    nw = (X <= 0.5) & (Y > 0.5)
    sw = (X <= 0.5) & (Y <= 0.5)
    rho = np.select([ne, nw, sw], [1.0, 2.0, 1.0], 3.0)
    u = np.select([ne, nw, sw], [0.75, 0.75, -0.75], -0.75)
    v = np.select([ne, nw, sw], [-0.5, 0.5, 0.5], -0.5)
    return rho, u, v, np.ones_like(X)


def _explosion_ic(X, Y):
    inside = X**2 + Y**2 < 0.16
    return (
        np.where(inside, 1.0, 0.125),
        np.zeros_like(X),
        np.zeros_like(X),
        np.where(inside, 1.0, 0.1),
    )


def _dmr_ic(X, Y):
    th = math.pi / 6
    post = X < 1 / 6 + Y / math.sqrt(3)
    return (
        np.where(post, 8.0, 1.4),
        np.where(post, 8.25 * math.cos(th), 0.0),
        np.where(post, -8.25 * math.sin(th), 0.0),
        np.where(post, 116.5, 1.0),
    )


def _shock_entropy(k):
    left = (3.857143, 2.629369, 10.333333)

    def ic(x):
        m = x < -4
        return (
            np.where(m, left[0], 1 + 0.2 * np.sin(k * x)),
            np.where(m, left[1], 0.0),
            np.where(m, left[2], 1.0),
        )

    return ic, euler_prim_to_cons(*left)


def _blast_ic(x):
    p = np.where(x < 0.1, 1000.0, np.where(x < 0.9, 0.01, 100.0))
    return np.ones_like(x), np.zeros_like(x), p


def _build_registry():
    reg = {}

    def add(spec):
        reg[spec.name] = spec

    add(ProblemSpec(
        "advection-sine", "scalar-1d", "linear", (-1.0, 1.0), 160, 2.0, "periodic",
        lambda x: np.sin(np.pi * x), "exact",
        lambda x, t: np.sin(np.pi * (x - t)), dt_policy="fixed",
        params={"grids": (10, 20, 40, 80, 160)},
    ))
    add(ProblemSpec(
        "advection-composite", "scalar-1d", "linear", (-1.0, 1.0), 200, 8.0, "periodic",
        eval_train_ic, "exact",
        lambda x, t: eval_train_ic(_periodic(x - t, -1.0, 1.0)), dt_policy="fixed",
    ))
    add(ProblemSpec(
        "burgers-riemann", "scalar-1d", "burgers", (-1.0, 1.0), 100, 1.0, "outflow",
        _step_ic(1.0, 0.0), "exact",
        lambda x, t: np.where(x - 0.5 * t <= 0, 1.0, 0.0),
    ))
    add(ProblemSpec(
        "buckley-leverett", "scalar-1d", "buckley-leverett", (-1.0, 1.0), 80, 0.5, "outflow",
        _step_ic(1.0, 0.0), "fine-grid-reference",
    ))
    add(ProblemSpec(
        "quartic-nonconvex-a", "scalar-1d", "quartic", (-1.0, 1.0), 40, 1.0, "outflow",
        _step_ic(2.0, -2.0), "fine-grid-reference", params={"u_l": 2.0, "u_r": -2.0},
    ))
    add(ProblemSpec(
        "quartic-nonconvex-b", "scalar-1d", "quartic", (-1.0, 1.0), 40, 0.05, "outflow",
        _step_ic(-3.0, 3.0), "fine-grid-reference", params={"u_l": -3.0, "u_r": 3.0},
    ))
    add(ProblemSpec(
        "euler-density-wave", "euler-1d", "euler", (-1.0, 1.0), 160, 2.0, "periodic",
        lambda x: (1 + 0.5 * np.sin(np.pi * x), np.ones_like(x), np.ones_like(x)), "exact",
        lambda x, t: (1 + 0.5 * np.sin(np.pi * (x - t)), np.ones_like(x), np.ones_like(x)),
        dt_policy="fixed", params={"grids": (10, 20, 40, 80, 160)},
    ))
    for name, left, right, dom, t in (
        ("sod", (1.0, 0.0, 1.0), (0.125, 0.0, 0.1), (-5.0, 5.0), 2.0),
        ("lax", (0.445, 0.698, 3.528), (0.5, 0.0, 0.571), (-5.0, 5.0), 1.3),
        ("one23", (1.0, -2.0, 0.4), (1.0, 2.0, 0.4), (-5.0, 5.0), 1.0),
        ("double-rarefaction", (7.0, -1.0, 0.2), (7.0, 1.0, 0.2), (-1.0, 1.0), 0.6),
    ):
        states = RiemannStates(*left, *right)
        add(ProblemSpec(
            name, "euler-1d", "euler", dom, 200, t, "outflow",
            _riemann_ic(left, right), "riemann-exact", _riemann_exact(states), riemann=states,
        ))
    for k, n in ((5, 200), (10, 400)):
        ic, post = _shock_entropy(k)
        add(ProblemSpec(
            f"shock-entropy-k{k}", "euler-1d", "euler", (-5.0, 5.0), n, 2.0, (post, "outflow"),
            ic, "fine-grid-reference", params={"k": k},
        ))
    add(ProblemSpec(
        "blastwaves", "euler-1d", "euler", (0.0, 1.0), 400, 0.038, "reflective",
        _blast_ic, "fine-grid-reference",
    ))
    add(ProblemSpec(
        "advection-2d-square", "scalar-2d", "linear", (-1.0, 1.0, -1.0, 1.0), 80, 4.0, "periodic",
        _square_ic, "exact",
        lambda X, Y, t: _square_ic(_periodic(X - t, -1.0, 1.0), _periodic(Y - t, -1.0, 1.0)),
    ))
    add(ProblemSpec(
        "burgers-2d", "scalar-2d", "burgers", (-2.0, 2.0, -2.0, 2.0), 80, 2 / math.pi, "periodic",
        lambda X, Y: 0.25 + 0.5 * np.sin(np.pi * (X + Y) / 2), "exact", _burgers2d_exact,
    ))
    add(ProblemSpec(
        "riemann-2d", "euler-2d", "euler", (0.0, 1.0, 0.0, 1.0), 400, 0.3, "outflow",
        _riemann2d_ic,
    ))
    add(ProblemSpec(
        "explosion", "euler-2d", "euler", (0.0, 1.5, 0.0, 1.5), 400, 3.2,
        {"x": ("reflective", "outflow"), "y": ("reflective", "outflow")},
        _explosion_ic,
    ))
    add(ProblemSpec(
        "double-mach", "euler-2d", "euler", (0.0, 4.0, 0.0, 1.0), (800, 200), 0.2, _dmr_factory,
        _dmr_ic, long_running=True, params={"boundary_factory": True},
    ))
    add(ProblemSpec(
        "kelvin-helmholtz", "euler-2d", "euler", (-0.5, 0.5, -0.5, 0.5), 200, 4.0, "periodic",
        _kh_ic, long_running=True, params={"L": 0.00625},
    ))
    return reg


REGISTRY = _build_registry()

# Not one of the numbered benchmarks: the step-advection setup used to judge
# trained weighting functions near a discontinuity.
AUXILIARY = {
    "advection-riemann": ProblemSpec(
        "advection-riemann", "scalar-1d", "linear", (-1.0, 1.0), 100, 0.5, "outflow",
        _step_ic(1.0, 0.0), "exact",
        lambda x, t: np.where(x - t <= 0, 1.0, 0.0), dt_policy="fixed",
    ),
}


def get_problem(name: str) -> ProblemSpec:
    try:
        return REGISTRY[name] if name in REGISTRY else AUXILIARY[name]
    except KeyError:
        raise UnknownProblemError(
            f"unknown problem {name!r}; available: {', '.join(sorted({**REGISTRY, **AUXILIARY}))}"
        ) from None


def exact_scalar_solution(problem, x, t):
    """Exact value of a scalar 1D problem at ``(x, t)``."""
    spec = get_problem(problem) if isinstance(problem, str) else problem
    if spec.kind != "scalar-1d" or spec.exact is None:
        raise NoExactSolutionError(f"{spec.name} has no exact scalar solution")
    return spec.exact(np.asarray(x, dtype=np.float64), t)
