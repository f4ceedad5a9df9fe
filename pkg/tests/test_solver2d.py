import numpy as np
import pytest

from wenosnn.problems import get_problem
from wenosnn.solver1d import (
    BURGERS,
    LINEAR,
    ConfigError,
    Grid1D,
    SolverConfig,
    euler_prim_to_cons,
    spatial_operator_scalar,
)
from wenosnn.solver2d import Euler2D, Grid2D, Scalar2D, dt_2d, spatial_operator_2d
from wenosnn.weno import JSWeighting, ZWeighting

JS = JSWeighting(1e-6)
PERIODIC = {"x": "periodic", "y": "periodic"}


def test_grid_invalid():
    with pytest.raises(ConfigError):
        Grid2D(0, 1, 0, 1, 4, 10)
    with pytest.raises(ConfigError):
        Grid2D(0, 0, 0, 1, 10, 10)


def test_mesh_layout():
    g = Grid2D(0, 2, 0, 1, 8, 5)
    X, Y = g.mesh()
    assert X.shape == (5, 8) and X[0, 1] > X[0, 0] and Y[1, 0] > Y[0, 0]


def test_constant_field():
    g = Grid2D(-1, 1, -1, 1, 12, 10)
    out = spatial_operator_2d(np.full((10, 12), 0.7), g, JS, BURGERS, BURGERS, PERIODIC)
    assert np.all(out == 0)


def test_rows_match_1d_operator():
    g = Grid2D(-1, 1, -1, 1, 40, 9)
    a = np.sin(np.pi * g.x) + (np.abs(g.x) < 0.3)
    u = np.tile(a, (9, 1))
    out = spatial_operator_2d(u, g, JS, LINEAR, LINEAR, PERIODIC)
    ref = spatial_operator_scalar(a, LINEAR, Grid1D(-1, 1, 40), JS, "periodic")
    for row in out:
        assert np.array_equal(row, ref)


def test_burgers_operator_conservative():
    p = get_problem("burgers-2d")
    g = p.grid()
    out = spatial_operator_2d(p.initial_field(g), g, JS, BURGERS, BURGERS, PERIODIC)
    assert np.all(np.isfinite(out))
    assert abs(out.sum() * g.dx * g.dy) < 1e-12


def test_dt_examples():
    h = 0.05
    g = Grid2D(0, 1, 0, 1, 20, 20)
    assert dt_2d(1.0, 1.0, g) == pytest.approx(0.2 * h, rel=1e-15)
    assert dt_2d(1.0, 0.0, g) == pytest.approx(0.4 * h, rel=1e-15)
    assert dt_2d(0.0, 0.0, g) == pytest.approx(0.4 * h, rel=1e-15)
    s = Scalar2D(g, BURGERS, BURGERS, SolverConfig())
    assert s.max_dt(np.zeros((20, 20))) == pytest.approx(0.4 * h)


def test_dt_halves_with_grid():
    a = dt_2d(1.3, 0.4, Grid2D(0, 1, 0, 2, 10, 10))
    b = dt_2d(1.3, 0.4, Grid2D(0, 1, 0, 2, 20, 20))
    assert b == pytest.approx(a / 2, rel=1e-14)


@pytest.mark.parametrize("weighting", [JS, ZWeighting(1e-40)])
def test_axis_symmetry(rng, weighting):
    g = Grid2D(-1, 1, -2, 2, 16, 12)
    gt = Grid2D(-2, 2, -1, 1, 12, 16)
    u = rng.normal(size=(12, 16))
    a = spatial_operator_2d(u, g, weighting, BURGERS, BURGERS, PERIODIC)
    b = spatial_operator_2d(u.T, gt, weighting, BURGERS, BURGERS, PERIODIC)
    assert np.allclose(a, b.T, rtol=0, atol=1e-13 * np.abs(a).max())


def test_euler_uniform_state():
    g = Grid2D(0, 1, 0, 1, 8, 8)
    q = euler_prim_to_cons(np.ones((8, 8)), np.full((8, 8), 0.3), np.ones((8, 8)), v=np.full((8, 8), -0.2))
    assert np.allclose(Euler2D(g, SolverConfig(), "periodic").operator(q), 0, atol=1e-13)


def test_euler_axis_symmetry(rng):
    g = Grid2D(0, 1, 0, 1, 10, 10)
    rho, p = rng.uniform(0.5, 2, (2, 10, 10))
    u, v = rng.uniform(-0.5, 0.5, (2, 10, 10))
    q = euler_prim_to_cons(rho, u, p, v=v)
    qt = euler_prim_to_cons(rho.T, v.T, p.T, v=u.T)
    s = Euler2D(g, SolverConfig(), "outflow")
    a = s.operator(q)
    b = s.operator(qt)
    swapped = np.swapaxes(b, 0, 1)[..., [0, 2, 1, 3]]
    assert np.allclose(a, swapped, rtol=0, atol=1e-12 * np.abs(a).max())


def test_euler_1d_reduction():
    # a field varying in x only evolves like the 1D system
    from wenosnn.solver1d import spatial_operator_euler

    g = Grid2D(-1, 1, 0, 1, 24, 6)
    x = g.x
    rho = 1 + 0.3 * np.sin(np.pi * x)
    q1 = euler_prim_to_cons(rho, np.full(24, 0.4), np.ones(24))
    q2 = euler_prim_to_cons(np.tile(rho, (6, 1)), np.full((6, 24), 0.4), np.ones((6, 24)), v=np.zeros((6, 24)))
    out2 = Euler2D(g, SolverConfig(), "periodic").operator(q2)
    out1 = spatial_operator_euler(q1, Grid1D(-1, 1, 24), JS, "periodic")
    assert np.allclose(out2[..., [0, 1, 3]], out1[None], rtol=0, atol=1e-13)
    assert np.allclose(out2[..., 2], 0, atol=1e-13)


@pytest.fixture(scope="module")
def square_run():
    p = get_problem("advection-2d-square")
    g = p.grid()
    s = p.solver(g, SolverConfig())
    u0 = p.initial_field(g)
    return g, u0, s.advance_to(s.initial_state(u0), p.t_final)


def test_square_conservation(square_run):
    g, u0, out = square_run
    m0 = u0.sum() * g.dx * g.dy
    assert abs(out.u.sum() * g.dx * g.dy - m0) <= 1e-12 * abs(m0)


def test_square_returns_to_start(square_run):
    g, u0, out = square_run
    X, Y = g.mesh()

    def centroid(u):
        w = np.clip(u, 0, None)
        return np.array([(w * X).sum(), (w * Y).sum()]) / w.sum()

    assert np.all(np.abs(centroid(out.u) - centroid(u0)) < g.dx)
