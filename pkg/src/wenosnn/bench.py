"""Error norms, convergence tables, single runs with CSV artifacts and
run manifests, and a cached fine-grid reference for problems without an
exact solution."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import os
import time
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

import numpy as np
from filelock import FileLock

import wenosnn
from wenosnn.problems import NoExactSolutionError, ProblemSpec, get_problem
from wenosnn.snn import SnnModel, load_model
from wenosnn.solver1d import ConfigError, SolverConfig, euler_cons_to_prim
from wenosnn.weno import DEFAULT_KERNEL, KernelConfig

SCHEMES = ("js", "z", "linear", "snn1", "snn2")
NORMS = ("mean", "dx-weighted", "sqrt-l1")


# --- norms ------------------------------------------------------------------

def error_norms(numeric, exact, norm: str = "mean", cell: float | None = None):
    """``(l1, l2, linf)`` of ``numeric - exact`` over all cells.

    ``mean``: cell averages, ``l2`` is the RMS. ``dx-weighted``: sums times
    the cell size ``cell`` (length in 1D, area in 2D). ``sqrt-l1``: as
    ``mean`` but with ``l2 = sqrt(l1)``, the convention under which the
    reference two-dimensional error tables are stated.
    """
    a = np.asarray(numeric, dtype=np.float64)
    b = np.asarray(exact, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    if a.size == 0:
        raise ValueError("empty field")
    e = np.abs(a - b).ravel()
    linf = float(e.max())
    # squares of tiny errors underflow, so scale by the max first
    scale = linf if linf > 0 else 1.0
    if norm == "mean":
        return float(e.mean()), float(scale * math.sqrt(np.mean((e / scale) ** 2))), linf
    if norm == "sqrt-l1":
        l1 = float(e.mean())
        return l1, math.sqrt(l1), linf
    if norm == "dx-weighted":
        if cell is None:
            raise ValueError("dx-weighted norm needs the cell size")
        return float(e.sum() * cell), float(scale * math.sqrt(np.sum((e / scale) ** 2) * cell)), linf
    raise ValueError(f"unknown norm {norm!r}; choose from {NORMS}")


def orders(errors):
    """``log2(e_N / e_2N)`` for consecutive entries; NaN where undefined."""
    e = np.asarray(errors, dtype=np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.log2(e[:-1] / e[1:])


def total_variation(u) -> float:
    return float(np.sum(np.abs(np.diff(np.asarray(u, dtype=np.float64)))))


@dataclass(frozen=True)
class ErrorReport:
    l1: float
    l2: float
    linf: float
    n: int | tuple
    scheme: str
    problem: str
    wall_time: float = 0.0

    def __post_init__(self):
        if min(self.l1, self.l2, self.linf) < 0:
            raise ValueError("norms are nonnegative")


# --- running problems ---------------------------------------------------------

def observable(problem: ProblemSpec, u):
    """The field errors are measured on: the solution itself, or density for Euler."""
    u = np.asarray(u)
    return u[..., 0] if problem.is_euler else u


def exact_observable(problem: ProblemSpec, grid, t=None):
    ex = problem.exact_field(grid, t)
    return np.asarray(ex[0] if problem.is_euler else ex)


def solver_config(scheme: str, model=None, cfl: float = 0.4, kernel: KernelConfig = DEFAULT_KERNEL):
    if scheme not in SCHEMES and not callable(scheme):
        raise ConfigError(f"unknown scheme {scheme!r}; choose from {SCHEMES}")
    return SolverConfig(cfl=cfl, weighting=scheme, model=model, kernel=kernel)


def simulate(problem, scheme="js", n=None, t_final=None, cfl=None, model=None,
             kernel: KernelConfig = DEFAULT_KERNEL):
    """Run ``problem`` to its final time; returns ``(grid, state, wall_seconds)``."""
    spec = get_problem(problem) if isinstance(problem, str) else problem
    grid = spec.grid(n)
    cfg = solver_config(scheme, model, spec.cfl if cfl is None else cfl, kernel)
    solver = spec.solver(grid, cfg)
    t0 = time.perf_counter()
    state = solver.advance_to(solver.initial_state(spec.initial_field(grid)),
                              spec.t_final if t_final is None else t_final)
    return grid, state, time.perf_counter() - t0


def reference_observable(problem: ProblemSpec, grid, t, scheme="z", refinement=10, cache_dir=None):
    if problem.exact is not None:
        return exact_observable(problem, grid, t)
    if problem.is_2d:
        raise NoExactSolutionError(f"{problem.name} has no exact or reference solution")
    xf, rf = fine_grid_reference(problem, grid.n, t, scheme, refinement, cache_dir)
    return np.interp(grid.x, xf, rf)


def measure(problem, scheme="js", n=None, t_final=None, cfl=None, model=None,
            kernel: KernelConfig = DEFAULT_KERNEL, norm="mean", reference_dir=None):
    """Run and compare against the exact (or fine-grid) solution."""
    spec = get_problem(problem) if isinstance(problem, str) else problem
    grid, state, wall = simulate(spec, scheme, n, t_final, cfl, model, kernel)
    ref = reference_observable(spec, grid, state.t, cache_dir=reference_dir)
    cell = grid.dx * grid.dy if spec.is_2d else grid.dx
    l1, l2, linf = error_norms(observable(spec, state.u), ref, norm, cell)
    size = (grid.nx, grid.ny) if spec.is_2d else grid.n
    return ErrorReport(l1, l2, linf, size, _scheme_name(scheme, model), spec.name, wall), state


def _scheme_name(scheme, model):
    if callable(scheme):
        return getattr(scheme, "name", type(scheme).__name__)
    return scheme


@dataclass(frozen=True)
class ConvergenceTable:
    problem: str
    scheme: str
    reports: tuple

    def column(self, key):
        return np.array([getattr(r, key) for r in self.reports])

    def order(self, key):
        return orders(self.column(key))

    def rows(self):
        """``(n, l1, order, l2, order, linf, order)``; the first row has no orders."""
        cols = {k: (self.column(k), self.order(k)) for k in ("l1", "l2", "linf")}
        out = []
        for i, r in enumerate(self.reports):
            row = [r.n]
            for k in ("l1", "l2", "linf"):
                row += [cols[k][0][i], cols[k][1][i - 1] if i else float("nan")]
            out.append(tuple(row))
        return out


def convergence_study(problem, scheme="js", grids=None, model=None, kernel=DEFAULT_KERNEL, norm="mean"):
    spec = get_problem(problem) if isinstance(problem, str) else problem
    grids = tuple(grids or spec.params.get("grids", (10, 20, 40, 80, 160)))
    if any(b != 2 * a for a, b in zip(grids, grids[1:])):
        raise ConfigError(f"grids must double: {grids}")
    reports = tuple(measure(spec, scheme, n, model=model, kernel=kernel, norm=norm)[0] for n in grids)
    return ConvergenceTable(spec.name, _scheme_name(scheme, model), reports)


# --- fine-grid reference ------------------------------------------------------

def default_cache_dir() -> Path:
    return Path(os.environ.get("WENOSNN_CACHE", Path.home() / ".cache" / "wenosnn"))


def fine_grid_reference(problem, n, t=None, scheme="z", refinement=10, cache_dir=None):
    """Observable on a ``refinement`` times finer grid, as ``(x, values)``.

    Results are cached as CSV keyed by problem, grid, time and scheme; a file
    lock keeps concurrent builders from clobbering each other.
    """
    spec = get_problem(problem) if isinstance(problem, str) else problem
    t = spec.t_final if t is None else t
    nf = n * refinement
    cache = Path(cache_dir) if cache_dir is not None else default_cache_dir()
    cache.mkdir(parents=True, exist_ok=True)
    key = f"{spec.name}-{nf}-{scheme}-{float(t)!r}"
    path = cache / f"ref-{hashlib.sha256(key.encode()).hexdigest()[:16]}.csv"
    with FileLock(str(path) + ".lock"):
        if path.exists():
            data = np.loadtxt(path, delimiter=",", comments="#", skiprows=2, ndmin=2)
            return data[:, 0], data[:, 1]
        grid, state, _ = simulate(spec, scheme, nf, t)
        x, r = grid.x, observable(spec, state.u)
        body = "".join(f"{float(xi)!r},{float(ri)!r}\n" for xi, ri in zip(x, r))
        digest = hashlib.sha256(body.encode()).hexdigest()
        header = f"# problem={spec.name} scheme={scheme} grid={nf} t={float(t)!r} sha256={digest}\n"
        tmp = path.with_suffix(".tmp")
        tmp.write_text(header + "x,value\n" + body)
        tmp.replace(path)
    return x, r


# --- run artifacts ------------------------------------------------------------

@dataclass(frozen=True)
class RunConfig:
    problem: str
    scheme: str = "js"
    model: str | None = None
    n: int | None = None
    nx: int | None = None
    ny: int | None = None
    t_final: float | None = None
    cfl: float | None = None
    seed: int = 0
    out: str = "out"
    norm: str = "mean"
    epsilon_js: float | None = None

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ConfigError(f"unknown scheme {self.scheme!r}; choose from {SCHEMES}")
        if self.scheme.startswith("snn") and not self.model:
            raise ConfigError(f"scheme {self.scheme!r} requires --model")
        if self.norm not in NORMS:
            raise ConfigError(f"unknown norm {self.norm!r}")

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown run config keys: {sorted(unknown)}")
        return cls(**d)

    def grid_size(self, spec: ProblemSpec):
        if spec.is_2d:
            if self.nx or self.ny:
                dn = spec.n if isinstance(spec.n, tuple) else (spec.n, spec.n)
                return (self.nx or self.n or dn[0], self.ny or self.n or dn[1])
        return self.n

    def kernel(self) -> KernelConfig:
        if self.epsilon_js is None:
            return DEFAULT_KERNEL
        return replace(DEFAULT_KERNEL, epsilon_js=self.epsilon_js)


def sha256_file(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _canonical(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def _snapshot_rows(spec: ProblemSpec, grid, u):
    if spec.is_2d:
        X, Y = grid.mesh()
        cols = {"x": X.ravel(), "y": Y.ravel()}
        if spec.is_euler:
            rho, vx, vy, p = euler_cons_to_prim(u, spec.gamma)
            cols.update(rho=rho.ravel(), u=vx.ravel(), v=vy.ravel(), P=p.ravel())
        else:
            cols["u"] = np.asarray(u).ravel()
    else:
        cols = {"x": grid.x}
        if spec.is_euler:
            rho, vx, p = euler_cons_to_prim(u, spec.gamma)
            cols.update(rho=rho, u=vx, P=p)
        else:
            cols["u"] = np.asarray(u)
    return cols


def write_csv(path, columns: dict, manifest_hash: str):
    """Header row, ``repr`` floats, trailing manifest-hash comment."""
    names = list(columns)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(names)
    for row in zip(*(columns[k] for k in names)):
        w.writerow([repr(float(v)) if not isinstance(v, str) else v for v in row])
    buf.write(f"# manifest-sha256: {manifest_hash}\n")
    Path(path).write_text(buf.getvalue())


@dataclass
class RunResult:
    config: RunConfig
    snapshot: Path
    manifest: Path
    report: ErrorReport | None
    report_path: Path | None
    t: float
    steps: int


def run(cfg: RunConfig) -> RunResult:
    """Solve one problem and write ``<out>/<problem>-<scheme>.csv`` plus manifest and report."""
    spec = get_problem(cfg.problem)
    model = load_model(cfg.model) if cfg.model else None
    if model is not None and not cfg.scheme.startswith("snn"):
        raise ConfigError("--model is only used with snn schemes")
    kernel = cfg.kernel()
    size = cfg.grid_size(spec)
    grid, state, wall = simulate(spec, cfg.scheme, size, cfg.t_final, cfg.cfl, model, kernel)

    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    stem = f"{spec.name}-{cfg.scheme}"
    inputs = {k: v for k, v in asdict(cfg).items() if k != "out"}
    manifest = {
        "inputs": inputs,
        "model_sha256": sha256_file(cfg.model) if cfg.model else None,
        "package_version": wenosnn.__version__,
        "grid": [grid.nx, grid.ny] if spec.is_2d else grid.n,
        "t_final": state.t,
        "steps": len(state.steps),
    }
    manifest_hash = hashlib.sha256(_canonical(manifest).encode()).hexdigest()
    snapshot = out / f"{stem}.csv"
    write_csv(snapshot, _snapshot_rows(spec, grid, state.u), manifest_hash)

    report = report_path = None
    try:
        ref = reference_observable(spec, grid, state.t)
    except NoExactSolutionError:
        ref = None
    if ref is not None:
        cell = grid.dx * grid.dy if spec.is_2d else grid.dx
        l1, l2, linf = error_norms(observable(spec, state.u), ref, cfg.norm, cell)
        report = ErrorReport(l1, l2, linf, manifest["grid"] if spec.is_2d else grid.n, cfg.scheme, spec.name, wall)
        report_path = out / f"{stem}-report.json"
        report_path.write_text(json.dumps({**asdict(report), "norm": cfg.norm}, indent=2, sort_keys=True) + "\n")

    manifest["artifacts"] = {snapshot.name: sha256_file(snapshot)}
    manifest_path = out / f"{stem}-manifest.json"
    manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return RunResult(cfg, snapshot, manifest_path, report, report_path, state.t, len(state.steps))


def rerun_from_manifest(manifest_path, out) -> RunResult:
    inputs = json.loads(Path(manifest_path).read_text())["inputs"]
    return run(RunConfig.from_dict({**inputs, "out": str(out)}))


def write_convergence_csv(path, table: ConvergenceTable, manifest_hash: str = ""):
    rows = table.rows()
    names = ["n", "l1", "l1_order", "l2", "l2_order", "linf", "linf_order"]
    cols = {k: [r[i] for r in rows] for i, k in enumerate(names)}
    cols["n"] = [str(r[0]) for r in rows]
    write_csv(path, cols, manifest_hash or hashlib.sha256(_canonical([table.problem, table.scheme]).encode()).hexdigest())
