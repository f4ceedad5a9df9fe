"""``wenosnn`` command line: run, convergence, compare, train, reference.

Exit codes: 0 success, 2 bad configuration, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import asdict, replace
from pathlib import Path

import numpy as np

from wenosnn import bench
from wenosnn.problems import REGISTRY, AUXILIARY, UnknownProblemError, get_problem
from wenosnn.snn import ModelFormatError, load_model, save_model
from wenosnn.solver1d import ConfigError, SolverError
from wenosnn.training import CsvLog, TrainingDivergedError, TrainingPlan

log = logging.getLogger("wenosnn")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3


def _load_config_file(path):
    path = Path(path)
    if path.suffix == ".toml":
        import tomli

        return tomli.loads(path.read_text())
    return json.loads(path.read_text())


def _common(p, scheme=True):
    p.add_argument("--problem", required=True, help="problem name")
    if scheme:
        p.add_argument("--scheme", default="js", help="js | z | linear | snn1 | snn2")
    p.add_argument("--model", help="model file for snn schemes")
    p.add_argument("--cfl", type=float, default=None, help="CFL number (problem default 0.4)")
    p.add_argument("--epsilon-js", type=float, default=None, help="override the JS epsilon")
    p.add_argument("--norm", default="mean", choices=bench.NORMS)
    p.add_argument("--out", default="out")
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="wenosnn", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="solve one problem and write a CSV snapshot")
    _common(p)
    p.add_argument("--n", type=int)
    p.add_argument("--nx", type=int)
    p.add_argument("--ny", type=int)
    p.add_argument("--tfinal", type=float)
    p.add_argument("--config", help="TOML/JSON run config or a run manifest")

    p = sub.add_parser("convergence", help="grid refinement table")
    _common(p)
    p.add_argument("--grids", type=int, nargs="+")

    p = sub.add_parser("compare", help="several schemes side by side")
    _common(p, scheme=False)
    p.add_argument("--schemes", nargs="+", default=["js", "z"])
    p.add_argument("--model1", help="model for snn1")
    p.add_argument("--model2", help="model for snn2")
    p.add_argument("--n", type=int)
    p.add_argument("--tfinal", type=float)

    p = sub.add_parser("train", help="two-stage training")
    p.add_argument("--config", help="TOML/JSON training config")
    p.add_argument("--loss", choices=("L1", "L2"))
    p.add_argument("--seed", type=int)
    p.add_argument("--out", default="out")

    p = sub.add_parser("reference", help="build the fine-grid reference cache")
    p.add_argument("--problem", required=True)
    p.add_argument("--n", type=int)
    p.add_argument("--refinement", type=int, default=10)
    p.add_argument("--scheme", default="z")
    p.add_argument("--cache", help="cache directory")

    sub.add_parser("problems", help="list problem names")
    return ap


def _cmd_run(a):
    d = {}
    if a.config:
        d = _load_config_file(a.config)
        d = d.get("inputs", d)  # accept a manifest directly
    cli = {"problem": a.problem, "scheme": a.scheme, "model": a.model, "n": a.n, "nx": a.nx, "ny": a.ny,
           "t_final": a.tfinal, "cfl": a.cfl, "seed": a.seed, "out": a.out, "norm": a.norm,
           "epsilon_js": a.epsilon_js}
    d.update({k: v for k, v in cli.items() if v is not None})
    res = bench.run(bench.RunConfig.from_dict(d))
    print(f"wrote {res.snapshot} (t={res.t!r}, {res.steps} steps)")
    if res.report:
        r = res.report
        print(f"L1={r.l1:.6e} L2={r.l2:.6e} Linf={r.linf:.6e} ({res.config.norm})")


def _kernel(a):
    return bench.RunConfig(problem="sod", epsilon_js=a.epsilon_js).kernel()


def _cmd_convergence(a):
    model = load_model(a.model) if a.model else None
    bench.solver_config(a.scheme, model)  # validate before the sweep
    table = bench.convergence_study(a.problem, a.scheme, a.grids, model, _kernel(a), a.norm)
    out = Path(a.out)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"{table.problem}-{table.scheme}-convergence.csv"
    bench.write_convergence_csv(path, table)
    print(f"{'N':>6} {'L1':>12} {'order':>7} {'Linf':>12} {'order':>7}")
    for n, l1, o1, _, _, li, oi in table.rows():
        print(f"{n!s:>6} {l1:12.4e} {o1:7.4f} {li:12.4e} {oi:7.4f}")
    print(f"wrote {path}")


def _cmd_compare(a):
    spec = get_problem(a.problem)
    models = {"snn1": a.model1 or a.model, "snn2": a.model2 or a.model}
    cols = None
    for scheme in a.schemes:
        path = models.get(scheme)
        model = load_model(path) if (scheme.startswith("snn") and path) else None
        grid, state, _ = bench.simulate(spec, scheme, a.n, a.tfinal, a.cfl, model, _kernel(a))
        if cols is None:
            cols = {"x": grid.x} if not spec.is_2d else dict(zip("xy", (m.ravel() for m in grid.mesh())))
            try:
                ref = bench.reference_observable(spec, grid, state.t)
                cols["reference"] = np.ravel(ref)
            except LookupError:
                pass
        cols[scheme] = np.ravel(bench.observable(spec, state.u))
    out = Path(a.out)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"{spec.name}-compare.csv"
    bench.write_csv(path, cols, bench.hashlib.sha256(bench._canonical(vars(a)).encode()).hexdigest())
    print(f"wrote {path}")


def _cmd_train(a):
    d = _load_config_file(a.config) if a.config else {}
    if a.loss:
        d["loss"] = a.loss
    if a.seed is not None:
        d["seed"] = a.seed
    plan = TrainingPlan.from_dict(d)
    logger = CsvLog()
    model = plan.run(logger)
    out = Path(a.out)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"{model.stage}-seed{plan.seed}.wsnn"
    save_model(model, path)
    logger.dump(out / f"{model.stage}-seed{plan.seed}-log.csv")
    print(f"wrote {path} (stage={model.stage}, hyper={model.hyper})")


def _cmd_reference(a):
    spec = get_problem(a.problem)
    n = a.n or spec.n
    x, r = bench.fine_grid_reference(spec, n, None, a.scheme, a.refinement, a.cache)
    print(f"reference for {spec.name}: {len(x)} cells")


def _cmd_problems(a):
    for name, spec in {**REGISTRY, **AUXILIARY}.items():
        tag = " (long-running)" if spec.long_running else ""
        print(f"{name:24s} {spec.kind:10s} n={spec.n} T={spec.t_final:g}{tag}")


COMMANDS = {"run": _cmd_run, "convergence": _cmd_convergence, "compare": _cmd_compare,
            "train": _cmd_train, "reference": _cmd_reference, "problems": _cmd_problems}


def main(argv=None) -> int:
    ap = build_parser()
    try:
        a = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_CONFIG
    logging.basicConfig(level=logging.INFO if a.verbose else logging.WARNING)
    try:
        COMMANDS[a.command](a)
    except (ConfigError, UnknownProblemError, ModelFormatError, FileNotFoundError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (SolverError, TrainingDivergedError, FloatingPointError) as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
