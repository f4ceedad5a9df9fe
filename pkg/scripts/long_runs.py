"""Smoke runs of the strong-shock problems for all four schemes.

Each run either reaches its final time with a finite solution or reports the
solver failure with its time stamp. The 2D problems at 400x400 take tens of
minutes to hours per scheme on one core.
"""

import argparse
import time
from pathlib import Path

import numpy as np

from wenosnn.bench import simulate
from wenosnn.problems import get_problem
from wenosnn.snn import load_model
from wenosnn.solver1d import SolverError

PROBLEMS = ("blastwaves", "riemann-2d", "explosion")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--problems", nargs="+", default=list(PROBLEMS))
    ap.add_argument("--schemes", nargs="+", default=["js", "z", "snn1", "snn2"])
    ap.add_argument("--models", default="models")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--n", type=int, help="override the default grid")
    args = ap.parse_args()

    for problem in args.problems:
        spec = get_problem(problem)
        for scheme in args.schemes:
            model = None
            if scheme.startswith("snn"):
                model = load_model(Path(args.models) / f"{scheme}-seed{args.seed}.wsnn")
            t0 = time.perf_counter()
            try:
                _, state, _ = simulate(spec, scheme, args.n, model=model)
            except SolverError as err:
                print(f"FAIL {problem:12s} {scheme:5s} {type(err).__name__} at t={err.t}: {err}", flush=True)
                continue
            ok = np.all(np.isfinite(state.u))
            print(f"{'OK  ' if ok else 'FAIL'} {problem:12s} {scheme:5s} t={state.t:g} "
                  f"steps={len(state.steps)} {time.perf_counter() - t0:.0f}s", flush=True)


if __name__ == "__main__":
    main()
