"""Convergence and 2D error tables for every scheme, written as CSV and printed.

Covers sine advection and the Euler density wave (N = 10..160), and 2D square
advection and 2D Burgers at 80x80.
"""

import argparse
from pathlib import Path

from wenosnn.bench import convergence_study, measure, write_convergence_csv
from wenosnn.snn import load_model
from wenosnn.weno import KernelConfig

GRIDS = (10, 20, 40, 80, 160)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--models", default="models", help="directory with snn1-seed0.wsnn and snn2-seed0.wsnn")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="out/tables")
    ap.add_argument("--epsilon-js", type=float, default=None)
    ap.add_argument("--skip-2d", action="store_true")
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    kernel = KernelConfig() if args.epsilon_js is None else KernelConfig(epsilon_js=args.epsilon_js)

    schemes = {"js": None, "z": None}
    for tag in ("snn1", "snn2"):
        path = Path(args.models) / f"{tag}-seed{args.seed}.wsnn"
        if path.exists():
            schemes[tag] = load_model(path)
        else:
            print(f"({path} not found, skipping {tag})")

    for problem in ("advection-sine", "euler-density-wave"):
        print(f"\n{problem}")
        print(f"{'scheme':>6} {'N':>5} {'L1':>11} {'order':>7} {'Linf':>11} {'order':>7}")
        for scheme, model in schemes.items():
            table = convergence_study(problem, scheme, GRIDS, model, kernel)
            write_convergence_csv(out / f"{problem}-{scheme}.csv", table)
            for n, l1, o1, _, _, li, oi in table.rows():
                print(f"{scheme:>6} {n:>5} {l1:11.3e} {o1:7.4f} {li:11.3e} {oi:7.4f}")

    if args.skip_2d:
        return
    for problem in ("advection-2d-square", "burgers-2d"):
        print(f"\n{problem} (L2 column is sqrt of the mean absolute error)")
        print(f"{'scheme':>6} {'L1':>10} {'L2':>10} {'Linf':>10} {'time':>7}")
        for scheme, model in schemes.items():
            rep, _ = measure(problem, scheme, model=model, kernel=kernel, norm="sqrt-l1")
            print(f"{scheme:>6} {rep.l1:10.6f} {rep.l2:10.6f} {rep.linf:10.6f} {rep.wall_time:6.1f}s")


if __name__ == "__main__":
    main()
