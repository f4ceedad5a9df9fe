"""Train the stage-1 network and both stage-2 models, writing them as .wsnn files."""

import argparse
import time
from pathlib import Path

from wenosnn.snn import save_model
from wenosnn.training import STAGE1, STAGE2, CsvLog, LossConfig, train_stage1, train_stage2


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="models")
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    log = CsvLog()
    t0 = time.perf_counter()
    base = train_stage1(STAGE1, seed=args.seed, log=log)
    save_model(base, out / f"init-seed{args.seed}.wsnn")
    print(f"stage 1: {time.perf_counter() - t0:.1f}s, final loss {log.rows[-1][2]:.3e}")
    for kind, tag in (("L1", "snn1"), ("L2", "snn2")):
        t0 = time.perf_counter()
        m = train_stage2(base, STAGE2, LossConfig(kind), seed=args.seed, log=log)
        path = save_model(m, out / f"{tag}-seed{args.seed}.wsnn")
        print(f"{tag}: {time.perf_counter() - t0:.1f}s, final loss {log.rows[-1][2]:.3e} -> {path}")
    log.dump(out / f"training-seed{args.seed}-log.csv")


if __name__ == "__main__":
    main()
