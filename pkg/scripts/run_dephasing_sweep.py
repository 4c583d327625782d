"""Monte Carlo fidelity of a pair-encoded qubit under collective and independent dephasing."""
import argparse
from pathlib import Path

import numpy as np

from ionpair.bench import independent_dephasing_fidelity, sweep_dephasing


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sigma-max", type=float, default=3.0)
    ap.add_argument("--points", type=int, default=13)
    ap.add_argument("--trials", type=int, default=10_000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=4)
    ap.add_argument("--out-dir", type=Path, default=Path("results"))
    args = ap.parse_args()

    grid = list(np.linspace(0.0, args.sigma_max, args.points))
    args.out_dir.mkdir(parents=True, exist_ok=True)
    reports = {}
    for kind in ("collective-dephasing", "independent-dephasing"):
        rep = sweep_dephasing(grid, kind, args.trials, args.seed, args.workers)
        (args.out_dir / f"{kind}.csv").write_text(rep.to_csv())
        reports[kind] = rep

    print(f"{'sigma':>6} {'collective':>11} {'independent':>12} {'+/-':>8} {'closed form':>12}")
    coll, ind = reports["collective-dephasing"], reports["independent-dephasing"]
    for i, s in enumerate(grid):
        print(f"{s:6.2f} {coll.means[i]:11.6f} {ind.means[i]:12.6f} {ind.stderrs[i]:8.5f} "
              f"{independent_dephasing_fidelity(s):12.6f}")


if __name__ == "__main__":
    main()
