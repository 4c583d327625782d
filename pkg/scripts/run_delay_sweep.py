"""Grover success versus idle delay for pair and bare encodings.

Prints both curves side by side and writes one CSV per encoding.
"""
import argparse
from pathlib import Path

from ionpair.bench import sweep_delay
from ionpair.grover import delay_grid
from ionpair.ion_model import PhysicalParams


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--points", type=int, default=32)
    ap.add_argument("--periods", type=float, default=1.0)
    ap.add_argument("--marked", default="|11>")
    ap.add_argument("--out-dir", type=Path, default=Path("results"))
    args = ap.parse_args()

    params = PhysicalParams()
    grid = delay_grid(args.points, params, args.periods)
    reports = {enc: sweep_delay(grid, enc, args.marked, params=params) for enc in ("pair", "bare")}

    args.out_dir.mkdir(parents=True, exist_ok=True)
    for enc, rep in reports.items():
        (args.out_dir / f"delay-{enc}.csv").write_text(rep.to_csv())

    print(f"{'tau':>12} {'pair':>10} {'bare':>10}")
    for tau, p, b in zip(grid, reports["pair"].means, reports["bare"].means):
        print(f"{tau:12.6f} {p:10.6f} {b:10.6f}")


if __name__ == "__main__":
    main()
