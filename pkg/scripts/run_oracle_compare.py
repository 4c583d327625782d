"""Grover success with the unitary oracle versus the measure-and-rotate oracle."""
import argparse

from ionpair.bench import compare_oracle_modes
from ionpair.gates import MARKED_LABELS


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=10_000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=4)
    ap.add_argument("--level", choices=("logical", "physical"), default="logical")
    args = ap.parse_args()

    print(f"{'marked':>7} {'unitary':>9} {'measured':>9} {'+/-':>8}")
    for marked in MARKED_LABELS:
        rep = compare_oracle_modes(marked, args.trials, args.seed, args.workers, args.level)
        print(f"{marked:>7} {rep.means[0]:9.6f} {rep.means[1]:9.6f} {rep.stderrs[1]:8.5f}")


if __name__ == "__main__":
    main()
