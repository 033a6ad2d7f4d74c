"""Range of the Werner-state MIN over x in [-1, 1] as the dimension grows."""
import argparse

import numpy as np

from fidmin.closedform import werner_hs_formula, werner_min_formula


def spread(f, m, xs):
    v = np.array([f(m, x) for x in xs])
    return v.max() - v.min()


def run():
    ap = argparse.ArgumentParser()
    ap.add_argument("--max-m", type=int, default=10)
    args = ap.parse_args()
    xs = np.linspace(-1, 1, 2001)
    print(f"{'m':>3} {'range N_F':>12} {'range N_HS':>12}")
    for m in range(2, args.max_m + 1):
        print(f"{m:>3} {spread(werner_min_formula, m, xs):12.6f} {spread(werner_hs_formula, m, xs):12.6f}")


if __name__ == "__main__":
    run()
