"""Write the Werner / isotropic sweep CSVs for m = 2, 3 and optionally plot them.

    python scripts/reproduce_figures.py --out results [--points 101] [--plot]
"""
import argparse
import csv
from pathlib import Path

from fidmin.cli import main as fidmin_main


def plot(csv_paths, out_png):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, axes = plt.subplots(2, 2, figsize=(9, 7))
    for ax, path in zip(axes.flat, csv_paths):
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
        x = [float(r["x"]) for r in rows]
        ax.plot(x, [float(r["N_F"]) for r in rows], "-", label="fidelity")
        ax.plot(x, [float(r["N_HS"]) for r in rows], "--", label="Hilbert-Schmidt")
        ax.set_title(f"{rows[0]['family']}, m={rows[0]['m']}")
        ax.set_xlabel("x")
        ax.legend()
    fig.tight_layout()
    fig.savefig(out_png, dpi=120)


def run():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="results")
    ap.add_argument("--points", type=int, default=101)
    ap.add_argument("--plot", action="store_true")
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for family in ("isotropic", "werner"):
        for m in (2, 3):
            path = out / f"{family}_m{m}.csv"
            code = fidmin_main(["sweep", "--family", family, "--m", str(m),
                                "--points", str(args.points), "--out", str(path)])
            if code:
                raise SystemExit(code)
            paths.append(path)
    if args.plot:
        plot(paths, out / "curves.png")


if __name__ == "__main__":
    run()
