"""Achievable rate and secrecy capacity against the photon budget (eta = 0.8).

    python scripts/fig2_sweep.py --per-decade 4 --out rates.csv
"""

import argparse
import csv
import sys
from concurrent.futures import ProcessPoolExecutor

from ppmwt.cli import OPTIMIZE_COLUMNS, fmt, optimize_row, parse_sweep


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--eta", type=float, default=0.8)
    ap.add_argument("--lo", type=float, default=1e-12)
    ap.add_argument("--hi", type=float, default=1e-2)
    ap.add_argument("--per-decade", type=int, default=4)
    ap.add_argument("--pr-error-target", type=float, default=1e-6)
    ap.add_argument("--delta-target", type=float, default=0.05)
    ap.add_argument("--workers", type=int, default=4)
    ap.add_argument("--out")
    args = ap.parse_args()

    Es = parse_sweep(f"{args.lo}:{args.hi}:{args.per_decade}")
    jobs = [(args.eta, E, args.pr_error_target, args.delta_target) for E in Es]
    with ProcessPoolExecutor(args.workers) as pool:
        rows = list(pool.map(optimize_row, *zip(*jobs)))

    cols = OPTIMIZE_COLUMNS + ["rate_over_capacity"]
    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(cols)
    for row in rows:
        row["rate_over_capacity"] = row["rate_nats"] / row["capacity_nats"]
        w.writerow([fmt(row.get(c)) for c in cols])
    if args.out:
        fh.close()

    feasible = [r["E"] for r in rows if r["feasible"]]
    if feasible:
        print(f"largest feasible E: {max(feasible):.3g}", file=sys.stderr)


if __name__ == "__main__":
    main()
