"""Monte-Carlo block error rate vs the binomial-tail bound and its Hoeffding forms.

For each (b, theta, q) the code dimension follows k = floor((1 - theta)(1 - q) n)
and the pulse energy is set so that Bob's erasure probability is q.
"""

import argparse
import csv
import math
import sys

from ppmwt import bounds
from ppmwt.params import SchemeParams
from ppmwt.pipeline import run_trials


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--eta", type=float, default=0.8)
    ap.add_argument("--trials", type=int, default=10**6)
    ap.add_argument("--rng-seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["b", "n", "k", "theta", "q", "empirical", "radius", "I_q",
                "hoeffding_backoff", "hoeffding_tail", "dominated", "backoff_holds"])
    for b in (8, 16, 32, 64):
        n = b - 1
        for theta in (0.05, 0.1, 0.2):
            for q in (0.3, 0.6, 0.9):
                k = bounds.code_dimension(n, q, theta)
                if k < 1:
                    continue
                p = SchemeParams(eta=args.eta, b=b, k=k, pulse_energy=-math.log(q) / args.eta)
                res = run_trials(p, args.trials, args.rng_seed, args.workers, engine="erasure")
                I = bounds.pr_error_bound(n, k, p.erasure_prob)
                back = bounds.hoeffding_error_bound(n, theta)
                w.writerow([b, n, k, theta, q, f"{res.error_rate:.6g}", f"{res.radius:.3g}",
                            f"{I:.6g}", f"{back:.6g}",
                            f"{bounds.hoeffding_tail_bound(n, k, p.erasure_prob):.6g}",
                            res.error_rate <= I + res.radius, I <= back])


if __name__ == "__main__":
    main()
