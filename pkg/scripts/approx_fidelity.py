"""Where the closed-form BER approximation tracks the exact bound.

For each (lambda, L, W) the users N are swept over the range where the exact
BER lies in [1e-9, 1e-2] and the worst log10 gap to the approximation is
recorded.

    python scripts/approx_fidelity.py --L 300,1000 --out results/fidelity.csv
"""
import argparse
import csv
import math
from pathlib import Path

from adaptive_ocdma.ber import approx_ber_single, ber_single
from adaptive_ocdma.cli import _expand
from adaptive_ocdma.combinatorics import CodeParams


def worst_gap(lam, L, W, lo=1e-9, hi=1e-2):
    p = CodeParams(1, L, W, lam)
    worst, where, count = 0.0, None, 0
    N = 2
    while True:
        e = float(ber_single(N, p, precision=50))
        if e > hi:
            break
        if e >= lo:
            gap = math.log10(approx_ber_single(N, p)) - math.log10(e)
            count += 1
            if abs(gap) > abs(worst):
                worst, where = gap, N
        N += 1
    return worst, where, count


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--lam", default="1,2,3")
    ap.add_argument("--L", default="1000")
    ap.add_argument("--W-max", type=int, default=40)
    ap.add_argument("--out", default="results/fidelity.csv")
    args = ap.parse_args()

    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["lambda", "L", "W", "worst_gap_decades", "at_N", "points"])
        for lam in _expand(args.lam, int):
            for L in _expand(args.L, int):
                w_top = min(args.W_max, int(math.sqrt(2 * lam * L)))
                for W in range(lam + 1, w_top + 1):
                    gap, N, count = worst_gap(lam, L, W)
                    w.writerow([lam, L, W, f"{gap:.3f}", N, count])
                    print(f"lam={lam} L={L} W={W}: {gap:+.2f} decades at N={N} ({count} points)")
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
