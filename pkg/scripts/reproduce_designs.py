"""Rate-optimized designs vs number of users, brute force and heuristic side by side.

    python scripts/reproduce_designs.py --N 5:60:5 --out results/designs.csv

Prints the N=60 lengths at the end (target lengths 809 / 1139 / 1445;
see README for the 1e-9 point).
"""
import argparse
import csv
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from adaptive_ocdma.cli import _expand
from adaptive_ocdma.design import SearchBounds, rate_optimize_brute, rate_optimize_heuristic


def point(args):
    N, pe = args
    t0 = time.perf_counter()
    b = rate_optimize_brute(N, 1, pe, SearchBounds(4000, 100, 5))
    t1 = time.perf_counter()
    h = rate_optimize_heuristic(N, 1, pe)
    return N, pe, b, h, t1 - t0


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--N", default="5:60:5")
    ap.add_argument("--pe-th", default="1e-5,1e-7,1e-9")
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--out", default="results/designs.csv")
    args = ap.parse_args()

    jobs = [(N, pe) for pe in _expand(args.pe_th, float) for N in _expand(args.N, int)]
    with ProcessPoolExecutor(args.threads) as ex:
        results = list(ex.map(point, jobs))

    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["N", "Pe_th", "L_brute", "W_brute", "lambda_brute", "evals_brute",
                    "L_heur", "W_heur", "lambda_heur", "evals_heur", "brute_seconds"])
        for N, pe, b, h, dt in results:
            w.writerow([N, pe, *b.params, b.eval_count, *h.params, h.eval_count, f"{dt:.2f}"])
    for N, pe, b, h, dt in results:
        if N == 60:
            print(f"N=60 Pe_th={pe:g}: brute {b.params} heuristic {h.params} "
                  f"G_com={b.eval_count / h.eval_count:.3g}")
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
