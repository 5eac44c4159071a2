"""Adaptive-allocation gains versus activity probability for several BER targets.

    python scripts/gain_sweep.py --out results/gains.csv
"""
import argparse
import csv
from pathlib import Path

from adaptive_ocdma.allocation import SimConfig, build_codebooks, simulate_gain
from adaptive_ocdma.cli import _expand


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--N", type=int, default=60)
    ap.add_argument("--pe-th", default="1e-5,1e-7,1e-9")
    ap.add_argument("--p-active", default="0.1:1.0:0.1")
    ap.add_argument("--intervals", type=int, default=100_000)
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--out", default="results/gains.csv")
    args = ap.parse_args()

    rows = []
    for pe in _expand(args.pe_th, float):
        tables = {m: build_codebooks(m, args.N, 1, pe) for m in ("rate", "power")}
        for p in _expand(args.p_active, float):
            for mode, tab in tables.items():
                rep = simulate_gain(SimConfig(args.N, 1, pe, p, args.intervals, args.seed, mode=mode), tab)
                for name, (g, se) in rep.variants.items():
                    rows.append([mode, pe, p, name, f"{g:.17g}", f"{se:.3g}"])
                if p == 0.5:
                    print(f"Pe_th={pe:g} p=0.5 {mode}: {rep.variant} gain {rep.gain:.4f} +- {rep.stderr:.4f}")

    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["mode", "Pe_th", "p_active", "variant", "gain", "stderr"])
        w.writerows(rows)
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
