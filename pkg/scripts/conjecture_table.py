"""Tabulate max(A+G) over the simplex for a range of dimensions (empirical)."""

import argparse
import sys
import time

from markdiv.conjecture import empirical_h


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--dims", type=int, nargs="+", default=[4, 5, 6, 7, 8])
    ap.add_argument("--restarts", type=int, default=64)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--csv", action="store_true", help="print the full per-k tables as CSV")
    args = ap.parse_args()

    print("d  h_emp  2d-5  max(A+G)@2d-5  max(A+G)@2d-4  seconds")
    for d in args.dims:
        start = time.perf_counter()
        h, table = empirical_h(d, restarts=args.restarts, seed=args.seed)
        rows = {r.k: r.A + r.G for r in table.rows}
        below = rows.get(2 * d - 5, float("nan"))
        above = rows.get(2 * d - 4, float("nan"))
        print(f"{d}  {h:5d}  {2 * d - 5:4d}  {below:13.6f}  {above:13.6f}  {time.perf_counter() - start:7.1f}")
        if args.csv:
            sys.stdout.write(f"# EMPIRICAL d={d} h_emp={h} seed={args.seed}\n" + table.to_csv())


if __name__ == "__main__":
    main()
