"""Success probability of the 1/|nu| preparation and its amplified failure rate versus n."""
import argparse
import csv
import sys

from subqchem.momentum_prep import amplified_failure, box_integral_asymptote, fig1_rows


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-max", type=int, default=12)
    ap.add_argument("--M", type=int, default=None, help="also tabulate a finite inequality register")
    args = ap.parse_args()

    rows = fig1_rows(args.n_max, M=args.M)
    w = csv.DictWriter(sys.stdout, fieldnames=list(rows[0]), lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    p_inf = box_integral_asymptote()
    print(f"# asymptote P={p_inf!r} amplified failure={amplified_failure(p_inf)!r}", file=sys.stderr)


if __name__ == "__main__":
    main()
