"""Tabulate worst-case rounding ratios and optionally write the ratio curves."""
import argparse
import csv

from qmclab.special import all_constants, find_alpha_rho


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--grid-step", type=float, default=1e-3)
    ap.add_argument("--kmax", type=int, default=8, help="also tabulate kMC for k = 4..kmax")
    ap.add_argument("--curves", help="CSV path for (kind, rho, ratio) rows")
    args = ap.parse_args()

    reports = all_constants(grid_step=args.grid_step)
    reports += [find_alpha_rho("kMC", k, grid_step=args.grid_step) for k in range(4, args.kmax + 1) if k != 5]
    print(f"{'kind':>5} {'k':>3} {'alpha':>12} {'rho*':>12}")
    for r in sorted(reports, key=lambda r: (r.kind == "GP", r.k)):
        print(f"{r.kind:>5} {r.k:>3} {r.alpha:12.8f} {r.rho_star:12.8f}")

    if args.curves:
        with open(args.curves, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["kind", "rho", "ratio"])
            for r in reports:
                w.writerows((r.kind, rho, val) for rho, val in r.grid)
        print(f"curves written to {args.curves}")


if __name__ == "__main__":
    main()
