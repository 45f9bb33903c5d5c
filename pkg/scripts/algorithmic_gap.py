"""Rounded value of the identity solution on loop-free noisy hypercubes of growing dimension.

The dictator keeps the SDP value while projection rounding of x -> x/sqrt(n)
falls to roughly alpha times it.
"""
import argparse
import json

from qmclab.rounding import hypercube_gap


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--dims", type=int, nargs="+", default=[4, 6, 8, 10])
    ap.add_argument("--rho", type=float, default=None, help="defaults to the worst-case rho for k")
    ap.add_argument("--k", type=int, default=3)
    ap.add_argument("--trials", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--json", help="write all reports here")
    args = ap.parse_args()

    out = []
    print(f"{'n':>3} {'dictator':>10} {'rounded':>10} {'stderr':>8} {'ratio':>8} {'alpha':>8}")
    for n in args.dims:
        rep = hypercube_gap(n, args.rho, args.k, args.trials, seed=args.seed)
        r = rep.rounding
        print(f"{n:>3} {rep.dictator_value:10.6f} {r.mean_rounded:10.6f} {r.stderr:8.5f} "
              f"{r.ratio:8.5f} {rep.alpha:8.5f}")
        out.append(rep.to_dict())
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(out, fh, indent=2)


if __name__ == "__main__":
    main()
