#!/usr/bin/env python3
"""Slice-norm growth sweep for Poisson extensions of polynomial
boundary data.

Writes one CSV per (data, p) combination with the slice norms over the
radius grid and the bound (m+2k-2)/(m-2) times the boundary norm, and
prints a one-line summary per report.

Usage:
    python scripts/growth_sweep.py --outdir growth_csv
"""

import argparse
import os

from bosonic.expr import parse_poly
from bosonic.hardy import growth_report
from bosonic.kernels import calibrate_cmk
from bosonic.operator import OperatorParams

DATA = [
    ("u1", "u1", 1),
    ("z1u1", "x1*u1", 1),
    ("z1sq_u1", "x1^2*u1", 1),
    ("u1sq_minus_u3sq", "u1^2 - u3^2", 2),
]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--m", type=int, default=3)
    ap.add_argument("--degree", type=int, default=8)
    ap.add_argument("--outdir", default="growth_csv")
    args = ap.parse_args()

    os.makedirs(args.outdir, exist_ok=True)
    for tag, text, k in DATA:
        g = parse_poly(text, args.m)
        spec = calibrate_cmk(OperatorParams(args.m, k))
        for p in (1.0, 2.0, float("inf")):
            rep = growth_report(g, p, spec, degree=args.degree)
            ptag = "inf" if p == float("inf") else "%g" % p
            path = os.path.join(args.outdir, "%s_p%s.csv" % (tag, ptag))
            with open(path, "w") as fh:
                fh.write("\n".join(rep.csv_rows()) + "\n")
            trend = ""
            if rep.corlp_gaps:
                trend = " boundary gaps: " + " -> ".join(
                    "%.3e" % v for v in rep.corlp_gaps
                )
            print(
                "%s p=%s: max norm %.6f bound %.6f %s%s"
                % (
                    tag,
                    ptag,
                    max(rep.values),
                    rep.bound,
                    "OK" if rep.all_ok() else "VIOLATION",
                    trend,
                )
            )


if __name__ == "__main__":
    main()
