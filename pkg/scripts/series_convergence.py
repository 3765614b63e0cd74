#!/usr/bin/env python3
"""Truncation decay of the kernel series against the direct Poisson
kernel.

For each spin degree the partial sums of the degree-slice kernels are
compared with the direct kernel at a fixed set of interior sample
points (|x| <= 0.3); the max absolute gap is tabulated per truncation
level.  The decay rate is geometric in the sample radius; spin degree
shifts the curve up without changing the rate.

Usage:
    python scripts/series_convergence.py --m 3 --kmax 2 --lmax 12
"""

import argparse

import numpy as np

from bosonic.kernels import calibrate_cmk, poisson_series_gap
from bosonic.operator import OperatorParams


def sample_points(m, count, radius, seed):
    rng = np.random.default_rng(seed)
    pts = []
    for _ in range(count):
        zeta = rng.normal(size=m)
        zeta /= np.linalg.norm(zeta)
        x = rng.normal(size=m)
        x *= radius / np.linalg.norm(x)
        u = rng.normal(size=m)
        u /= np.linalg.norm(u)
        v = rng.normal(size=m)
        v /= np.linalg.norm(v)
        pts.append((tuple(zeta), tuple(x), tuple(u), tuple(v)))
    return pts


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--m", type=int, default=3)
    ap.add_argument("--kmax", type=int, default=2)
    ap.add_argument("--lmax", type=int, default=12)
    ap.add_argument("--radius", type=float, default=0.3)
    ap.add_argument("--points", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    if args.radius > 0.3:
        ap.error("sample radius must be at most 0.3")
    pts = sample_points(args.m, args.points, args.radius, args.seed)
    header = ["L"] + ["k=%d" % k for k in range(args.kmax + 1)]
    print("\t".join(header))
    columns = []
    for k in range(args.kmax + 1):
        params = OperatorParams(args.m, k)
        spec = calibrate_cmk(params)
        columns.append(
            [poisson_series_gap(params, spec, L, pts) for L in range(1, args.lmax + 1)]
        )
    for i, L in enumerate(range(1, args.lmax + 1)):
        row = [str(L)] + ["%.3e" % col[i] for col in columns]
        print("\t".join(row))
    # empirical decay rate from the last two levels
    for k, col in enumerate(columns):
        if col[-2] > 0:
            print("k=%d tail ratio: %.3f" % (k, col[-1] / col[-2]))


if __name__ == "__main__":
    main()
