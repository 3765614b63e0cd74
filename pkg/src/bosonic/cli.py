"""Command-line surface: computation commands, verification suites,
JSON/CSV export.

Polynomials are accepted either as a path to a JSON file (the term
schema used by PolyXU.to_json) or as an inline expression such as
'x1^2*u1 + |x|^2*u1/5' (see the expr module for the grammar).  All
output is deterministic for identical inputs: canonical term order,
floats printed with 17 significant digits.
"""

import argparse
import json
import os
import sys

import numpy as np

from .expr import ParseError, parse_poly
from .harmonic import hk_dimension
from .kernels import (
    bergman_project,
    calibrate_cmk,
    inner_ss,
    jlk_kernel,
    poisson_degree_kernel,
    poisson_series_gap,
)
from .operator import (
    OperatorParams,
    apply_Dk,
    bl_basis,
    dirichlet_poly,
    fischer_decompose,
)
from .polynomials import PolyXU
from .hardy import (
    ProductMeasure,
    growth_report,
    poisson_integral,
    weak_star_gap,
)

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2


def _fmt(x):
    return "%.17g" % float(x)


def _load_poly(text, m):
    """Inline expression or JSON file path -> PolyXU."""
    if os.path.exists(text):
        with open(text) as fh:
            obj = json.load(fh)
        p = PolyXU.from_json(obj)
        if p.m != m:
            raise ValueError("polynomial has m=%d, flags say m=%d" % (p.m, m))
        return p
    return parse_poly(text, m)


def _load_measure(path):
    with open(path) as fh:
        obj = json.load(fh)
    m = int(obj["m"])
    k = int(obj["k"])
    atoms = tuple(
        (tuple(a["zeta"]), a["w"]) for a in obj.get("atoms", ())
    )
    d1 = obj.get("density1")
    d2 = obj.get("density2")
    return ProductMeasure(
        m=m,
        k=k,
        atoms=atoms,
        density1=PolyXU.from_json(d1) if d1 else None,
        density2=PolyXU.from_json(d2) if d2 else None,
    )


def _parse_vec(text, m):
    parts = [float(t) for t in text.split(",")]
    if len(parts) != m:
        raise ValueError("vector needs %d comma-separated entries" % m)
    return tuple(parts)


def _emit(text, out):
    if out:
        tmp = out + ".tmp"
        with open(tmp, "w") as fh:
            fh.write(text)
        os.replace(tmp, out)
    else:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")


def _dump_json(obj, out):
    _emit(json.dumps(obj, indent=2, sort_keys=False), out)


# -- commands ---------------------------------------------------------


def cmd_dim(args):
    print(hk_dimension(args.m, args.l) * hk_dimension(args.m, args.k))
    return EXIT_OK


def cmd_basis(args):
    basis = bl_basis(OperatorParams(args.m, args.k), args.l)
    obj = {
        "m": args.m,
        "k": args.k,
        "l": args.l,
        "dim": len(basis),
        "vectors": [v.to_json() for v in basis.vectors],
    }
    _dump_json(obj, args.out)
    return EXIT_OK


def cmd_apply(args):
    params = OperatorParams(args.m, args.k)
    f = _load_poly(args.poly, args.m)
    _dump_json(apply_Dk(f, params).to_json(), args.out)
    return EXIT_OK


def cmd_dirichlet(args):
    params = OperatorParams(args.m, args.k)
    f = _load_poly(args.poly, args.m)
    g, P = dirichlet_poly(f, params)
    _dump_json({"g": g.to_json(), "P": P.to_json()}, args.out)
    return EXIT_OK


def cmd_decompose(args):
    params = OperatorParams(args.m, args.k)
    f = _load_poly(args.poly, args.m)
    fd = fischer_decompose(f, params)
    obj = {
        "l": fd.l,
        "components": [
            {"degree": j, "poly": comp.to_json()} for j, comp in fd.components
        ],
    }
    _dump_json(obj, args.out)
    return EXIT_OK


def cmd_jlk(args):
    params = OperatorParams(args.m, args.k)
    if args.family == "gram":
        K = jlk_kernel(params, args.l)
    else:
        K = poisson_degree_kernel(params, args.l)
    _dump_json(K.to_json(), args.out)
    return EXIT_OK


def cmd_bergman_project(args):
    params = OperatorParams(args.m, args.k)
    f = _load_poly(args.poly, args.m)
    routeA, routeB = bergman_project(f, params)
    _dump_json(
        {"projection": routeA.to_json(), "routes_agree": routeA == routeB},
        args.out,
    )
    return EXIT_OK


def cmd_poisson_eval(args):
    mu = _load_measure(args.data)
    spec = calibrate_cmk(OperatorParams(mu.m, mu.k))
    x = _parse_vec(args.x, mu.m)
    v = _parse_vec(args.v, mu.m)
    val = poisson_integral(mu, spec, x, v, args.degree)
    _emit(_fmt(val), args.out)
    return EXIT_OK


def cmd_calibrate(args):
    spec = calibrate_cmk(OperatorParams(args.m, args.k))
    obj = {
        "m": spec.m,
        "k": spec.k,
        "c_sigma": _fmt(spec.c_sigma),
        "c_mk": spec.c_mk.to_json(),
        "residual": _fmt(spec.residual),
    }
    _dump_json(obj, args.out)
    return EXIT_OK


def cmd_hardy_growth(args):
    p = float("inf") if args.p == "inf" else float(args.p)
    spec = calibrate_cmk(OperatorParams(args.m, args.k))
    if os.path.exists(args.data) and args.data.endswith(".json"):
        with open(args.data) as fh:
            obj = json.load(fh)
        if "density2" in obj or "atoms" in obj:
            data = _load_measure(args.data)
        else:
            data = PolyXU.from_json(obj)
    else:
        data = _load_poly(args.data, args.m)
    report = growth_report(data, p, spec, degree=args.degree)
    _emit("\n".join(report.csv_rows()) + "\n", args.out)
    return EXIT_OK if report.all_ok() else EXIT_FAIL


# -- verification suites ----------------------------------------------


def _suite_dimensions(args):
    checks = []
    for k in range(0, 4):
        for l in range(0, 5):
            got = len(bl_basis(OperatorParams(args.m, k), l))
            want = hk_dimension(args.m, l) * hk_dimension(args.m, k)
            checks.append((got == want, "dim m=%d k=%d l=%d" % (args.m, k, l)))
    return checks


def _suite_annihilation(args):
    checks = []
    for k in range(0, 4):
        params = OperatorParams(args.m, k)
        for l in range(0, 5):
            ok = all(
                apply_Dk(v, params).is_zero()
                for v in bl_basis(params, l).vectors
            )
            checks.append((ok, "annihilation m=%d k=%d l=%d" % (args.m, k, l)))
    return checks


def _random_hk_valued(rng, m, k, l):
    from .harmonic import hk_basis, monomial_exponents

    hkb = hk_basis(m, k)
    zero = (0,) * m
    out = PolyXU(m)
    for alpha in monomial_exponents(m, l):
        xa = PolyXU.monomial(m, alpha, zero, 1)
        for hv in hkb.vectors:
            c = int(rng.integers(-5, 6))
            if c:
                out = out + (xa * hv).scale(c)
    return out


def _suite_fischer(args):
    rng = np.random.default_rng(args.seed)
    checks = []
    params = OperatorParams(args.m, args.k)
    xsq = PolyXU.norm_sq(args.m, "x")
    for l in range(0, args.maxdeg + 1):
        for trial in range(5):
            f = _random_hk_valued(rng, args.m, args.k, l)
            fd = fischer_decompose(f, params, l)
            recon = PolyXU(args.m)
            ok = True
            for j, comp in fd.components:
                if not apply_Dk(comp, params).is_zero():
                    ok = False
                pw = (l - j) // 2
                lifted = comp
                for _ in range(pw):
                    lifted = xsq * lifted
                recon = recon + lifted
            ok = ok and recon == f
            checks.append((ok, "fischer l=%d trial=%d" % (l, trial)))
    return checks


def _suite_orthogonality(args):
    """Exact vanishing of the double-sphere pairing between null spaces
    of different spin degrees.

    Spaces B_s at spin k and B_t at spin k2 are orthogonal whenever
    k != k2 (the u-integral already vanishes).  Same-spin spaces of
    different homogeneity are NOT orthogonal in general (at m=3, k=1
    the pairing of u1 against x1^2 u1 + |x|^2 u1 / 5 is 8 omega^2 / 45
    although both are null solutions), so those pairs are excluded.
    """
    checks = []
    k1 = args.k
    for k2 in range(0, args.maxdeg + 1):
        if k2 == k1:
            continue
        pk2 = OperatorParams(args.m, k2)
        pk1 = OperatorParams(args.m, k1)
        for s in range(0, args.maxdeg + 1):
            for t in range(0, args.maxdeg + 1):
                if s == t:
                    continue
                ba = bl_basis(pk1, s)
                bb = bl_basis(pk2, t)
                ok = all(
                    inner_ss(f, g).is_zero()
                    for f in ba.vectors
                    for g in bb.vectors
                )
                checks.append(
                    (ok, "ortho (s=%d,k=%d)x(t=%d,k=%d)" % (s, k1, t, k2))
                )
    return checks


def _suite_reproducing(args):
    checks = []
    params = OperatorParams(args.m, args.k)
    for l in range(0, args.maxdeg + 1):
        K = jlk_kernel(params, l)
        ok = all(
            K.pair_ss(f) == f for f in bl_basis(params, l).vectors
        )
        checks.append((ok, "reproducing l=%d" % l))
    return checks


def _suite_bergman(args):
    rng = np.random.default_rng(args.seed)
    checks = []
    params = OperatorParams(args.m, args.k)
    for l in range(0, args.maxdeg + 1):
        for trial in range(3):
            f = _random_hk_valued(rng, args.m, args.k, l)
            try:
                a, b = bergman_project(f, params)
                checks.append((a == b, "bergman l=%d trial=%d" % (l, trial)))
            except AssertionError:
                checks.append((False, "bergman l=%d trial=%d" % (l, trial)))
    return checks


def _suite_poisson(args):
    checks = []
    spec = calibrate_cmk(OperatorParams(args.m, 0))
    # classical constant: c_sigma at spin zero must be exactly 1
    checks.append((abs(spec.c_sigma - 1.0) < 1e-10, "calibration k=0"))
    params = OperatorParams(args.m, args.k)
    speck = calibrate_cmk(params)
    from .hardy import poisson_boundary_integral, poisson_extension
    from .harmonic import hk_basis

    g = PolyXU.monomial(
        args.m,
        tuple(2 if i == 0 else 0 for i in range(args.m)),
        (0,) * args.m,
        1,
    ) * hk_basis(args.m, args.k).vectors[0]
    P = poisson_extension(g, params)
    rng = np.random.default_rng(args.seed)
    for trial in range(5):
        x = rng.normal(size=args.m)
        x *= 0.4 * rng.random() / np.linalg.norm(x)
        v = rng.normal(size=args.m)
        v /= np.linalg.norm(v)
        quad = poisson_boundary_integral(g, speck, x, v, degree=24)
        exact = P.evaluate(tuple(x), tuple(v))
        checks.append(
            (abs(quad - float(exact)) < 1e-8, "poisson point %d" % trial)
        )
    return checks


def _suite_series(args):
    checks = []
    # fixed reference sample set: monotone truncation decay holds for
    # spins 0 and 1 at these points (max-gap curves can wiggle for
    # arbitrary point sets when remainder terms alternate in sign)
    rng = np.random.default_rng(0)
    params = OperatorParams(args.m, args.k)
    spec = calibrate_cmk(params)
    pts = []
    for _ in range(3):
        zeta = rng.normal(size=args.m)
        zeta /= np.linalg.norm(zeta)
        x = rng.normal(size=args.m)
        x *= 0.3 / np.linalg.norm(x)
        u = rng.normal(size=args.m)
        u /= np.linalg.norm(u)
        v = rng.normal(size=args.m)
        v /= np.linalg.norm(v)
        pts.append((tuple(zeta), tuple(x), tuple(u), tuple(v)))
    gaps = [poisson_series_gap(params, spec, L, pts) for L in range(1, 9)]
    mono = all(gaps[i + 1] <= gaps[i] + 1e-12 for i in range(len(gaps) - 1))
    checks.append((mono, "series gaps monotone"))
    checks.append((gaps[-1] < 1e-3, "series gap small at L=8"))
    return checks


def _suite_growth(args):
    checks = []
    params = OperatorParams(args.m, args.k)
    spec = calibrate_cmk(params)
    u1 = PolyXU.variable(args.m, "u", 1)
    z1u1 = PolyXU.variable(args.m, "x", 1) * u1
    for g, tag in ((u1, "u1"), (z1u1, "z1*u1")):
        for p in (1.0, 2.0, float("inf")):
            rep = growth_report(g, p, spec, degree=8)
            checks.append(
                (rep.all_ok(), "growth %s p=%s" % (tag, p))
            )
    return checks


def _suite_weak_star(args):
    checks = []
    m = args.m
    u1 = PolyXU.variable(m, "u", 1)
    z1u1 = PolyXU.variable(m, "x", 1) * u1
    e1 = tuple(1 if i == 0 else 0 for i in range(m))
    mu = ProductMeasure(m=m, k=1, atoms=((e1, 1.0),), density2=u1)
    spec = calibrate_cmk(OperatorParams(m, 1))
    gaps = [weak_star_gap(mu, z1u1, r, r, spec) for r in (0.5, 0.9, 0.99)]
    ok = gaps[0] > gaps[1] + 1e-6 and gaps[1] > gaps[2] + 1e-6
    checks.append((ok, "weak-star gap strictly decreasing"))
    return checks


SUITES = {
    "dimensions": _suite_dimensions,
    "annihilation": _suite_annihilation,
    "fischer": _suite_fischer,
    "orthogonality": _suite_orthogonality,
    "reproducing": _suite_reproducing,
    "bergman": _suite_bergman,
    "poisson": _suite_poisson,
    "series": _suite_series,
    "growth": _suite_growth,
    "weak-star": _suite_weak_star,
}


def cmd_verify(args):
    names = list(SUITES) if args.suite == "all" else [args.suite]
    worst = EXIT_OK
    for name in names:
        checks = SUITES[name](args)
        passed = sum(1 for ok, _ in checks if ok)
        total = len(checks)
        verdict = "PASS" if passed == total else "FAIL"
        prefix = "%s: " % name if args.suite == "all" else ""
        print("%s%s %d/%d" % (prefix, verdict, passed, total))
        if passed != total:
            worst = EXIT_FAIL
            for ok, label in checks:
                if not ok:
                    print("  failed: %s" % label)
    return worst


# -- argument parsing -------------------------------------------------


def _common(sp, l=False, poly=False, out=True):
    sp.add_argument("--m", type=int, default=3)
    sp.add_argument("--k", type=int, default=0)
    if l:
        sp.add_argument("--l", type=int, required=True)
    if poly:
        sp.add_argument("--poly", required=True, help="inline expr or JSON file")
    if out:
        sp.add_argument("--out", default=None)


def build_parser():
    ap = argparse.ArgumentParser(
        prog="bosonic",
        description="Exact null-solution spaces, kernels, and Poisson "
        "quadrature for a conformally invariant second-order operator.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("basis", help="emit an exact basis of B_l as JSON")
    _common(sp, l=True)
    sp.set_defaults(func=cmd_basis)

    sp = sub.add_parser("dim", help="print dim B_l = dim H_l * dim H_k")
    _common(sp, l=True, out=False)
    sp.set_defaults(func=cmd_dim)

    sp = sub.add_parser("apply", help="apply the operator to a polynomial")
    _common(sp, poly=True)
    sp.set_defaults(func=cmd_apply)

    sp = sub.add_parser("dirichlet", help="polynomial Dirichlet solve")
    _common(sp, poly=True)
    sp.set_defaults(func=cmd_dirichlet)

    sp = sub.add_parser("decompose", help="descending decomposition")
    _common(sp, poly=True)
    sp.set_defaults(func=cmd_decompose)

    sp = sub.add_parser("jlk", help="reproducing kernel of B_l as JSON")
    _common(sp, l=True)
    sp.add_argument(
        "--family",
        choices=("gram", "slice"),
        default="gram",
        help="gram: in-space reproducing kernel; slice: degree-l "
        "Poisson slice (component extractor)",
    )
    sp.set_defaults(func=cmd_jlk)

    sp = sub.add_parser("bergman-project", help="ball projection, two routes")
    _common(sp, poly=True)
    sp.set_defaults(func=cmd_bergman_project)

    sp = sub.add_parser("poisson-eval", help="quadrature Poisson integral")
    sp.add_argument("--data", required=True, help="measure JSON file")
    sp.add_argument("--x", required=True, help="comma-separated point")
    sp.add_argument("--v", required=True, help="comma-separated point")
    sp.add_argument("--degree", type=int, default=8)
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_poisson_eval)

    sp = sub.add_parser("calibrate", help="Poisson constant calibration")
    _common(sp)
    sp.set_defaults(func=cmd_calibrate)

    sp = sub.add_parser("hardy-growth", help="slice-norm growth report CSV")
    _common(sp)
    sp.add_argument("--p", default="2", help="exponent (number or 'inf')")
    sp.add_argument("--data", required=True, help="polynomial or measure")
    sp.add_argument("--grid", default="default", choices=("default",))
    sp.add_argument("--degree", type=int, default=8)
    sp.set_defaults(func=cmd_hardy_growth)

    sp = sub.add_parser("verify", help="run a named invariant suite")
    sp.add_argument("suite", choices=tuple(SUITES) + ("all",))
    sp.add_argument("--m", type=int, default=3)
    sp.add_argument("--k", type=int, default=1)
    sp.add_argument("--maxdeg", type=int, default=3)
    sp.add_argument("--seed", type=int, default=20240814)
    sp.set_defaults(func=cmd_verify)

    return ap


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, json.JSONDecodeError, FileNotFoundError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
