"""Command line entry point: ``homsphere <subcommand> [flags]``.

Exit codes: 0 ok, 2 bad input, 3 a verification tolerance was violated,
4 numerical non-convergence. JSON reports carry ``schema_version`` and the
seed of every stochastic quantity; identical arguments give byte-identical
output.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys

import numpy as np

from . import fields
from .curvature_oracle import ricci_by_finite_differences
from .group import UnitQuaternion, haar_samples
from .integral_geometry import verify_averaging_formula, verify_unimodularity
from .metric import (HomogeneousMetric, berger, ricci_eigenvalues, structure_constants,
                     volume)
from .quadrature import QuadratureError, SurfaceGrid
from .surfaces import (area, covering_radius, sigma0, sphere_set_distance,
                       translate_sphere)
from .svg import line_plot
from .systole import (CUBE_ROOT_PI, ROUND_NORMALIZED_SYSTOLE, F_derivatives_at_one,
                      berger_minimal_area, conformal_experiment, systole_curve,
                      two_systole_rp3)

SCHEMA_VERSION = 1
EXIT_OK, EXIT_USAGE, EXIT_TOLERANCE, EXIT_NONCONVERGENCE = 0, 2, 3, 4
CSV_HEADER = ("rho", "area_sigma0", "volume", "F", "normalized_systole")
SECOND_DERIVATIVE_ORACLE = 32.0 / 45.0


class UsageError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        # one-line diagnostic instead of the usage block
        self.exit(EXIT_USAGE, "%s: error: %s\n" % (self.prog, message))


def _floats(text, count=None):
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError:
        raise UsageError("expected comma-separated numbers, got %r" % text) from None
    if count is not None and len(vals) != count:
        raise UsageError("expected %d comma-separated numbers, got %r" % (count, text))
    return vals


def _metric(args) -> HomogeneousMetric:
    if args.rho is not None and args.lambdas is not None:
        raise UsageError("give either --rho or --lambda, not both")
    try:
        if args.lambdas is not None:
            return HomogeneousMetric(tuple(_floats(args.lambdas, 3)))
        return berger(1.0 if args.rho is None else args.rho)
    except UsageError:
        raise
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _grid(args) -> SurfaceGrid:
    try:
        return SurfaceGrid(args.ns, args.ntheta)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _check_positive_int(value, name):
    if value < 1:
        raise UsageError("%s must be positive" % name)


def _metric_json(m):
    return {"lambda": list(m.lambdas)}


def _emit(args, text: str):
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json(command, config, results) -> str:
    doc = {"schema_version": SCHEMA_VERSION, "command": command, "config": config,
           "results": results}
    return json.dumps(doc, sort_keys=True, indent=2, allow_nan=True) + "\n"


def _text(lines) -> str:
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------

def cmd_ricci(args) -> int:
    m = _metric(args)
    ric = ricci_eigenvalues(m)
    res = {"eigenvalues": list(ric.values), "scalar_curvature": ric.scalar,
           "positive_ricci": ric.positive, "structure_constants": list(structure_constants(m))}
    if args.check:
        frame_vals, _ = ricci_by_finite_differences(m)
        res["finite_difference"] = [float(v) for v in frame_vals]
        res["finite_difference_max_error"] = float(np.max(np.abs(frame_vals - ric.values)))
    if args.format == "text":
        lines = ["%.12g %.12g %.12g" % tuple(ric.values),
                 "scalar %.12g" % ric.scalar,
                 "positive Ricci" if ric.positive else "not positive Ricci"]
        _emit(args, _text(lines))
    else:
        _emit(args, _json("ricci", _metric_json(m), res))
    if args.check and res["finite_difference_max_error"] > 1e-6:
        return EXIT_TOLERANCE
    return EXIT_OK


def cmd_area(args) -> int:
    m = _metric(args)
    grid = _grid(args)
    status = EXIT_OK
    res = {"ns": grid.n_s, "ntheta": grid.n_theta, "volume": volume(m)}
    try:
        res["area_grid"] = area(sigma0(), m, grid, tol=args.tol)
    except QuadratureError as exc:
        res["area_grid"] = area(sigma0(), m, grid)
        res["error"] = str(exc)
        status = EXIT_NONCONVERGENCE
    if m.is_berger():
        rho = m.rho
        res["area_1d"] = berger_minimal_area(rho)
        res["two_systole_rp3"] = two_systole_rp3(rho)
        res["difference_grid_vs_1d"] = abs(res["area_grid"] - res["area_1d"])
        if status == EXIT_OK and res["difference_grid_vs_1d"] > args.tol * res["area_1d"]:
            status = EXIT_TOLERANCE
    if args.format == "text":
        _emit(args, _text("%s %.17g" % (k, v) if isinstance(v, float) else "%s %s" % (k, v)
                          for k, v in sorted(res.items())))
    else:
        _emit(args, _json("area", dict(_metric_json(m), tol=args.tol), res))
    return status


def cmd_systole_curve(args) -> int:
    _check_positive_int(args.points, "--points")
    try:
        pts = systole_curve(args.min, args.max, args.points, args.spacing, args.tol)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.format == "csv":
        buf = io.StringIO()
        buf.write(",".join(CSV_HEADER) + "\n")
        for p in pts:
            buf.write(",".join("%.17g" % getattr(p, c) for c in CSV_HEADER) + "\n")
        _emit(args, buf.getvalue())
    elif args.format == "json":
        config = {"min": args.min, "max": args.max, "points": args.points,
                  "spacing": args.spacing, "tol": args.tol}
        rows = [{c: getattr(p, c) for c in CSV_HEADER} | {"converged": p.converged} for p in pts]
        _emit(args, _json("systole-curve", config, {"points": rows,
                                                    "round_normalized_systole": ROUND_NORMALIZED_SYSTOLE}))
    else:
        rhos = [p.rho for p in pts]
        _emit(args, line_plot(rhos, {"F": [p.F for p in pts],
                                     "normalized systole": [p.normalized_systole for p in pts]},
                              title="Berger systole curve", log_x=args.spacing == "log",
                              log_y=args.spacing == "log"))
    return EXIT_OK if all(p.converged for p in pts) else EXIT_NONCONVERGENCE


def cmd_verify_formula(args) -> int:
    m = _metric(args)
    grid = _grid(args)
    _check_positive_int(args.n, "--n")
    if args.n < 1000:
        raise UsageError("--n must be at least 1000")
    try:
        f = fields.parse_field(args.field)
        ref = sigma0() if args.translate is None else translate_sphere(
            UnitQuaternion.from_coords(_floats(args.translate, 4)), sigma0())
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    rep = verify_averaging_formula(m, f, ref, args.n, grid, args.seed,
                                   shared_seed=args.shared_seed)
    res = rep.to_dict()
    res["consistent_3_sigma"] = rep.consistent(3.0)
    ok = rep.consistent(3.0) and (args.tol is None or rep.rel_error < args.tol)
    config = dict(_metric_json(m), field=f.name, n=args.n, seed=args.seed, ns=grid.n_s,
                  ntheta=grid.n_theta, reference=list(ref.translation.coords),
                  shared_seed=args.shared_seed, tol=args.tol)
    _emit(args, _json("verify-formula", config, res))
    return EXIT_OK if ok else EXIT_TOLERANCE


def cmd_unimodularity(args) -> int:
    m = _metric(args)
    _check_positive_int(args.n, "--n")
    _check_positive_int(args.count, "--count")
    try:
        f = fields.parse_field(args.field)
        if args.q is not None:
            qs = [UnitQuaternion.from_coords(_floats(args.q, 4))]
        else:
            rng = np.random.default_rng(np.random.SeedSequence(args.seed, spawn_key=(7,)))
            qs = [UnitQuaternion.from_coords(x) for x in haar_samples(rng, args.count)]
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    reports = []
    ok = True
    for q in qs:
        rep = verify_unimodularity(m, f, q, args.n, args.seed)
        ok &= rep.consistent(3.0)
        reports.append(dict(rep.to_dict(), q=list(q.coords)))
    config = dict(_metric_json(m), field=f.name, n=args.n, seed=args.seed)
    _emit(args, _json("unimodularity", config, {"reports": reports, "all_consistent": ok}))
    return EXIT_OK if ok else EXIT_TOLERANCE


def random_noncentral(rng, count, margin=0.2):
    """Haar translations at chord distance > ``margin`` from both +1 and -1."""
    out = []
    while len(out) < count:
        a = haar_samples(rng, 1)[0]
        if math.sqrt(max(0.0, 2.0 - 2.0 * abs(a[0]))) > margin:
            out.append(a)
    return np.array(out)


def cmd_stabilizer(args) -> int:
    grid = _grid(args)
    _check_positive_int(args.n, "--n")
    s0 = sigma0()
    threshold = covering_radius(grid)
    antipodal = sphere_set_distance(s0, translate_sphere(UnitQuaternion(-1.0, 0.0), s0), grid)
    rng = np.random.default_rng(np.random.SeedSequence(args.seed, spawn_key=(11,)))
    rows = []
    for a in random_noncentral(rng, args.n):
        d = sphere_set_distance(s0, translate_sphere(UnitQuaternion.from_coords(a), s0), grid)
        exact = math.sqrt(max(0.0, 2.0 - 2.0 * abs(a[0])))
        rows.append({"translation": list(a), "distance": d, "exact_distance": exact,
                     "separated": d > threshold})
    ok = antipodal < threshold and all(r["separated"] for r in rows)
    res = {"threshold": threshold, "antipodal_distance": antipodal,
           "antipodal_invariant": antipodal < threshold, "translates": rows,
           "all_separated": all(r["separated"] for r in rows)}
    config = {"ns": grid.n_s, "ntheta": grid.n_theta, "n": args.n, "seed": args.seed}
    _emit(args, _json("stabilizer-test", config, res))
    return EXIT_OK if ok else EXIT_TOLERANCE


def cmd_conformal(args) -> int:
    m = _metric(args)
    grid = _grid(args)
    _check_positive_int(args.n, "--n")
    try:
        phi = fields.parse_factor(args.factor)
        rep = conformal_experiment(m, phi, grid, tol=args.tol, n_translations=args.n,
                                   n_volume=args.nvol, seed=args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    res = rep.to_dict()
    res["ratio_display"] = "%.6f" % rep.ratio
    res["round_normalized_systole"] = ROUND_NORMALIZED_SYSTOLE
    res["round_normalized_systole_exact"] = "2*pi^(-1/3)"
    config = dict(_metric_json(m), factor=phi.name, n=args.n, nvol=args.nvol, seed=args.seed,
                  ns=grid.n_s, ntheta=grid.n_theta, tol=args.tol)
    _emit(args, _json("conformal-demo", config, res))
    if rep.ratio > 1.0 + 3.0 * max(rep.bound_rel_se, args.tol):
        return EXIT_TOLERANCE
    return EXIT_OK if rep.optimizer_converged else EXIT_NONCONVERGENCE


def cmd_derivatives(args) -> int:
    try:
        est = F_derivatives_at_one(args.h, args.levels)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    res = {"F_prime_1": est.first, "F_prime_1_error": est.first_error,
           "F_second_1": est.second, "F_second_1_error": est.second_error,
           "second_derivative_oracle": SECOND_DERIVATIVE_ORACLE,
           "second_derivative_deviation": abs(est.second - SECOND_DERIVATIVE_ORACLE),
           "strict_local_minimum": abs(est.first) < 1e-6 and est.second > 0.0,
           "round_normalized_systole": ROUND_NORMALIZED_SYSTOLE,
           "round_normalized_systole_exact": "2*pi^(-1/3)", "cube_root_pi": CUBE_ROOT_PI}
    if args.format == "text":
        _emit(args, _text(["F'(1)  = %.3e  (+- %.1e)" % (est.first, est.first_error),
                           "F''(1) = %.12f  (+- %.1e)" % (est.second, est.second_error),
                           "32/45  = %.12f" % SECOND_DERIVATIVE_ORACLE]))
    else:
        _emit(args, _json("derivatives", {"h": args.h, "levels": args.levels}, res))
    return EXIT_OK if res["strict_local_minimum"] else EXIT_TOLERANCE


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------

def _add_metric(p):
    p.add_argument("--rho", type=float, help="Berger parameter (fibre length); default 1")
    p.add_argument("--lambda", dest="lambdas", metavar="a,b,c",
                   help="eigenvalues of a diagonal left-invariant metric")


def _add_grid(p, default=64):
    p.add_argument("--ns", type=int, default=default, help="Gauss-Legendre nodes in s (even)")
    p.add_argument("--ntheta", type=int, default=default, help="trapezoid nodes in theta")


def _add_out(p, formats, default):
    p.add_argument("--format", choices=formats, default=default)
    p.add_argument("--out", help="write to this file instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="homsphere",
        description="Homogeneous three-spheres: curvature, areas of translated two-spheres, "
                    "the translation-averaging formula and Berger two-systoles.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ricci", help="Ricci eigenvalues of a left-invariant metric on S^3",
                       description="Ricci eigenvalues in the orthonormal Milnor frame, scalar "
                                   "curvature and the positive-Ricci verdict.")
    _add_metric(p)
    p.add_argument("--check", action="store_true",
                   help="also compute the Ricci curvatures by finite differences in a chart")
    _add_out(p, ("json", "text"), "json")
    p.set_defaults(func=cmd_ricci)

    p = sub.add_parser("area", help="area of the horizontal two-sphere",
                       description="Area of the horizontal sphere {w real} by product "
                                   "quadrature; for Berger metrics also the 1D formula and the "
                                   "RP^3 two-systole.")
    _add_metric(p)
    _add_grid(p)
    p.add_argument("--tol", type=float, default=1e-8, help="relative tolerance")
    _add_out(p, ("json", "text"), "json")
    p.set_defaults(func=cmd_area)

    p = sub.add_parser("systole-curve", help="Berger systole curve F(rho)",
                       description="F(rho) = rho^(-2/3) int sin(s) sqrt(cos^2 s + rho^2 sin^2 s) "
                                   "ds, with the horizontal-sphere area, volume and normalized "
                                   "two-systole F/pi^(1/3) of (RP^3, g_rho).")
    p.add_argument("--min", type=float, default=0.1)
    p.add_argument("--max", type=float, default=10.0)
    p.add_argument("--points", type=int, default=200)
    p.add_argument("--spacing", choices=("linear", "log"), default="log")
    p.add_argument("--tol", type=float, default=1e-13, help="absolute quadrature tolerance")
    _add_out(p, ("csv", "json", "svg"), "csv")
    p.set_defaults(func=cmd_systole_curve)

    p = sub.add_parser("verify-formula",
                       help="Monte Carlo check of the translation-averaging formula",
                       description="Compares the integral over translates of the surface mean "
                                   "of f with the volume integral of f.")
    _add_metric(p)
    _add_grid(p, default=16)
    p.add_argument("--field", default="bump", help="constant:c | coord:i | product:i,j | bump[:k]")
    p.add_argument("--n", type=int, default=10_000, help="samples per side")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, help="also require relative error below this")
    p.add_argument("--translate", metavar="x0,x1,x2,x3", help="reference sphere translation")
    p.add_argument("--shared-seed", action="store_true",
                   help="reuse the translation samples for the volume integral")
    _add_out(p, ("json",), "json")
    p.set_defaults(func=cmd_verify_formula)

    p = sub.add_parser("unimodularity", help="right-translation invariance of the volume form",
                       description="Compares the integral of f with that of f o R_q.")
    _add_metric(p)
    p.add_argument("--field", default="bump")
    p.add_argument("--n", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--q", metavar="x0,x1,x2,x3", help="right translation (default: random)")
    p.add_argument("--count", type=int, default=5, help="number of random q")
    _add_out(p, ("json",), "json")
    p.set_defaults(func=cmd_unimodularity)

    p = sub.add_parser("stabilizer-test",
                       help="antipodal invariance and trivial stabilizer of the horizontal sphere",
                       description="Sample Hausdorff distance between the horizontal sphere and "
                                   "its antipodal image and random translates.")
    _add_grid(p)
    p.add_argument("--n", type=int, default=20, help="number of random translates")
    p.add_argument("--seed", type=int, default=0)
    _add_out(p, ("json",), "json")
    p.set_defaults(func=cmd_stabilizer)

    p = sub.add_parser("conformal-demo",
                       help="min area of translates under phi*g versus the conformal volume bound",
                       description="Minimum area of translated horizontal spheres for the "
                                   "conformal metric phi*g_rho against w(g_rho) "
                                   "(vol(phi g)/vol(g))^(2/3).")
    _add_metric(p)
    _add_grid(p)
    p.add_argument("--factor", default="coord-square:0.5",
                   help="constant:c | coord-square:a[,i] | bump:a[,k]")
    p.add_argument("--n", type=int, default=2000, help="sampled translations")
    p.add_argument("--nvol", type=int, default=10_000, help="volume samples")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=1e-6, help="equality tolerance for the ratio")
    _add_out(p, ("json",), "json")
    p.set_defaults(func=cmd_conformal)

    p = sub.add_parser("derivatives", help="F'(1) and F''(1) of the Berger systole curve",
                       description="Richardson-extrapolated central differences at the round "
                                   "metric.")
    p.add_argument("--h", type=float, default=1e-2)
    p.add_argument("--levels", type=int, default=4)
    _add_out(p, ("json", "text"), "json")
    p.set_defaults(func=cmd_derivatives)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_USAGE
    except QuadratureError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_NONCONVERGENCE


if __name__ == "__main__":
    sys.exit(main())
