"""Command-line front end: ``python -m boltzgain <command> ...``.

Exit status: 0 when everything passes, 1 when an inequality fails, 2 for
usage, configuration and precondition errors, 3 for numerical failures.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from .errors import DivergentConstant, DomainError, NonIntegrable, QuadratureFailure
from .gain import (CollisionKernel, GridFunction, LambdaNormSpec, lambda_norm, q0_plus_bobylev,
                   q_plus_carleman, q_plus_direct, theorem2_check)
from .harness import SweepSpec, emit, format_float, parse_profile, render, run_sweep
from .kernel import AngularKernel, XiMeasure, beta_b, finiteness_check, grad_cutoff
from .quadrature import QuadratureSpec
from .radial import (DEFAULT_EPS, ExponentTriple, SigmaMeasure, bilinear_B, lemma23_check,
                     lp_norm_radial, sharpness_study)
from .report import InequalityReport
from .spherical import (NuMeasure, RotationSampler, VelocityFunction, lemma21_pairing,
                        lemma22_check, operator_P, theorem1_check, weighted_lp_norm)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _exp(text: str) -> float:
    t = text.strip().lower()
    if t in ("inf", "infinity", "oo"):
        return math.inf
    try:
        return float(t)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an exponent: {text!r}") from None


def _vector(text: str) -> np.ndarray:
    try:
        return np.array([float(v) for v in text.split(",")])
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated vector: {text!r}") from None


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list: {text!r}") from None


def _kernel(text: str) -> AngularKernel:
    try:
        return AngularKernel.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--kernel", type=_kernel, default=AngularKernel.constant(1.0),
                        help="constant:<c> | power:<c>,<a_minus>,<a_plus> | table:<csv>")
    common.add_argument("--n", type=int, default=3, help="dimension (default 3)")
    common.add_argument("--format", choices=("text", "csv", "json"), default="text")
    common.add_argument("--out", default=None, help="output file (default stdout)")
    common.add_argument("--seed", type=int, default=0, help="seed for Monte Carlo sampling")
    common.add_argument("--threads", type=int, default=None,
                        help="worker threads for sweeps (fallback: BG_THREADS)")
    common.add_argument("--order", type=int, default=None, help="Gauss order per panel")
    common.add_argument("--tol", type=float, default=None, help="quadrature tolerance")
    common.add_argument("--sphere-order", type=int, default=None)
    common.add_argument("--radial-order", type=int, default=None)

    p = argparse.ArgumentParser(prog="boltzgain", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("beta", parents=[common], help="beta_b(x, y) and its finiteness")
    s.add_argument("--x", type=float, required=True)
    s.add_argument("--y", type=float, required=True)

    sub.add_parser("cutoff", parents=[common], help="integral of b over the sphere")

    s = sub.add_parser("op-b", parents=[common], help="B(g, h)(x) for radial profiles")
    s.add_argument("--g", required=True, help="profile: indicator:a,b | gauss:s | power:c,e,R | extremizer:eps,p")
    s.add_argument("--h", required=True)
    s.add_argument("--x", type=_floats, required=True, help="comma-separated points")

    s = sub.add_parser("op-p", parents=[common], help="P(g, h)(k)")
    s.add_argument("--g", required=True, help="gaussian:a | bump:R | shifted:f,c1,..,cn | linearmod:f")
    s.add_argument("--h", required=True)
    s.add_argument("--k", type=_vector, required=True)

    s = sub.add_parser("qplus", parents=[common], help="Q+(g, h)(v)")
    s.add_argument("--method", choices=("direct", "carleman", "bobylev"), default="direct")
    s.add_argument("--lambda", dest="lam", type=float, default=0.0)
    s.add_argument("--g", required=True)
    s.add_argument("--h", default=None, help="defaults to g")
    s.add_argument("--v", type=_vector, required=True)
    s.add_argument("--N", type=int, default=64, help="grid points per axis (bobylev)")
    s.add_argument("--L", type=float, default=8.0, help="grid half-width (bobylev)")
    s.add_argument("--grid-out", default=None, help="save the bobylev grid (BGF1 binary)")

    s = sub.add_parser("norm", parents=[common], help="weighted norms")
    s.add_argument("--f", required=True, help="test function, or a profile with --radial")
    s.add_argument("--p", type=_exp, required=True)
    s.add_argument("--alpha", type=float, default=None, help="|k|^alpha dk norm")
    s.add_argument("--lambda", dest="lam", type=float, default=None, help="L^p_lambda norm")
    s.add_argument("--radial", action="store_true", help="f is a radial profile; sigma norm")

    s = sub.add_parser("verify", parents=[common], help="certify one inequality")
    s.add_argument("which", choices=("lemma21", "lemma22", "lemma23", "thm1", "thm2"))
    s.add_argument("--f", default="bump:1.2")
    s.add_argument("--g", default=None)
    s.add_argument("--h", default=None)
    s.add_argument("--p", type=_exp, default=2.0)
    s.add_argument("--q", type=_exp, default=2.0)
    s.add_argument("--r", type=_exp, default=None)
    s.add_argument("--alpha", type=float, default=0.0)
    s.add_argument("--lambda", dest="lam", type=float, default=0.0)
    s.add_argument("--rotations", type=int, default=4096)
    s.add_argument("--method", choices=("direct", "radial"), default="direct")
    s.add_argument("--check-tol", type=float, default=None, help="pass tolerance on the ratio")

    s = sub.add_parser("sharpness", parents=[common], help="extremizer study")
    s.add_argument("--p", type=_exp, default=2.0)
    s.add_argument("--q", type=_exp, default=2.0)
    s.add_argument("--alpha", type=float, default=0.0)
    s.add_argument("--eps", type=_floats, default=list(DEFAULT_EPS))

    s = sub.add_parser("sweep", parents=[common], help="run a JSON sweep configuration")
    s.add_argument("--config", required=True)
    return p


def _quad(args, **defaults) -> QuadratureSpec:
    kw = dict(defaults)
    for name, key in (("order", "order"), ("tol", "tol"), ("sphere_order", "sphere_order"),
                      ("radial_order", "radial_order")):
        if getattr(args, name, None) is not None:
            kw[key] = getattr(args, name)
    return QuadratureSpec(**kw)


def _fun(text: str, n: int) -> VelocityFunction:
    try:
        return VelocityFunction.parse(text, n)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _profile(text: str):
    try:
        return parse_profile(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _out(args, text: str) -> None:
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _records(args, rows: list[dict]) -> None:
    """Print plain key/value records in the requested format."""
    if args.format == "json":
        clean = [{k: (format_float(v) if isinstance(v, float) and not math.isfinite(v) else v)
                  for k, v in r.items()} for r in rows]
        _out(args, json.dumps(clean if len(clean) != 1 else clean[0], indent=2) + "\n")
    elif args.format == "csv":
        keys = list(rows[0])
        lines = [",".join(keys)]
        for r in rows:
            lines.append(",".join(format_float(v) if isinstance(v, float) else str(v) for v in r.values()))
        _out(args, "\n".join(lines) + "\n")
    else:
        blocks = []
        for r in rows:
            blocks.append("\n".join(f"{k}: {format_float(v) if isinstance(v, float) else v}"
                                    for k, v in r.items()))
        _out(args, "\n\n".join(blocks) + "\n")


def _reports(args, reports: list[InequalityReport]) -> int:
    if args.format == "text":
        lines = []
        for rep in reports:
            status = rep.status if rep.status != "fail" else "FAIL"
            line = f"{rep.name}: {status}"
            if rep.is_skipped:
                line += f" ({rep.reason})"
            else:
                line += (f"  lhs={format_float(rep.lhs)} rhs={format_float(rep.rhs)}"
                         f" constant={format_float(rep.constant)} ratio={format_float(rep.ratio)}")
                if rep.mc_margin:
                    line += f" mc_margin={format_float(rep.mc_margin)}"
            lines.append(line)
        _out(args, "\n".join(lines) + "\n")
    elif args.out:
        emit(reports, args.format, args.out)
    else:
        sys.stdout.write(render(reports, args.format))
    if any(r.status == "error" for r in reports):
        return EXIT_NUMERIC
    if any(r.status == "fail" for r in reports):
        return EXIT_FAIL
    return EXIT_OK


def cmd_beta(args) -> int:
    m = XiMeasure(args.kernel, args.n)
    res = beta_b(args.x, args.y, m, _quad(args))
    fin = finiteness_check(args.x, args.y, m)
    _records(args, [dict(x=args.x, y=args.y, n=args.n, kernel=args.kernel.label,
                         value=res.value, error_estimate=res.error_estimate, finiteness=str(fin))])
    return EXIT_OK


def cmd_cutoff(args) -> int:
    res = grad_cutoff(XiMeasure(args.kernel, args.n), _quad(args))
    _records(args, [dict(n=args.n, kernel=args.kernel.label, value=res.value,
                         error_estimate=res.error_estimate,
                         finiteness="Divergent" if res.divergent else "Finite")])
    return EXIT_OK


def cmd_op_b(args) -> int:
    g, h = _profile(args.g), _profile(args.h)
    m, quad = XiMeasure(args.kernel, args.n), _quad(args)
    _records(args, [dict(x=x, value=bilinear_B(g, h, x, m, quad)) for x in args.x])
    return EXIT_OK


def cmd_op_p(args) -> int:
    if args.k.shape != (args.n,):
        raise UsageError(f"--k needs {args.n} components")
    g, h = _fun(args.g, args.n), _fun(args.h, args.n)
    order = args.sphere_order or 16
    val = operator_P(g, h, args.k, args.kernel, order)
    _records(args, [dict(k=",".join(format_float(v) for v in args.k), value=val)])
    return EXIT_OK


def cmd_qplus(args) -> int:
    if args.v.shape != (args.n,):
        raise UsageError(f"--v needs {args.n} components")
    ck = CollisionKernel(args.lam, args.kernel)
    g = _fun(args.g, args.n)
    h = _fun(args.h, args.n) if args.h else g
    row = dict(method=args.method, v=",".join(format_float(x) for x in args.v))
    if args.method == "direct":
        quad = _quad(args, sphere_order=10, radial_order=16)
        row["value"] = q_plus_direct(g, h, args.v, ck, quad.sphere_order, quad)
    elif args.method == "carleman":
        row["value"] = q_plus_carleman(g, h, args.v, ck, _quad(args, sphere_order=16, radial_order=32))
    else:
        if args.lam != 0:
            raise UsageError("the bobylev method needs --lambda 0")
        if args.h and args.h != args.g:
            raise UsageError("the bobylev method computes Q+(f, f); pass a single --g")
        grid = GridFunction.sample(g, args.N, args.L)
        Q = q0_plus_bobylev(grid, args.kernel, args.sphere_order or 10)
        if args.grid_out:
            Q.save(args.grid_out)
        j = np.clip(np.rint((args.v + Q.L) / Q.spacing).astype(int), 0, Q.N - 1)
        row["grid_point"] = ",".join(format_float(x) for x in Q.axis[j])
        row["value"] = float(Q.values[tuple(j)])
    _records(args, [row])
    return EXIT_OK


def cmd_norm(args) -> int:
    quad = _quad(args)
    if args.radial:
        f = _profile(args.f)
        alpha = args.alpha or 0.0
        val = lp_norm_radial(f, args.p, SigmaMeasure(args.n, alpha), quad)
        row = dict(kind="sigma", p=args.p, alpha=alpha, value=val)
    elif args.lam is not None:
        if args.alpha is not None:
            raise UsageError("pass either --alpha or --lambda, not both")
        f = _fun(args.f, args.n)
        row = dict(kind="lambda", p=args.p, lam=args.lam,
                   value=lambda_norm(f, LambdaNormSpec(args.p, args.lam), quad))
    else:
        f = _fun(args.f, args.n)
        alpha = args.alpha or 0.0
        row = dict(kind="nu", p=args.p, alpha=alpha,
                   value=weighted_lp_norm(f, args.p, NuMeasure(args.n, alpha), quad))
    _records(args, [row])
    return EXIT_OK


def cmd_verify(args) -> int:
    n, kern, which = args.n, args.kernel, args.which
    if which == "lemma23":
        g = _profile(args.g or "indicator:0,1")
        h = _profile(args.h or "indicator:0,1")
        e = ExponentTriple.holder(args.p, args.q)
        rep = lemma23_check(g, h, e, XiMeasure(kern, n), SigmaMeasure(n, args.alpha), _quad(args),
                            tol=args.check_tol or 1e-8)
        return _reports(args, [rep])
    g = _fun(args.g or "gaussian:1", n)
    h = _fun(args.h or "gaussian:1", n)
    if which == "lemma21":
        f = _fun(args.f, n)
        quad = _quad(args, sphere_order=12, radial_order=16)
        lhs, rhs = lemma21_pairing(f, g, h, kern, quad.sphere_order, quad)
        tol = args.check_tol or 1e-4
        rep = InequalityReport.build("lemma21", lhs, rhs, [], tolerance=tol,
                                     params=dict(n=n, kernel=kern.label),
                                     provenance=dict(sphere_order=quad.sphere_order))
        # an identity: both directions must hold
        rep.passed = bool(abs(lhs - rhs) <= tol * max(abs(lhs), abs(rhs), 1e-300))
        rep.status = "pass" if rep.passed else "fail"
        return _reports(args, [rep])
    if which == "lemma22":
        f = _fun(args.f, n)
        r = args.r
        if r is None:
            inv = 1.0 - sum(0.0 if math.isinf(v) else 1.0 / v for v in (args.p, args.q))
            r = math.inf if inv == 0 else 1.0 / inv
        quad = _quad(args, sphere_order=10, radial_order=16)
        rep = lemma22_check(f, g, h, args.p, args.q, r, kern, quad.sphere_order,
                            RotationSampler(args.rotations, args.seed), quad,
                            tol=args.check_tol or 1e-6)
        return _reports(args, [rep])
    if which == "thm1":
        e = ExponentTriple.holder(args.p, args.q)
        quad = _quad(args, sphere_order=12, radial_order=16)
        rep = theorem1_check(g, h, e, NuMeasure(n, args.alpha), kern, quad.sphere_order, quad,
                             tol=args.check_tol or 1e-4, method=args.method)
        return _reports(args, [rep])
    # thm2
    if args.r is not None:
        e = ExponentTriple(args.p, args.q, args.r, relation="young")
    else:
        e = ExponentTriple.young(args.p, args.q)
    quad = _quad(args, sphere_order=10, radial_order=24)
    rep = theorem2_check(g, h, e, CollisionKernel(args.lam, kern), quad.sphere_order, quad,
                         tol=args.check_tol or 1e-3)
    return _reports(args, [rep])


def cmd_sharpness(args) -> int:
    e = ExponentTriple.holder(args.p, args.q)
    study = sharpness_study(e, XiMeasure(args.kernel, args.n), SigmaMeasure(args.n, args.alpha),
                            args.eps, _quad(args))
    rows = [dict(eps=r.eps, norm=r.norm, beta_eps=r.beta_eps, ratio=r.ratio, part_I=r.part_I,
                 part_II=r.part_II, sandwich="ok" if r.sandwich_ok else "violated")
            for r in study.rows]
    for r in rows:
        r["sharp_constant"] = study.constant
    _records(args, rows)
    return EXIT_OK if all(r.sandwich_ok for r in study.rows) else EXIT_FAIL


def cmd_sweep(args) -> int:
    try:
        specs = SweepSpec.load(args.config)
    except OSError as exc:
        raise UsageError(f"cannot read {args.config}: {exc.strerror or exc}") from None
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    threads = args.threads or int(os.environ.get("BG_THREADS", "1") or 1)
    reports = run_sweep(specs, threads=threads)
    if args.format == "text":
        args.format = "csv"
    return _reports(args, reports)


COMMANDS = {
    "beta": cmd_beta, "cutoff": cmd_cutoff, "op-b": cmd_op_b, "op-p": cmd_op_p,
    "qplus": cmd_qplus, "norm": cmd_norm, "verify": cmd_verify, "sharpness": cmd_sharpness,
    "sweep": cmd_sweep,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args)
    except DivergentConstant as exc:
        print(f"precondition violation: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (QuadratureFailure, NonIntegrable, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (UsageError, DomainError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
