"""Parameter sweeps over the inequality checks and their CSV/JSON output.

A sweep configuration is a JSON object with a ``sweeps`` list (or a single
sweep object).  Each sweep names a ``check`` and lists values along its axes;
the cells are the Cartesian product of the axes, in the order given::

    {"sweeps": [{"check": "thm1", "n": [3], "alpha": [0],
                 "exponents": [[2, 2], [4, 1.3333333333333333]],
                 "kernel": ["constant:1"], "g": "gaussian:1", "h": "gaussian:2"}]}

Cells whose constant diverges are reported as skipped, never as failures.
"""
from __future__ import annotations

import csv
import io
import itertools
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .errors import DivergentConstant, NonIntegrable, QuadratureFailure
from .gain import CollisionKernel, theorem2_check
from .kernel import AngularKernel, XiMeasure
from .quadrature import QuadratureSpec
from .radial import DEFAULT_EPS, ExponentTriple, RadialProfile, SigmaMeasure, lemma23_check, sharpness_study
from .report import InequalityReport
from .spherical import NuMeasure, RotationSampler, VelocityFunction, lemma22_check, theorem1_check

__all__ = ["SweepSpec", "run_sweep", "emit", "format_float", "report_to_dict",
           "report_from_dict", "CSV_COLUMNS", "parse_profile"]

CSV_COLUMNS = ("name", "n", "p", "q", "r", "alpha", "lambda", "kernel", "lhs", "constant", "rhs",
               "ratio", "tolerance", "mc_margin", "pass", "seed", "quad_order")

CHECKS = ("thm1", "thm2", "lemma22", "lemma23", "sharpness")

_OPTIONS = {"g", "h", "tol", "method", "sphere_order", "rotations"}

_AXES = {
    "n": [3],
    "alpha": [0.0],
    "lambda": [0.0],
    "kernel": ["constant:1"],
    "exponents": [[2.0, 2.0]],
    "eps": list(DEFAULT_EPS),
    "seed": [0],
}


def parse_profile(text: str) -> RadialProfile:
    """``indicator:a,b``, ``gauss:scale``, ``power:c,e,cutoff``, ``extremizer:eps,p[,n,alpha]``, ``zero``."""
    from .radial import extremizer_pair

    kind, _, arg = text.strip().partition(":")
    try:
        vals = [float(v) for v in arg.split(",")] if arg else []
        if kind == "indicator":
            return RadialProfile.indicator(*vals)
        if kind == "gauss":
            return RadialProfile.gaussian(*vals)
        if kind == "power":
            return RadialProfile.power(*vals)
        if kind == "zero":
            return RadialProfile.zero()
        if kind == "extremizer":
            eps, p = vals[0], vals[1]
            n = int(vals[2]) if len(vals) > 2 else 3
            alpha = vals[3] if len(vals) > 3 else 0.0
            return extremizer_pair(eps, p, p, n, alpha)[0]
    except (TypeError, ValueError, IndexError) as exc:
        raise ValueError(f"bad profile {text!r}: {exc}") from exc
    raise ValueError(f"bad profile {text!r}: unknown kind {kind!r}")


def _exponent_triple(vals, relation: str) -> ExponentTriple:
    vals = [float(v) for v in vals]
    if len(vals) == 3:
        return ExponentTriple(*vals, relation=relation)
    if len(vals) == 2:
        return ExponentTriple.holder(*vals) if relation == "holder" else ExponentTriple.young(*vals)
    raise ValueError(f"exponents must be [p, q] or [p, q, r], got {vals}")


@dataclass(frozen=True)
class SweepSpec:
    """One check swept over the Cartesian product of its axes.

    ``quad`` holds QuadratureSpec overrides applied to every cell;
    ``options`` holds check-specific settings (test functions, tolerance,
    rotation count, sphere order, method).
    """

    check: str
    axes: dict = field(default_factory=dict)
    quad: dict = field(default_factory=dict)
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.check not in CHECKS:
            raise ValueError(f"unknown check {self.check!r}; expected one of {', '.join(CHECKS)}")
        unknown = set(self.axes) - set(_AXES)
        if unknown:
            raise ValueError(f"unknown sweep axes: {', '.join(sorted(unknown))}")

    @classmethod
    def from_dict(cls, d: dict) -> "SweepSpec":
        d = dict(d)
        if "check" not in d:
            raise ValueError("sweep entry needs a 'check' field")
        check = d.pop("check")
        quad = d.pop("quad", {})
        axes = {k: d.pop(k) for k in list(d) if k in _AXES}
        for k, v in axes.items():
            if not isinstance(v, list):
                raise ValueError(f"axis {k!r} must be a list")
        unknown = set(d) - _OPTIONS
        if unknown:
            raise ValueError(f"unknown fields: {', '.join(sorted(unknown))}")
        if not isinstance(quad, dict):
            raise ValueError("'quad' must be an object")
        try:
            QuadratureSpec(**quad)
        except TypeError as exc:
            raise ValueError(f"bad 'quad' overrides: {exc}") from None
        return cls(check, axes, dict(quad), d)

    @classmethod
    def load(cls, path) -> list["SweepSpec"]:
        """Read a JSON config; errors name the file, line and field."""
        text = Path(path).read_text()
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
        entries = doc.get("sweeps", [doc]) if isinstance(doc, dict) else doc
        specs = []
        for i, e in enumerate(entries):
            try:
                specs.append(cls.from_dict(e))
            except (TypeError, ValueError) as exc:
                raise ValueError(f"{path}: sweeps[{i}]: {exc}") from exc
        return specs

    def axis(self, name):
        return self.axes.get(name, _AXES[name])

    def cells(self) -> list[dict]:
        names = {
            "thm1": ("n", "alpha", "kernel", "exponents"),
            "thm2": ("n", "lambda", "kernel", "exponents"),
            "lemma22": ("n", "kernel", "exponents", "seed"),
            "lemma23": ("n", "alpha", "kernel", "exponents"),
            "sharpness": ("n", "alpha", "kernel", "exponents"),
        }[self.check]
        return [dict(zip(names, combo)) for combo in itertools.product(*(self.axis(k) for k in names))]


def _quad(spec: SweepSpec, **defaults) -> QuadratureSpec:
    return QuadratureSpec(**{**defaults, **spec.quad})


def _run_cell(spec: SweepSpec, cell: dict) -> list[InequalityReport]:
    opt = spec.options
    n = int(cell["n"])
    kern = AngularKernel.parse(cell["kernel"])
    base = dict(n=n, kernel=kern.label)
    check = spec.check
    try:
        if check == "thm1":
            e = _exponent_triple(cell["exponents"], "holder")
            params = {**base, "p": e.p, "q": e.q, "r": e.r, "alpha": cell["alpha"]}
            g = VelocityFunction.parse(opt.get("g", "gaussian:1"), n)
            h = VelocityFunction.parse(opt.get("h", "gaussian:1"), n)
            try:
                return [theorem1_check(g, h, e, NuMeasure(n, float(cell["alpha"])), kern,
                                       int(opt.get("sphere_order", 12)), _quad(spec, sphere_order=12, radial_order=16),
                                       tol=float(opt.get("tol", 1e-4)), method=opt.get("method", "direct"))]
            except DivergentConstant:
                return [InequalityReport.skipped("thm1", "divergent beta", params)]
        if check == "thm2":
            e = _exponent_triple(cell["exponents"], "young")
            lam = float(cell["lambda"])
            params = {**base, "p": e.p, "q": e.q, "r": e.r, "lam": lam}
            g = VelocityFunction.parse(opt.get("g", "gaussian:1"), n)
            h = VelocityFunction.parse(opt.get("h", "gaussian:1"), n)
            try:
                return [theorem2_check(g, h, e, CollisionKernel(lam, kern), int(opt.get("sphere_order", 10)),
                                       _quad(spec, sphere_order=10, radial_order=24),
                                       tol=float(opt.get("tol", 1e-3)))]
            except DivergentConstant:
                return [InequalityReport.skipped("thm2", "divergent beta", params)]
        if check == "lemma22":
            vals = [float(v) for v in cell["exponents"]]
            if len(vals) != 3:
                raise ValueError("lemma22 exponents must be [p, q, r]")
            from .spherical import random_test_triple

            seed = int(cell["seed"])
            f, g, h = random_test_triple(n, seed)
            rep = lemma22_check(f, g, h, *vals, kern, int(opt.get("sphere_order", 10)),
                                RotationSampler(int(opt.get("rotations", 4096)), seed),
                                _quad(spec, sphere_order=10, radial_order=16),
                                tol=float(opt.get("tol", 1e-6)))
            return [rep]
        alpha = float(cell["alpha"])
        e = _exponent_triple(cell["exponents"], "holder")
        params = {**base, "p": e.p, "q": e.q, "r": e.r, "alpha": alpha}
        xi, sm = XiMeasure(kern, n), SigmaMeasure(n, alpha)
        quad = _quad(spec)
        if check == "lemma23":
            g = parse_profile(opt.get("g", "indicator:0,1"))
            h = parse_profile(opt.get("h", "indicator:0,1"))
            try:
                return [lemma23_check(g, h, e, xi, sm, quad, tol=float(opt.get("tol", 1e-8)))]
            except DivergentConstant:
                return [InequalityReport.skipped("lemma23", "divergent beta", params)]
        # sharpness: one report per eps, checking the sandwich bounds
        try:
            study = sharpness_study(e, xi, sm, cell_eps(spec), quad)
        except DivergentConstant:
            return [InequalityReport.skipped("sharpness", "divergent beta", params)]
        out = []
        for row in study.rows:
            rep = InequalityReport.build(
                "sharpness", row.norm, row.beta_eps * 2.0 ** (row.eps / e.r), [], tolerance=1e-9,
                params={**params, "eps": row.eps},
                provenance={"quad_order": quad.order, "ratio_to_sharp": row.ratio,
                            "sandwich": row.sandwich_ok})
            if not row.sandwich_ok:
                rep.passed, rep.status = False, "fail"
            out.append(rep)
        return out
    except (QuadratureFailure, NonIntegrable) as exc:
        rep = InequalityReport.skipped(check, f"numerical failure: {exc}", base)
        rep.status = "error"
        return [rep]
    except ValueError as exc:
        return [InequalityReport.skipped(check, f"precondition violation: {exc}", base)]


def cell_eps(spec: SweepSpec):
    return [float(v) for v in spec.axis("eps")]


def run_sweep(spec: SweepSpec | list[SweepSpec], threads: int | None = None) -> list[InequalityReport]:
    """One report per cell (per eps for sharpness), in cell order.

    Cells may run on a thread pool; the output order and every number are
    independent of the thread count.
    """
    specs = [spec] if isinstance(spec, SweepSpec) else list(spec)
    jobs = [(s, c) for s in specs for c in s.cells()]
    if not jobs:
        return []
    threads = threads or int(os.environ.get("BG_THREADS", "1") or 1)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda job: _run_cell(*job), jobs))
    else:
        results = [_run_cell(*job) for job in jobs]
    return [r for rs in results for r in rs]


# ---------------------------------------------------------------------------
# output


def format_float(x) -> str:
    """Shortest decimal that round-trips (at most 17 significant digits)."""
    if x is None or x == "":
        return ""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(x)


def _pass_field(rep: InequalityReport) -> str:
    if rep.status in ("skipped", "error"):
        return rep.status
    return "true" if rep.passed else "false"


def _csv_row(rep: InequalityReport) -> list[str]:
    p, pv = rep.params, rep.provenance
    quad_order = pv.get("quad_order", pv.get("sphere_order", pv.get("radial_order", "")))
    lam = p.get("lam", p.get("lambda", ""))
    return [
        rep.name,
        str(p.get("n", "")),
        *(format_float(p.get(k, "")) for k in ("p", "q", "r", "alpha")),
        format_float(lam),
        str(p.get("kernel", "")),
        *(format_float(v) for v in (rep.lhs, rep.constant, rep.rhs, rep.ratio, rep.tolerance,
                                    rep.mc_margin)),
        _pass_field(rep),
        str(pv.get("seed", "")),
        str(quad_order),
    ]


def _jsonable(v):
    if isinstance(v, float) and not math.isfinite(v):
        return format_float(v)
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if hasattr(v, "item"):
        return _jsonable(v.item())
    return v


def report_to_dict(rep: InequalityReport) -> dict:
    return _jsonable({
        "name": rep.name, "lhs": rep.lhs, "constant": rep.constant,
        "norms": [[k, v] for k, v in rep.norms], "rhs": rep.rhs, "ratio": rep.ratio,
        "tolerance": rep.tolerance, "mc_margin": rep.mc_margin, "pass": rep.passed,
        "status": rep.status, "reason": rep.reason, "params": rep.params,
        "provenance": rep.provenance,
    })


def _num(v):
    return float(v) if isinstance(v, str) else v


def report_from_dict(d: dict) -> InequalityReport:
    return InequalityReport(
        d["name"], _num(d["lhs"]), _num(d["constant"]), [(k, _num(v)) for k, v in d["norms"]],
        _num(d["rhs"]), _num(d["ratio"]), _num(d["tolerance"]), _num(d["mc_margin"]), d["pass"],
        d["status"], d["reason"], d["params"], d["provenance"])


def render(reports, fmt: str = "csv") -> str:
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for rep in reports:
            w.writerow(_csv_row(rep))
        return buf.getvalue()
    if fmt == "json":
        return json.dumps([report_to_dict(r) for r in reports], indent=2, allow_nan=False) + "\n"
    raise ValueError(f"unknown format {fmt!r}")


def emit(reports, fmt: str = "csv", destination=None) -> str:
    """Write reports as CSV or JSON to ``destination`` (a path, or stdout if None)."""
    text = render(reports, fmt)
    if destination is None or str(destination) == "-":
        import sys

        sys.stdout.write(text)
    else:
        try:
            Path(destination).write_text(text)
        except OSError as exc:
            raise OSError(f"cannot write {destination}: {exc.strerror or exc}") from exc
    return text
