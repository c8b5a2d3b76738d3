"""The one-dimensional bilinear operator and its sharp constants.

A radial function on R^n is written ``f(k) = f~(|k|**2)``; profiles here are
the ``f~``.  On the half line we use

    dsigma(x) = x**((n + alpha - 2) / 2) dx

and the operator

    B(g, h)(x) = int_0^1 g(x z) h(x (1 - z)) dxi(z).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import DivergentConstant, NonIntegrable
from .kernel import XiMeasure, beta_b
from .quadrature import QuadratureSpec, integrate
from .report import InequalityReport

__all__ = [
    "RadialProfile",
    "SigmaMeasure",
    "ExponentTriple",
    "bilinear_B",
    "B_profile",
    "lp_norm_radial",
    "extremizer_pair",
    "lemma23_check",
    "sharpness_study",
    "SharpnessRow",
    "DEFAULT_EPS",
]

DEFAULT_EPS = (1e-1, 3e-2, 1e-2, 3e-3, 1e-3)


@dataclass(frozen=True, eq=False)
class RadialProfile:
    """A function on [0, inf) plus the hints its quadratures rely on.

    ``decay`` is ``"compact"`` (zero beyond ``support_radius``), ``"gaussian"``
    (like ``exp(-x / decay_rate)``) or ``"power"`` (like ``x**-decay_rate``).
    ``zero_exponent`` ``e`` declares ``f(x) ~ x**e`` as ``x -> 0``;
    ``breakpoints`` lists points where ``f`` is not smooth.  ``func`` itself
    need not vanish outside the support; calling the profile applies the
    support mask (excluding the radius itself when ``closed`` is false).
    """

    func: Callable[[np.ndarray], np.ndarray]
    support_radius: float = math.inf
    decay: str = "compact"
    decay_rate: float = 0.0
    breakpoints: tuple[float, ...] = ()
    zero_exponent: float = 0.0
    label: str = ""
    closed: bool = True

    def __post_init__(self):
        if self.decay not in ("compact", "gaussian", "power"):
            raise ValueError(f"unknown decay hint {self.decay!r}")
        if self.decay == "compact" and not math.isfinite(self.support_radius):
            raise ValueError("compact profiles need a finite support radius")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.asarray(self.func(x), dtype=float)
        if math.isfinite(self.support_radius):
            outside = x > self.support_radius if self.closed else x >= self.support_radius
            out = np.where(outside, 0.0, out)
        return out if out.ndim else float(out)

    # -- constructors -------------------------------------------------------
    @classmethod
    def indicator(cls, a: float, b: float) -> "RadialProfile":
        a, b = float(a), float(b)
        return cls(lambda x: ((x >= a) & (x <= b)).astype(float), support_radius=b,
                   breakpoints=tuple(v for v in (a, b) if v > 0),
                   label=f"indicator:{a:g},{b:g}")

    @classmethod
    def gaussian(cls, scale: float = 1.0) -> "RadialProfile":
        """``exp(-x / scale)``: the profile of ``exp(-|k|**2 / scale)``."""
        scale = float(scale)
        return cls(lambda x: np.exp(-x / scale), decay="gaussian", decay_rate=scale,
                   label=f"gauss:{scale:g}")

    @classmethod
    def power(cls, c: float, e: float, cutoff: float) -> "RadialProfile":
        """``c x**e`` on (0, cutoff), zero beyond."""
        c, e, cutoff = float(c), float(e), float(cutoff)

        def f(x):
            with np.errstate(divide="ignore"):
                return np.where(x > 0, c * np.abs(x) ** e, 0.0)

        return cls(f, support_radius=cutoff, breakpoints=(cutoff,), zero_exponent=e,
                   label=f"power:{c:g},{e:g},{cutoff:g}", closed=False)

    @classmethod
    def zero(cls) -> "RadialProfile":
        return cls(lambda x: np.zeros_like(x), support_radius=1.0, label="zero")

    @classmethod
    def constant(cls, c: float = 1.0) -> "RadialProfile":
        return cls(lambda x: np.full_like(x, c), decay="gaussian", decay_rate=math.inf,
                   label=f"constant:{c:g}")

    # -- derived ------------------------------------------------------------
    def rescaled(self, c: float) -> "RadialProfile":
        """The profile ``x -> f(c x)``."""
        f = self.func
        return replace(self, func=lambda x: f(c * x),
                       support_radius=self.support_radius / c,
                       decay_rate=self.decay_rate / c if self.decay == "gaussian" else self.decay_rate,
                       breakpoints=tuple(b / c for b in self.breakpoints),
                       label=f"{self.label}@{c:g}")

    def is_zero(self) -> bool:
        return self.label == "zero"

    def cutoff(self, p: float = 1.0, weight_exp: float = 0.0) -> float:
        """A point beyond which ``|f|**p x**weight_exp`` is negligible (or zero)."""
        if self.decay == "compact":
            return self.support_radius
        if self.decay == "power":
            return math.inf
        base = max(self.breakpoints, default=0.0)
        if not math.isfinite(self.decay_rate):
            return math.inf
        x = max(1.0, 40.0 * self.decay_rate / p)
        for _ in range(4):
            x = self.decay_rate * (40.0 + max(weight_exp, 0.0) * math.log(max(x, 1.0))) / p
        return base + x


@dataclass(frozen=True)
class SigmaMeasure:
    n: int
    alpha: float = 0.0

    @property
    def exponent(self) -> float:
        return (self.n + self.alpha - 2) / 2


@dataclass(frozen=True)
class ExponentTriple:
    """Exponents (p, q, r) tied by a Hölder or Young relation.

    Use :meth:`holder` / :meth:`young` to derive ``r`` from ``p`` and ``q``.
    """

    p: float
    q: float
    r: float
    relation: str = "holder"

    def __post_init__(self):
        for v in (self.p, self.q, self.r):
            if not v >= 1:
                raise ValueError(f"exponents must lie in [1, inf], got {v}")
        ip, iq, ir = (1 / v for v in (self.p, self.q, self.r))
        if self.relation == "holder":
            target = ip + iq
        elif self.relation == "young":
            target = ip + iq - 1
        else:
            raise ValueError(f"unknown relation {self.relation!r}")
        if abs(target - ir) > 1e-12:
            raise ValueError(f"({self.p}, {self.q}, {self.r}) violates the {self.relation} relation")

    @classmethod
    def holder(cls, p: float, q: float) -> "ExponentTriple":
        s = 1 / p + 1 / q
        if s > 1 + 1e-15:
            raise ValueError(f"1/p + 1/q = {s} > 1 gives r < 1")
        return cls(p, q, math.inf if s == 0 else 1 / min(s, 1.0), "holder")

    @classmethod
    def young(cls, p: float, q: float) -> "ExponentTriple":
        s = 1 / p + 1 / q - 1
        if s < -1e-15:
            raise ValueError(f"1/p + 1/q = {s + 1} < 1 gives r < 0")
        return cls(p, q, math.inf if s <= 0 else 1 / s, "young")

    @property
    def r_dual(self) -> float:
        """Conjugate exponent r' with 1/r + 1/r' = 1."""
        return math.inf if self.r == 1 else (1.0 if math.isinf(self.r) else self.r / (self.r - 1))


def _inv(p: float) -> float:
    return 0.0 if math.isinf(p) else 1.0 / p


# ---------------------------------------------------------------------------
# the bilinear operator


def bilinear_B(g: RadialProfile, h: RadialProfile, x: float, m: XiMeasure,
               quad: QuadratureSpec = QuadratureSpec()) -> float:
    """B(g, h)(x) = int_0^1 g(xz) h(x(1-z)) dxi(z) for a scalar x >= 0."""
    x = float(x)
    if x < 0:
        raise ValueError("B(g, h) is defined on x >= 0")
    w = m.weight_exponent
    a_plus, a_minus = m.kernel.endpoint_exponents
    if x == 0:
        if g.zero_exponent < 0 or h.zero_exponent < 0:
            return math.inf
        b0 = beta_b(0.0, 0.0, m, quad)
        return float(g(0.0)) * float(h(0.0)) * b0.value
    lo, hi = 0.0, 1.0
    if math.isfinite(h.support_radius):
        lo = max(lo, 1.0 - h.support_radius / x)
    if math.isfinite(g.support_radius):
        hi = min(hi, g.support_radius / x)
    if not hi > lo:
        return 0.0
    breaks = {t / x for t in g.breakpoints} | {1.0 - t / x for t in h.breakpoints}
    breaks |= {(s + 1) / 2 for s in m.kernel.breakpoints}
    kern = m.kernel
    # [lo, hi] already encodes the supports; the raw functions avoid spurious
    # zeros when x * z rounds onto a support radius
    gf, hf = g.func, h.func

    def F(z, zc):
        # zc = 1 - z, passed separately so that both stay accurate near 0
        with np.errstate(divide="ignore", invalid="ignore"):
            dens = kern.from_halves(z, zc) * (z * zc) ** w
            return gf(x * z) * hf(x * zc) * dens

    total = 0.0
    if lo < 0.5:
        left = g.zero_exponent + w - a_plus if lo == 0.0 else 0.0
        total += integrate(lambda z: F(z, 1.0 - z), lo, min(hi, 0.5), quad,
                           breaks=[t for t in breaks if t < 0.5], left_exp=left)
    if hi > 0.5:
        right = h.zero_exponent + w - a_minus if hi == 1.0 else 0.0
        total += integrate(lambda u: F(1.0 - u, u), 1.0 - hi, 1.0 - max(lo, 0.5), quad,
                           breaks=[1.0 - t for t in breaks if t > 0.5], left_exp=right)
    return total


def B_profile(g: RadialProfile, h: RadialProfile, m: XiMeasure,
              quad: QuadratureSpec = QuadratureSpec()) -> RadialProfile:
    """``B(g, h)`` as a profile, with hints inherited from ``g`` and ``h``."""

    def f(xs):
        xs = np.asarray(xs, dtype=float)
        out = np.empty(xs.shape)
        for i, xv in np.ndenumerate(xs):
            out[i] = bilinear_B(g, h, xv, m, quad)
        return out

    bg = set(g.breakpoints) | {g.support_radius}
    bh = set(h.breakpoints) | {h.support_radius}
    breaks = {a for a in bg | bh if math.isfinite(a)}
    breaks |= {a + b for a in bg for b in bh if math.isfinite(a + b)}
    kw = dict(breakpoints=tuple(sorted(breaks)),
              zero_exponent=g.zero_exponent + h.zero_exponent,
              label=f"B({g.label},{h.label})")
    if g.decay == "compact" and h.decay == "compact":
        return RadialProfile(f, support_radius=g.support_radius + h.support_radius, **kw)
    if "power" in (g.decay, h.decay):
        rates = [p.decay_rate for p in (g, h) if p.decay == "power"]
        return RadialProfile(f, decay="power", decay_rate=min(rates), **kw)
    scale = max(p.decay_rate if p.decay == "gaussian" else 0.0 for p in (g, h))
    shift = sum(p.support_radius for p in (g, h) if p.decay == "compact")
    return RadialProfile(f, decay="gaussian", decay_rate=scale,
                         **{**kw, "breakpoints": kw["breakpoints"] + ((shift,) if shift else ())})


# ---------------------------------------------------------------------------
# norms


def _sup(f: RadialProfile, hi: float) -> float:
    if not math.isfinite(hi):
        hi = 1e6
    xs = np.unique(np.concatenate([
        np.linspace(0.0, hi, 2001),
        hi * np.geomspace(1e-12, 1.0, 400),
        np.asarray([b for b in f.breakpoints if b <= hi]),
    ]))
    vals = np.abs(np.asarray(f(xs), dtype=float))
    if not np.all(np.isfinite(vals)):
        return math.inf
    i = int(np.argmax(vals))
    best = vals[i]
    a, b = xs[max(i - 1, 0)], xs[min(i + 1, len(xs) - 1)]
    if b > a:
        res = minimize_scalar(lambda t: -abs(float(f(t))), bounds=(a, b), method="bounded",
                              options={"xatol": 1e-12 * max(1.0, b)})
        best = max(best, -res.fun)
    return float(best)


def lp_power_integral(f: RadialProfile, p: float, m: SigmaMeasure,
                      quad: QuadratureSpec = QuadratureSpec(), lo: float = 0.0,
                      hi: float | None = None) -> float:
    """int_lo^hi |f|**p dsigma; ``hi=None`` means the whole half line."""
    c = m.exponent
    if hi is None:
        hi = f.cutoff(p, c)
    left = p * f.zero_exponent + c if lo == 0.0 else 0.0
    if lo == 0.0 and left <= -1:
        raise NonIntegrable(f"|f|^p dsigma behaves like x^{left:g} at 0")

    def F(x):
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.abs(f(x)) ** p * x ** c

    finite_hi = hi if math.isfinite(hi) else max([1.0, *[b for b in f.breakpoints]])
    breaks = [b for b in f.breakpoints if lo < b < finite_hi]
    total = integrate(F, lo, finite_hi, quad, breaks=breaks, left_exp=left)
    if not math.isfinite(hi):
        # x = X / u maps [X, inf) onto (0, 1]
        X = finite_hi
        tail = p * f.decay_rate - c - 2.0
        if f.decay != "power" or tail <= -1:
            raise NonIntegrable(f"declared decay of {f.label or 'profile'} is not integrable")

        def G(u):
            with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
                return F(X / u) * X / u**2

        total += integrate(G, 0.0, 1.0, quad, left_exp=tail)
    return total


def lp_norm_radial(f: RadialProfile, p: float, m: SigmaMeasure,
                   quad: QuadratureSpec = QuadratureSpec()) -> float:
    """(int_0^inf |f|**p dsigma)**(1/p); ``p = inf`` gives a sampled sup."""
    if f.is_zero():
        return 0.0
    if math.isinf(p):
        if f.decay == "power":
            raise NonIntegrable("sup norm needs compact or gaussian decay hints")
        return _sup(f, f.cutoff())
    return lp_power_integral(f, p, m, quad) ** (1.0 / p)


# ---------------------------------------------------------------------------
# extremizers and the sharp inequality


def extremizer_pair(eps: float, p: float, q: float, n: int,
                    alpha: float = 0.0) -> tuple[RadialProfile, RadialProfile]:
    """Unit-norm power profiles whose B-norm ratio tends to the sharp constant."""
    if not eps > 0:
        raise ValueError("eps must be positive")
    if not n + alpha > 0:
        raise ValueError("extremizers need n + alpha > 0")

    def one(s: float) -> RadialProfile:
        if math.isinf(s):
            raise ValueError("extremizers need finite exponents")
        prof = RadialProfile.power(eps ** (1 / s), -(n + alpha - 2 * eps) / (2 * s), 1.0)
        return replace(prof, label=f"extremizer:{eps:g},{s:g}")

    return one(p), one(q)


def _sharp_args(p: float, q: float, n: int, alpha: float, eps: float = 0.0):
    d = n + alpha - 2 * eps
    return -d * _inv(p) / 2, -d * _inv(q) / 2


def lemma23_check(g: RadialProfile, h: RadialProfile, e: ExponentTriple, m: XiMeasure,
                  sm: SigmaMeasure, quad: QuadratureSpec = QuadratureSpec(),
                  tol: float = 1e-8) -> InequalityReport:
    """Certify ||B(g,h)||_r <= beta_b(-(n+a)/2p, -(n+a)/2q) ||g||_p ||h||_q."""
    if e.relation != "holder":
        raise ValueError("the B-inequality needs 1/p + 1/q = 1/r")
    x, y = _sharp_args(e.p, e.q, m.n, sm.alpha)
    C = beta_b(x, y, m, quad)
    params = dict(n=m.n, p=e.p, q=e.q, r=e.r, alpha=sm.alpha, kernel=m.kernel.label)
    if C.divergent:
        raise DivergentConstant(f"beta_b({x:g}, {y:g}) diverges for {m.kernel.label}, n={m.n}")
    ng = lp_norm_radial(g, e.p, sm, quad)
    nh = lp_norm_radial(h, e.q, sm, quad)
    if ng == 0 or nh == 0:
        lhs = 0.0
    else:
        lhs = lp_norm_radial(B_profile(g, h, m, quad), e.r, sm, quad)
    return InequalityReport.build(
        "lemma23", lhs, C.value, [("g_p", ng), ("h_q", nh)], tolerance=tol,
        params=params, provenance=dict(quad_order=quad.order, tol=quad.tol))


@dataclass(frozen=True)
class SharpnessRow:
    eps: float
    norm: float
    beta_eps: float
    ratio: float
    part_I: float
    part_II: float
    lower_ok: bool
    upper_ok: bool

    @property
    def sandwich_ok(self) -> bool:
        return self.lower_ok and self.upper_ok


@dataclass
class SharpnessStudy:
    constant: float
    rows: list[SharpnessRow] = field(default_factory=list)

    def __iter__(self):
        return iter(self.rows)


def sharpness_study(e: ExponentTriple, m: XiMeasure, sm: SigmaMeasure, eps_list=DEFAULT_EPS,
                    quad: QuadratureSpec = QuadratureSpec(), tol: float = 1e-9) -> SharpnessStudy:
    """Norms of B on the extremizer pairs against the sharp constant.

    For each eps the r-th power of the norm splits into the integral over
    (0, 1] (part I, equal to beta_eps**r) and over (1, 2] (part II, between
    0 and beta_eps**r (2**eps - 1)).
    """
    if math.isinf(e.p) or math.isinf(e.q):
        raise ValueError("extremizer sequences need finite p and q")
    x, y = _sharp_args(e.p, e.q, m.n, sm.alpha)
    C = beta_b(x, y, m, quad)
    if C.divergent:
        raise DivergentConstant(f"beta_b({x:g}, {y:g}) diverges for {m.kernel.label}, n={m.n}")
    out = SharpnessStudy(C.value)
    r = e.r
    for eps in eps_list:
        g, h = extremizer_pair(eps, e.p, e.q, m.n, sm.alpha)
        be = beta_b(*_sharp_args(e.p, e.q, m.n, sm.alpha, eps), m, quad).value
        prof = B_profile(g, h, m, quad)
        part_I = lp_power_integral(prof, r, sm, quad, 0.0, 1.0)
        part_II = lp_power_integral(prof, r, sm, quad, 1.0, 2.0)
        norm = (part_I + part_II) ** (1 / r)
        lower = be <= norm * (1 + tol)
        upper = norm <= be * 2 ** (eps / r) * (1 + tol)
        out.rows.append(SharpnessRow(eps, norm, be, norm / C.value, part_I, part_II, lower, upper))
    return out
