"""The sphere operator P on R^n, radial symmetrization and the related checks.

    P(g, h)(k) = int_{S^{n-1}} g(k+) h(k-) b(k^ . w) dw,   k+- = (k +- |k| w) / 2.

Sphere integrals use product rules: Gauss-Jacobi in the cosine of the angle
to a chosen pole times a rule on the lower-dimensional sphere.  For P the
pole is k^, so the angular kernel (including integrable endpoint
singularities) is absorbed into the polar weights.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import DivergentConstant, DomainError, NonIntegrable, QuadratureFailure
from .kernel import AngularKernel, XiMeasure, _xi_rule, beta_b, sphere_area
from .quadrature import QuadratureSpec, gauss_jacobi, integrate, pairwise_sum
from .radial import B_profile, ExponentTriple, RadialProfile, SigmaMeasure, bilinear_B, lp_norm_radial
from .report import InequalityReport

__all__ = [
    "VelocityFunction",
    "NuMeasure",
    "SphereRule",
    "RotationSampler",
    "sphere_rule",
    "post_collision_pair",
    "operator_P",
    "P_function",
    "radial_reduce_P",
    "symmetrize",
    "symmetrization_error",
    "weighted_lp_norm",
    "lemma21_pairing",
    "lemma22_check",
    "theorem1_check",
    "theorem1_constant",
    "carleman_integral",
    "random_test_triple",
]

_CHUNK = 1 << 21


# ---------------------------------------------------------------------------
# functions on R^n


@dataclass(frozen=True, eq=False)
class VelocityFunction:
    """A scalar function on R^n with the hints needed to integrate it.

    ``support_radius`` bounds the support about the origin (``inf`` if not
    compact); ``cutoff_radius`` is where a non-compact function becomes
    negligible.  ``profile`` links the radial profile ``f(k) = f~(|k|**2)``
    when the function is radial.
    """

    func: Callable[[np.ndarray], np.ndarray]
    n: int
    support_radius: float = math.inf
    cutoff_radius: float = math.inf
    profile: RadialProfile | None = None
    label: str = ""

    def __call__(self, k):
        k = np.asarray(k, dtype=float)
        return np.asarray(self.func(k), dtype=float)

    @property
    def radial(self) -> bool:
        return self.profile is not None

    @property
    def extent(self) -> float:
        return min(self.support_radius, self.cutoff_radius)

    @property
    def compact(self) -> bool:
        return math.isfinite(self.support_radius)

    def is_zero(self) -> bool:
        return self.label == "zero"

    def check_radial(self, samples: int = 64, seed: int = 0, rtol: float = 1e-12) -> bool:
        """Compare ``f(k)`` with ``profile(|k|**2)`` at random points."""
        if self.profile is None:
            return False
        rng = np.random.default_rng(seed)
        k = rng.normal(size=(samples, self.n)) * self.extent / (2 * math.sqrt(self.n))
        a = self(k)
        b = self.profile(np.sum(k * k, axis=-1))
        return bool(np.allclose(a, b, rtol=rtol, atol=rtol * max(1.0, np.max(np.abs(a)))))

    # -- constructors -------------------------------------------------------
    @classmethod
    def from_profile(cls, n: int, profile: RadialProfile, label: str = "") -> "VelocityFunction":
        sup = math.sqrt(profile.support_radius) if profile.decay == "compact" else math.inf
        cut = math.sqrt(profile.cutoff()) if profile.decay != "power" else math.inf
        return cls(lambda k: profile(np.sum(k * k, axis=-1)), n, sup, cut, profile,
                   label or profile.label)

    @classmethod
    def gaussian(cls, n: int, a: float = 1.0, amplitude: float = 1.0) -> "VelocityFunction":
        """``amplitude * exp(-a |v|**2)``."""
        a, amplitude = float(a), float(amplitude)
        prof = RadialProfile(lambda s: amplitude * np.exp(-a * s), decay="gaussian",
                             decay_rate=1.0 / a, label=f"gauss:{1 / a:g}")
        return replace(cls.from_profile(n, prof), cutoff_radius=math.sqrt(42.0 / a),
                       label=f"gaussian:{a:g}" if amplitude == 1 else f"gaussian:{a:g}*{amplitude:g}")

    @classmethod
    def bump(cls, n: int, R: float = 1.0) -> "VelocityFunction":
        """Smooth bump ``exp(1 - 1 / (1 - |v|**2 / R**2))`` supported in |v| < R."""
        R = float(R)

        def prof(s):
            u = np.asarray(s, dtype=float) / R**2
            with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
                return np.where(u < 1, np.exp(1.0 - 1.0 / (1.0 - np.minimum(u, 1.0))), 0.0)

        profile = RadialProfile(prof, support_radius=R**2, label=f"bump:{R:g}")
        return replace(cls.from_profile(n, profile), label=f"bump:{R:g}")

    @classmethod
    def zero(cls, n: int) -> "VelocityFunction":
        return cls(lambda k: np.zeros(k.shape[:-1]), n, 1.0, 1.0, RadialProfile.zero(), "zero")

    @classmethod
    def constant(cls, n: int, c: float = 1.0) -> "VelocityFunction":
        return cls(lambda k: np.full(k.shape[:-1], float(c)), n, math.inf, math.inf,
                   RadialProfile.constant(c), f"constant:{c:g}")

    def shifted(self, c) -> "VelocityFunction":
        """``v -> f(v - c)``."""
        c = np.asarray(c, dtype=float)
        if c.shape != (self.n,):
            raise DomainError(f"shift must have {self.n} components")
        f, r = self.func, float(np.linalg.norm(c))
        if r == 0:
            return self
        return VelocityFunction(lambda k: f(k - c), self.n, self.support_radius + r,
                                self.cutoff_radius + r, None,
                                f"shifted:{self.label}," + ",".join(f"{v:g}" for v in c))

    def linearmod(self) -> "VelocityFunction":
        """``v -> v_1 f(v)``, a non-radial, sign-changing companion."""
        f = self.func
        return VelocityFunction(lambda k: k[..., 0] * f(k), self.n, self.support_radius,
                                self.cutoff_radius, None, f"linearmod:{self.label}")

    def scaled(self, a: float) -> "VelocityFunction":
        """``v -> a f(v)``."""
        f = self.func
        prof = None
        if self.profile is not None:
            pf = self.profile.func
            prof = replace(self.profile, func=lambda s: a * pf(s))
        return replace(self, func=lambda k: a * f(k), profile=prof, label=f"{a:g}*{self.label}")

    def rotated(self, R: np.ndarray) -> "VelocityFunction":
        """``v -> f(R v)``."""
        f = self.func
        R = np.asarray(R, dtype=float)
        return replace(self, func=lambda k: f(k @ R.T), label=f"rot:{self.label}")

    @classmethod
    def parse(cls, text: str, n: int) -> "VelocityFunction":
        """``gaussian:<a>``, ``bump:<R>``, ``shifted:<inner>,<c1>,..,<cn>``, ``linearmod:<inner>``, ``zero``."""
        text = text.strip()
        kind, _, arg = text.partition(":")
        try:
            if kind == "gaussian":
                return cls.gaussian(n, float(arg) if arg else 1.0)
            if kind == "bump":
                return cls.bump(n, float(arg) if arg else 1.0)
            if kind == "zero":
                return cls.zero(n)
            if kind == "linearmod":
                return cls.parse(arg, n).linearmod()
            if kind == "shifted":
                parts = arg.split(",")
                if len(parts) < n + 1:
                    raise ValueError(f"shifted needs an inner function and {n} offsets")
                inner = ",".join(parts[: len(parts) - n])
                return cls.parse(inner, n).shifted([float(v) for v in parts[-n:]])
        except ValueError as exc:
            raise ValueError(f"bad test function {text!r}: {exc}") from exc
        raise ValueError(f"bad test function {text!r}: unknown kind {kind!r}")


@dataclass(frozen=True)
class NuMeasure:
    """The measure |k|**alpha dk on R^n."""

    n: int
    alpha: float = 0.0


# ---------------------------------------------------------------------------
# sphere rules


@dataclass(frozen=True, eq=False)
class SphereRule:
    """Nodes and positive weights on S^{n-1}.

    Built as Gauss-Jacobi in the first coordinate times a rule on S^{n-2};
    exact for polynomials of degree < 2 * order.
    """

    n: int
    order: int
    nodes: np.ndarray
    weights: np.ndarray

    @property
    def size(self) -> int:
        return len(self.weights)


@lru_cache(maxsize=None)
def sphere_rule(n: int, order: int = 16) -> SphereRule:
    """Product rule on S^{n-1} (n >= 1); S^0 is the pair {+1, -1}."""
    if n < 1:
        raise DomainError("sphere_rule needs n >= 1")
    if n == 1:
        nodes, weights = np.array([[1.0], [-1.0]]), np.array([1.0, 1.0])
    elif n == 2:
        M = 2 * order
        th = 2 * np.pi * (np.arange(M) + 0.5) / M
        nodes = np.stack([np.cos(th), np.sin(th)], axis=-1)
        weights = np.full(M, 2 * np.pi / M)
    else:
        e = (n - 3) / 2
        t, wt = gauss_jacobi(order, e, e)
        sub = sphere_rule(n - 1, order)
        st = np.sqrt(1 - t * t)
        nodes = np.concatenate(
            [t[:, None, None].repeat(sub.size, 1), st[:, None, None] * sub.nodes[None]], axis=-1
        ).reshape(-1, n)
        weights = (wt[:, None] * sub.weights[None]).reshape(-1)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return SphereRule(n, order, nodes, weights)


@lru_cache(maxsize=None)
def _polar_rule(kern: AngularKernel, n: int, order: int):
    """(t, w) integrating F(t) b(t) (1 - t**2)**((n-3)/2) dt on [-1, 1]."""
    z, w = _xi_rule(XiMeasure(kern, n), 0.0, 0.0, order)
    # t = 2z - 1: (1 - t^2)^e = 4^e (z(1-z))^e and dt = 2 dz
    return 2 * z - 1, w * 2.0 ** (n - 2)


def _complement_basis(u: np.ndarray) -> np.ndarray:
    """Orthonormal bases of u-perp for unit vectors u of shape (..., n): (..., n, n-1)."""
    n = u.shape[-1]
    e1 = np.zeros(n)
    e1[0] = 1.0
    sign = np.where(u[..., :1] > 0, 1.0, -1.0)
    v = e1 + sign * u  # Householder vector mapping e1 to -sign*u, away from cancellation
    vv = np.sum(v * v, axis=-1, keepdims=True)
    H = np.eye(n) - 2.0 * v[..., :, None] * v[..., None, :] / vv[..., None]
    return H[..., :, 1:]


def aligned_rule(kern: AngularKernel, n: int, order: int, pole: np.ndarray):
    """Nodes (..., M, n) and weights (M,) on S^{n-1} for int F(w) b(pole . w) dw."""
    t, wt = _polar_rule(kern, n, order)
    sub = sphere_rule(n - 1, order)
    E = _complement_basis(pole)  # (..., n, n-1)
    lateral = np.einsum("...ij,mj->...mi", E, sub.nodes)  # (..., S, n)
    st = np.sqrt(np.clip(1 - t * t, 0.0, None))
    nodes = (t[:, None, None] * pole[..., None, None, :]
             + st[:, None, None] * lateral[..., None, :, :])
    nodes = nodes.reshape(pole.shape[:-1] + (-1, n))
    weights = (wt[:, None] * sub.weights[None]).reshape(-1)
    return nodes, weights


# ---------------------------------------------------------------------------
# rotations


@dataclass(frozen=True)
class RotationSampler:
    """Haar-distributed rotations of R^n from a seeded generator."""

    count: int = 4096
    seed: int = 0
    method: str = "haar_monte_carlo"

    def __post_init__(self):
        if self.count <= 0:
            raise ValueError("count must be positive")
        if self.method != "haar_monte_carlo":
            raise ValueError(f"unknown rotation sampling method {self.method!r}")

    def matrices(self, n: int) -> np.ndarray:
        return _haar_rotations(n, self.count, self.seed)


@lru_cache(maxsize=32)
def _haar_rotations(n: int, count: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((count, n, n))
    Q, R = np.linalg.qr(A)
    # sign fix makes Q Haar on O(n); flipping a column on det < 0 maps onto SO(n)
    Q = Q * np.sign(np.diagonal(R, axis1=-2, axis2=-1))[:, None, :]
    neg = np.linalg.det(Q) < 0
    Q[neg, :, 0] *= -1
    Q.setflags(write=False)
    return Q


# ---------------------------------------------------------------------------
# the operator P


def post_collision_pair(k, w) -> tuple[np.ndarray, np.ndarray]:
    """k+ = (k + |k| w) / 2 and k- = (k - |k| w) / 2."""
    k = np.asarray(k, dtype=float)
    w = np.asarray(w, dtype=float)
    nk = np.linalg.norm(k, axis=-1, keepdims=True)
    if np.any(nk == 0):
        raise DomainError("k+ and k- need k != 0")
    if not np.allclose(np.linalg.norm(w, axis=-1), 1.0, atol=1e-12):
        raise DomainError("w must be a unit vector")
    return 0.5 * (k + nk * w), 0.5 * (k - nk * w)


def operator_P(g: VelocityFunction, h: VelocityFunction, k, kern: AngularKernel,
               rule: SphereRule | int = 16) -> np.ndarray | float:
    """P(g, h)(k) for one point or an array of points of shape (..., n).

    At k = 0 the limit along e_1 is used, i.e. g(0) h(0) times the cut-off
    integral, which is the value for continuous inputs.
    """
    order = rule.order if isinstance(rule, SphereRule) else int(rule)
    k = np.asarray(k, dtype=float)
    n = k.shape[-1]
    flat = k.reshape(-1, n)
    out = np.empty(len(flat))
    nk = np.linalg.norm(flat, axis=-1)
    pole = np.where(nk[:, None] > 0, flat / np.where(nk > 0, nk, 1.0)[:, None], 0.0)
    pole[nk == 0, 0] = 1.0
    M = len(_polar_rule(kern, n, order)[0]) * sphere_rule(n - 1, order).size
    step = max(1, _CHUNK // (M * n))
    for s in range(0, len(flat), step):
        sl = slice(s, s + step)
        nodes, w = aligned_rule(kern, n, order, pole[sl])
        half = 0.5 * flat[sl][:, None, :]
        rad = 0.5 * nk[sl][:, None, None] * nodes
        vals = g(half + rad) * h(half - rad)
        out[sl] = pairwise_sum(vals * w)
    out = out.reshape(k.shape[:-1])
    return out if out.ndim else float(out)


def P_function(g: VelocityFunction, h: VelocityFunction, kern: AngularKernel,
               rule: SphereRule | int = 16) -> VelocityFunction:
    """P(g, h) wrapped as a VelocityFunction (support |k|^2 <= Rg^2 + Rh^2)."""
    sup = math.hypot(g.support_radius, h.support_radius)
    cut = math.hypot(g.extent, h.extent)
    return VelocityFunction(lambda k: operator_P(g, h, k, kern, rule), g.n, sup, cut, None,
                            f"P({g.label},{h.label})")


def radial_reduce_P(g: RadialProfile, h: RadialProfile, s: float, m: XiMeasure,
                    quad: QuadratureSpec = QuadratureSpec()) -> float:
    """Profile of P(g, h) at s = |k|**2 for radial inputs: 2^(n-2)|S^(n-2)| B(g, h)(s)."""
    return 2.0 ** (m.n - 2) * sphere_area(m.n - 2) * bilinear_B(g, h, s, m, quad)


# ---------------------------------------------------------------------------
# integration over R^n


def _radial_rule(R: float, n_exp: float, order: int, panels: int = 4):
    """Rule on [0, R] for r**n_exp F(r): Jacobi on the first panel, Legendre after."""
    from .quadrature import interval_rule

    edges = np.linspace(0.0, R, panels + 1)[1:-1]
    return interval_rule(0.0, R, order, breaks=edges, left_exp=n_exp, grade=False)


def _ball_integral(F, n: int, R: float, weight_exp: float, quad: QuadratureSpec,
                   rule: SphereRule | None = None) -> float:
    """int_{|k|<R} F(k) |k|**weight_exp dk by radial Jacobi x sphere rule.

    The radial order starts at ``quad.radial_order`` and doubles until two
    successive values agree to ``quad.cubature_tol`` (absolute or relative);
    the sphere rule is fixed.
    """
    rule = rule or sphere_rule(n, quad.sphere_order)
    e = n - 1 + weight_exp
    if e <= -1:
        raise NonIntegrable(f"|k|^{weight_exp} is not integrable at the origin in R^{n}")

    def at(m):
        r, w = _radial_rule(R, e, m)
        vals = F(r[:, None, None] * rule.nodes[None])  # (Nr, S)
        inner = pairwise_sum(vals * rule.weights, axis=-1)
        return float(pairwise_sum(w * r ** e * inner))

    m = quad.radial_order
    prev, cur = at(m // 2), at(m)
    cap = max(quad.max_order, 4 * quad.radial_order)
    while abs(cur - prev) > quad.cubature_tol * max(1.0, abs(cur)):
        if 2 * m > cap:
            raise QuadratureFailure(
                f"radial quadrature not converged: difference {abs(cur - prev):.3e} at order {m}")
        m *= 2
        prev, cur = cur, at(m)
    return cur


def weighted_lp_norm(f: VelocityFunction, p: float, m: NuMeasure,
                     quad: QuadratureSpec = QuadratureSpec()) -> float:
    """(int |f|**p |k|**alpha dk)**(1/p) by sphere x radial product quadrature."""
    if f.is_zero():
        return 0.0
    R = f.extent
    if not math.isfinite(R):
        raise NonIntegrable(f"{f.label or 'function'} has no finite support or cutoff")
    if math.isinf(p):
        rule = sphere_rule(f.n, quad.sphere_order)
        r = np.linspace(0.0, R, 257)
        vals = np.abs(f(r[:, None, None] * rule.nodes[None]))
        return float(np.max(vals))
    total = _ball_integral(lambda k: np.abs(f(k)) ** p, f.n, R, m.alpha, quad)
    return total ** (1.0 / p)


# ---------------------------------------------------------------------------
# symmetrization


def _sym_samples(f: VelocityFunction, p: float, radii: np.ndarray, sampler: RotationSampler,
                 sphere_order: int = 24) -> np.ndarray:
    """|f(rho R e1)|**p for all radii and rotations: shape (len(radii), count)."""
    dirs = sampler.matrices(f.n)[:, :, 0]  # R e1
    return np.abs(f(radii[:, None, None] * dirs[None])) ** p


def _sym_values(f: VelocityFunction, p: float, radii: np.ndarray, sampler: RotationSampler,
                sphere_order: int = 24) -> np.ndarray:
    radii = np.asarray(radii, dtype=float)
    if math.isinf(p):
        dirs = np.concatenate([sampler.matrices(f.n)[:, :, 0],
                               sphere_rule(f.n, sphere_order).nodes])
        return np.max(np.abs(f(radii[:, None, None] * dirs[None])), axis=-1)
    out = np.empty(radii.shape)
    step = max(1, _CHUNK // (sampler.count * f.n))
    flat = radii.reshape(-1)
    res = out.reshape(-1)
    for s in range(0, len(flat), step):
        vals = _sym_samples(f, p, flat[s:s + step], sampler)
        res[s:s + step] = pairwise_sum(vals, axis=-1) / sampler.count
    return out ** (1.0 / p)


def symmetrize(f: VelocityFunction, p: float, sampler: RotationSampler = RotationSampler(),
               tabulate: int | None = None) -> VelocityFunction:
    """Radial symmetrization f*_p(x) = (int |f(Rx)|^p dmu(R))^(1/p) by Haar Monte Carlo.

    The estimator only sees |x|, so the result is radial by construction.
    With ``tabulate=N`` the radial profile is replaced by a cubic spline in
    |x| through N Monte Carlo values, which is much cheaper to evaluate.
    """
    R = f.extent
    if tabulate and not math.isfinite(R):
        raise ValueError("tabulated symmetrization needs a finite extent")
    if tabulate:
        rho = np.linspace(0.0, R, int(tabulate))
        vals = _sym_values(f, p, rho, sampler)
        spline = CubicSpline(rho, vals, bc_type=((1, 0.0), "not-a-knot"))

        def prof(s):
            r = np.sqrt(np.maximum(np.asarray(s, dtype=float), 0.0))
            return np.where(r <= R, np.maximum(spline(np.minimum(r, R)), 0.0), 0.0)
    else:
        def prof(s):
            s = np.asarray(s, dtype=float)
            return _sym_values(f, p, np.sqrt(np.maximum(s, 0.0)), sampler)

    if f.compact:
        profile = RadialProfile(prof, support_radius=f.support_radius**2,
                                label=f"sym{p:g}({f.label})")
    elif math.isfinite(R):
        profile = RadialProfile(prof, support_radius=R**2, label=f"sym{p:g}({f.label})")
    else:
        profile = RadialProfile(prof, decay="gaussian", decay_rate=math.inf,
                                label=f"sym{p:g}({f.label})")
    return VelocityFunction(lambda k: profile(np.sum(k * k, axis=-1)), f.n, f.support_radius,
                            f.cutoff_radius, profile, profile.label)


def symmetrization_error(f: VelocityFunction, p: float, sampler: RotationSampler,
                         radii=None) -> float:
    """Relative Monte Carlo standard error of f*_p, weighted by where its mass lies.

    Per radius the delta method gives se(mean |f|^p) / (p mean |f|^p); radii
    are then combined with weights rho**(n-1) mean, i.e. sum(w se) / sum(w mean) / p.
    Summing standard errors instead of variances keeps the estimate
    conservative, since all radii share the same rotations.
    """
    if math.isinf(p):
        return 0.0
    if radii is None:
        radii = np.linspace(0.0, f.extent, 65)[1:]
    radii = np.asarray(radii, dtype=float)
    vals = _sym_samples(f, p, radii, sampler)
    mean = vals.mean(axis=-1)
    se = vals.std(axis=-1, ddof=1) / math.sqrt(sampler.count)
    w = radii ** (f.n - 1)
    mass = float(np.sum(w * mean))
    if mass == 0:
        return 0.0
    return float(np.sum(w * se)) / mass / p


# ---------------------------------------------------------------------------
# pairings and inequality checks


def _pairing_direct(f: VelocityFunction, g: VelocityFunction, h: VelocityFunction,
                    kern: AngularKernel, order: int, quad: QuadratureSpec) -> float:
    """int f(k) P(g, h)(k) dk by radial x sphere quadrature in k."""
    R = min(f.extent, math.hypot(g.extent, h.extent))
    return _ball_integral(lambda k: f(k) * operator_P(g, h, k, kern, order), f.n, R, 0.0, quad)


def carleman_integral(G, H, F, n: int, kern: AngularKernel, R_max: float, order: int,
                      radial_order: int, radial_exp: float = 0.0) -> float:
    """The Carleman-type integral

        2^(n-1) int G(x) / |x| int_{x.z=0} F(x + z) / |x+z|^(n-2) H(z) b(2|x|^2/|x+z|^2 - 1) dpi_z dx

    with ``F`` optionally times ``|x+z|**radial_exp``.  In polar coordinates
    x = r x^, z = rho z^ (z^ on the unit sphere of x^-perp) and r = R cos(psi),
    rho = R sin(psi), t = cos(2 psi), the measure becomes
    R^(n-1) (1 - t^2)^((n-3)/2) b(t) dR dt dx^ dz^, with no singularity left
    at x = 0 or x + z = 0.
    """
    t, wt = _polar_rule(kern, n, order)
    xr = sphere_rule(n, order)
    zr = sphere_rule(n - 1, order)
    E = _complement_basis(xr.nodes)  # (X, n, n-1)
    zdirs = np.einsum("xij,mj->xmi", E, zr.nodes)  # (X, Z, n)
    cr = np.sqrt((1 + t) / 2)
    sr = np.sqrt((1 - t) / 2)
    Rn, wR = _radial_rule(R_max, n - 1 + radial_exp, radial_order)
    total = np.zeros(len(Rn))
    for i, Rv in enumerate(Rn):
        xs = (Rv * cr)[:, None, None] * xr.nodes[None, :, :]  # (T, X, n)
        zs = (Rv * sr)[:, None, None, None] * zdirs[None]  # (T, X, Z, n)
        gx = G(xs)  # (T, X)
        hz = H(zs)  # (T, X, Z)
        fxz = F(xs[:, :, None, :] + zs)  # (T, X, Z)
        inner = pairwise_sum(hz * fxz * zr.weights, axis=-1)  # (T, X)
        inner = pairwise_sum(gx * inner * xr.weights, axis=-1)  # (T,)
        total[i] = pairwise_sum(inner * wt)
    return float(pairwise_sum(wR * Rn ** (n - 1 + radial_exp) * total))


def lemma21_pairing(f: VelocityFunction, g: VelocityFunction, h: VelocityFunction,
                    kern: AngularKernel, rule: SphereRule | int = 16,
                    quad: QuadratureSpec = QuadratureSpec()) -> tuple[float, float]:
    """Both sides of the Carleman-type pairing identity: (int f P(g,h), hyperplane form)."""
    order = rule.order if isinstance(rule, SphereRule) else int(rule)
    if h.is_zero() or g.is_zero() or f.is_zero():
        return 0.0, 0.0
    lhs = _pairing_direct(f, g, h, kern, order, quad)
    R = min(f.extent, math.hypot(g.extent, h.extent))
    rhs = carleman_integral(g, h, f, f.n, kern, R, order, quad.radial_order)
    return lhs, rhs


def _holder3(p, q, r) -> bool:
    return abs(sum(0.0 if math.isinf(v) else 1.0 / v for v in (p, q, r)) - 1.0) < 1e-12


def lemma22_check(f: VelocityFunction, g: VelocityFunction, h: VelocityFunction, p: float,
                  q: float, r: float, kern: AngularKernel, rule: SphereRule | int = 16,
                  sampler: RotationSampler = RotationSampler(),
                  quad: QuadratureSpec = QuadratureSpec(), tol: float = 1e-6,
                  tabulate: int = 257) -> InequalityReport:
    """|int f P(g,h)| <= int f*_p P(g*_q, h*_r), with a Monte Carlo error margin."""
    if not _holder3(p, q, r):
        raise ValueError("the symmetrized pairing needs 1/p + 1/q + 1/r = 1")
    order = rule.order if isinstance(rule, SphereRule) else int(rule)
    lhs = abs(_pairing_direct(f, g, h, kern, order, quad))
    fs = symmetrize(f, p, sampler, tabulate)
    gs = symmetrize(g, q, sampler, tabulate)
    hs = symmetrize(h, r, sampler, tabulate)
    rhs = _pairing_direct(fs, gs, hs, kern, order, quad)
    margin = 3.0 * sum(symmetrization_error(u, e, sampler) for u, e in ((f, p), (g, q), (h, r)))
    params = dict(n=f.n, p=p, q=q, r=r, kernel=kern.label)
    return InequalityReport.build(
        "lemma22", lhs, rhs, [], tolerance=tol, mc_margin=margin, params=params,
        provenance=dict(seed=sampler.seed, rotations=sampler.count, sphere_order=order,
                        radial_order=quad.radial_order))


def theorem1_constant(n: int, alpha: float, p: float, q: float, kern: AngularKernel,
                      quad: QuadratureSpec = QuadratureSpec()):
    """2^(n-2) |S^(n-2)| beta_b(-(n+alpha)/2p, -(n+alpha)/2q) as a BetaResult."""
    x = -(n + alpha) / 2 * (0.0 if math.isinf(p) else 1 / p)
    y = -(n + alpha) / 2 * (0.0 if math.isinf(q) else 1 / q)
    return beta_b(x, y, XiMeasure(kern, n), quad).scaled(2.0 ** (n - 2) * sphere_area(n - 2)), (x, y)


def theorem1_check(g: VelocityFunction, h: VelocityFunction, e: ExponentTriple, m: NuMeasure,
                   kern: AngularKernel, rule: SphereRule | int = 16,
                   quad: QuadratureSpec = QuadratureSpec(), tol: float = 1e-4,
                   method: str = "direct") -> InequalityReport:
    """||P(g,h)||_{L^r(nu_a)} <= C ||g||_{L^p(nu_a)} ||h||_{L^q(nu_a)}.

    ``method="direct"`` evaluates P on a product grid in R^n; ``"radial"``
    (radial inputs only) goes through the one-dimensional profiles, which is
    the only practical route for singular extremizer-type inputs.
    """
    if e.relation != "holder":
        raise ValueError("the weighted bound on P needs 1/p + 1/q = 1/r")
    n = m.n
    C, (x, y) = theorem1_constant(n, m.alpha, e.p, e.q, kern, quad)
    if C.divergent:
        raise DivergentConstant(f"beta_b({x:g}, {y:g}) diverges for {kern.label}, n={n}")
    order = rule.order if isinstance(rule, SphereRule) else int(rule)
    params = dict(n=n, p=e.p, q=e.q, r=e.r, alpha=m.alpha, kernel=kern.label)
    prov = dict(sphere_order=order, radial_order=quad.radial_order, method=method)
    if method == "radial":
        if not (g.radial and h.radial):
            raise ValueError("the radial route needs radial inputs")
        sm = SigmaMeasure(n, m.alpha)
        half = sphere_area(n - 1) / 2
        ng = (half ** _inv(e.p)) * lp_norm_radial(g.profile, e.p, sm, quad)
        nh = (half ** _inv(e.q)) * lp_norm_radial(h.profile, e.q, sm, quad)
        if ng == 0 or nh == 0:
            lhs = 0.0
        else:
            xi = XiMeasure(kern, n)
            lhs = (half ** _inv(e.r)) * 2.0 ** (n - 2) * sphere_area(n - 2) * lp_norm_radial(
                B_profile(g.profile, h.profile, xi, quad), e.r, sm, quad)
    elif method == "direct":
        ng = weighted_lp_norm(g, e.p, m, quad)
        nh = weighted_lp_norm(h, e.q, m, quad)
        if ng == 0 or nh == 0:
            lhs = 0.0
        else:
            lhs = weighted_lp_norm(P_function(g, h, kern, order), e.r, m, quad)
    else:
        raise ValueError(f"unknown method {method!r}")
    return InequalityReport.build("thm1", lhs, C.value, [("g_p", ng), ("h_q", nh)],
                                  tolerance=tol, params=params, provenance=prov)


def _inv(p: float) -> float:
    return 0.0 if math.isinf(p) else 1.0 / p


def random_test_triple(n: int, seed: int):
    """Three smooth, compactly supported, non-radial functions drawn from ``seed``.

    Shifted bumps of random radius; about half are multiplied by v_1, which
    makes them change sign.
    """
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(3):
        f = VelocityFunction.bump(n, rng.uniform(0.8, 1.5)).shifted(rng.uniform(-0.4, 0.4, n))
        out.append(f.linearmod() if rng.random() < 0.5 else f)
    return tuple(out)
