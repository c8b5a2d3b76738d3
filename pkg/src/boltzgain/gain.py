"""The collision gain and loss terms for hard potentials.

Three independent routes to Q+(g, h)(v):

* direct: integrate over the relative velocity u and the scattering
  direction w, with v' = V + |u| w / 2, v'_* = V - |u| w / 2;
* Carleman: a point x and the hyperplane x . z = 0;
* Fourier (Maxwellian molecules only): the transform of Q+(f, f) is
  int f^(k+) f^(k-) b(k^ . w) dw on a periodic grid.

The Fourier convention is f^(k) = int f(v) exp(-i k . v) dv.
"""
from __future__ import annotations

import math
import struct
import warnings
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np
from scipy.ndimage import map_coordinates, spline_filter
from scipy.optimize import minimize_scalar

from .errors import AliasingWarning, DivergentConstant, DomainError, NonIntegrable
from .kernel import AngularKernel, XiMeasure, beta_b, grad_cutoff, sphere_area
from .quadrature import QuadratureSpec, pairwise_sum
from .radial import ExponentTriple
from .report import InequalityReport
from .spherical import (
    SphereRule,
    VelocityFunction,
    _ball_integral,
    _polar_rule,
    aligned_rule,
    carleman_integral,
    operator_P,
    sphere_rule,
)

__all__ = [
    "CollisionKernel",
    "GridFunction",
    "LambdaNormSpec",
    "q_minus",
    "q_plus_direct",
    "q_plus_carleman",
    "fourier_transform",
    "inverse_fourier_transform",
    "q0_plus_bobylev",
    "lambda_norm",
    "theorem2_constant",
    "theorem2_check",
]


@dataclass(frozen=True)
class CollisionKernel:
    """B(|u|, u^ . w) = |u|**lam b(u^ . w) with lam >= 0."""

    lam: float
    angular: AngularKernel

    def __post_init__(self):
        if not self.lam >= 0:
            raise DomainError(f"only hard potentials (lambda >= 0) are supported, got {self.lam}")


@dataclass(frozen=True)
class LambdaNormSpec:
    """Norm (int |f|^p (1 + |k|^(p lam)) dk)^(1/p)."""

    p: float
    lam: float = 0.0

    def __post_init__(self):
        if not self.p >= 1:
            raise DomainError(f"p must be in [1, inf], got {self.p}")
        if not self.lam >= 0:
            raise DomainError(f"lambda must be >= 0, got {self.lam}")


def _order(rule) -> int:
    return rule.order if isinstance(rule, SphereRule) else int(rule)


def _reflect(f: VelocityFunction, v: np.ndarray) -> VelocityFunction:
    """k -> f(v - k)."""
    fn = f.func
    r = float(np.linalg.norm(v))
    return VelocityFunction(lambda k: fn(v - k), f.n, f.support_radius + r, f.cutoff_radius + r,
                            None, f"{f.label}(v-.)")


def _translate(f: VelocityFunction, v: np.ndarray) -> VelocityFunction:
    """x -> f(x + v)."""
    fn = f.func
    r = float(np.linalg.norm(v))
    return VelocityFunction(lambda k: fn(k + v), f.n, f.support_radius + r, f.cutoff_radius + r,
                            None, f"{f.label}(.+v)")


def _point(v, n: int) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.shape != (n,):
        raise DomainError(f"velocity must have {n} components")
    return v


def q_minus(g: VelocityFunction, h: VelocityFunction, v, ck: CollisionKernel,
            quad: QuadratureSpec = QuadratureSpec()) -> float:
    """g(v) int h(v_*) |v - v_*|^lam dv_* int b dw."""
    v = _point(v, g.n)
    gv = float(g(v))
    if gv == 0.0 or h.is_zero():
        return 0.0
    cut = grad_cutoff(XiMeasure(ck.angular, g.n), quad)
    if cut.divergent:
        raise NonIntegrable("the angular kernel is not integrable on the sphere")
    hv = _reflect(h, v)
    if not math.isfinite(hv.extent):
        raise NonIntegrable(f"{h.label} has no finite support or cutoff")
    mass = _ball_integral(hv, g.n, hv.extent, ck.lam, quad)
    return gv * mass * cut.value


def q_plus_direct(g: VelocityFunction, h: VelocityFunction, v, ck: CollisionKernel,
                  rule: SphereRule | int = 16, quad: QuadratureSpec = QuadratureSpec()) -> float:
    """int int g(v') h(v'_*) |u|^lam b(u^ . w) dw dv_*, integrating over u = v - v_*.

    With V = v - u/2 the post-collision pair is v' = v - u-, v'_* = v - u+
    where u+- = (u +- |u| w)/2, so the inner sphere integral is the operator P
    applied to the reflected functions h(v - .) and g(v - .).
    """
    v = _point(v, g.n)
    if g.is_zero() or h.is_zero():
        return 0.0
    gv, hv = _reflect(g, v), _reflect(h, v)
    # |v' - v'_*| = |u| bounds the relative speed by the sum of the extents
    R = g.extent + h.extent
    if not math.isfinite(R):
        raise NonIntegrable("q_plus_direct needs compact support or a decay cutoff")
    order = _order(rule)
    return _ball_integral(lambda u: operator_P(hv, gv, u, ck.angular, order), g.n, R,
                          ck.lam, quad)


def q_plus_carleman(g: VelocityFunction, h: VelocityFunction, v, ck: CollisionKernel,
                    quad: QuadratureSpec = QuadratureSpec()) -> float:
    """Q+(g, h)(v) from the point/hyperplane representation.

    The integrand is g(x + v) h(z + v) |x + z|^lam over x in R^n and z in the
    hyperplane orthogonal to x.  Here x + z = -u and x - z = |u| w, so the
    angular argument 2|x|^2/|x+z|^2 - 1 equals -u^ . w; the kernel is
    reflected to b(-s) so this route computes the same Q+ as the others.
    """
    v = _point(v, g.n)
    if g.is_zero() or h.is_zero():
        return 0.0
    G, H = _translate(g, v), _translate(h, v)
    R = math.hypot(G.extent, H.extent)
    if not math.isfinite(R):
        raise NonIntegrable("q_plus_carleman needs compact support or a decay cutoff")
    one = lambda w: np.ones(w.shape[:-1])
    return carleman_integral(G, H, one, g.n, ck.angular.reflected(), R, quad.sphere_order,
                             quad.radial_order, radial_exp=ck.lam)


# ---------------------------------------------------------------------------
# periodic grids and the Fourier pipeline

_HEADER = struct.Struct("<4sIIdI8x")
_MAGIC = b"BGF1"


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Samples on the uniform grid x_j = -L + j * 2L/N, j = 0..N-1, per axis.

    ``values[j1, ..., jn]`` is the sample at (x_j1, ..., x_jn); the grid is
    treated as periodic with period 2L.  Fourier-side grids use the same
    convention with their own half-width, so index N/2 is the zero mode.
    """

    n: int
    L: float
    N: int
    values: np.ndarray
    fourier: bool = False

    def __post_init__(self):
        if self.n not in (2, 3):
            raise DomainError("grid functions are supported for n in {2, 3}")
        if self.N < 2 or self.N & (self.N - 1):
            raise DomainError(f"N must be a power of two, got {self.N}")
        if self.values.shape != (self.N,) * self.n:
            raise DomainError(f"values must have shape {(self.N,) * self.n}")

    @property
    def spacing(self) -> float:
        return 2.0 * self.L / self.N

    @property
    def axis(self) -> np.ndarray:
        return -self.L + self.spacing * np.arange(self.N)

    def points(self) -> np.ndarray:
        """Grid coordinates, shape (N, ..., N, n)."""
        ax = self.axis
        return np.stack(np.meshgrid(*([ax] * self.n), indexing="ij"), axis=-1)

    def integral(self) -> float:
        return float(np.real(np.sum(self.values)) * self.spacing ** self.n)

    @classmethod
    def sample(cls, f: VelocityFunction, N: int = 64, L: float = 8.0) -> "GridFunction":
        ax = -L + (2.0 * L / N) * np.arange(N)
        pts = np.stack(np.meshgrid(*([ax] * f.n), indexing="ij"), axis=-1)
        return cls(f.n, float(L), int(N), np.asarray(f(pts), dtype=float))

    def boundary_fraction(self) -> float:
        """Largest |value| on the outer layer of the box relative to the peak."""
        a = np.abs(self.values)
        peak = a.max()
        if peak == 0:
            return 0.0
        edge = 0.0
        for d in range(self.n):
            edge = max(edge, np.take(a, 0, axis=d).max(), np.take(a, -1, axis=d).max())
        return float(edge / peak)

    # -- serialization ------------------------------------------------------
    def to_bytes(self) -> bytes:
        flags = (1 if np.iscomplexobj(self.values) else 0) | (2 if self.fourier else 0)
        head = _HEADER.pack(_MAGIC, self.n, self.N, self.L, flags)
        if flags & 1:
            body = np.ascontiguousarray(self.values, dtype="<c16").tobytes()
        else:
            body = np.ascontiguousarray(self.values, dtype="<f8").tobytes()
        return head + body

    @classmethod
    def from_bytes(cls, data: bytes) -> "GridFunction":
        if len(data) < _HEADER.size:
            raise ValueError("truncated grid file")
        magic, n, N, L, flags = _HEADER.unpack_from(data)
        if magic != _MAGIC:
            raise ValueError(f"bad magic {magic!r}")
        dtype = "<c16" if flags & 1 else "<f8"
        vals = np.frombuffer(data, dtype=dtype, offset=_HEADER.size)
        if vals.size != N ** n:
            raise ValueError(f"expected {N ** n} values, found {vals.size}")
        return cls(n, L, N, vals.reshape((N,) * n).astype(dtype[1:]), bool(flags & 2))

    def save(self, path) -> None:
        Path(path).write_bytes(self.to_bytes())

    @classmethod
    def load(cls, path) -> "GridFunction":
        return cls.from_bytes(Path(path).read_bytes())

    def to_csv(self, path) -> None:
        cols = [f"i{d}" for d in range(self.n)]
        cplx = np.iscomplexobj(self.values)
        cols += ["re", "im"] if cplx else ["value"]
        idx = np.indices(self.values.shape).reshape(self.n, -1).T
        flat = self.values.reshape(-1)
        with open(path, "w") as fh:
            fh.write(",".join(cols) + "\n")
            for i, val in zip(idx, flat):
                nums = [repr(float(val.real)), repr(float(val.imag))] if cplx else [repr(float(val))]
                fh.write(",".join([*map(str, i), *nums]) + "\n")


def fourier_transform(f: GridFunction, tol: float = 1e-10) -> GridFunction:
    """f^(k) = int f(v) exp(-i k . v) dv on the modal grid k = (m - N/2) pi / L."""
    if f.fourier:
        raise DomainError("grid is already on the Fourier side")
    if f.boundary_fraction() > tol:
        warnings.warn(f"grid function is {f.boundary_fraction():.2e} of its peak at the box edge",
                      AliasingWarning, stacklevel=2)
    axes = tuple(range(f.n))
    vals = np.fft.fftshift(np.fft.fftn(np.fft.ifftshift(f.values, axes=axes), axes=axes), axes=axes)
    K = math.pi * f.N / (2 * f.L)
    return GridFunction(f.n, K, f.N, vals * f.spacing ** f.n, fourier=True)


def inverse_fourier_transform(F: GridFunction, real: bool = True) -> GridFunction:
    """Inverse of :func:`fourier_transform`."""
    if not F.fourier:
        raise DomainError("grid is not on the Fourier side")
    axes = tuple(range(F.n))
    vals = np.fft.fftshift(np.fft.ifftn(np.fft.ifftshift(F.values, axes=axes), axes=axes), axes=axes)
    vals = vals * (F.spacing * F.N / (2 * math.pi)) ** F.n
    L = math.pi * F.N / (2 * F.L)
    return GridFunction(F.n, L, F.N, vals.real.copy() if real else vals)


def _interpolator(F: GridFunction):
    """Cubic spline interpolation of modal values at arbitrary k; zero off the grid."""
    coef = [spline_filter(part, order=3, mode="grid-constant") for part in (F.values.real, F.values.imag)]
    K, dk = F.L, F.spacing

    def at(k):
        idx = np.moveaxis((k + K) / dk, -1, 0)
        re = map_coordinates(coef[0], idx, order=3, mode="grid-constant", prefilter=False)
        im = map_coordinates(coef[1], idx, order=3, mode="grid-constant", prefilter=False)
        return re + 1j * im

    return at


def _padded(f: GridFunction, factor: int) -> GridFunction:
    """Zero-extend f to a box ``factor`` times wider; its transform is f^ on a finer k-grid."""
    if factor == 1:
        return f
    M = f.N * factor
    lo = (M - f.N) // 2
    vals = np.zeros((M,) * f.n)
    vals[(slice(lo, lo + f.N),) * f.n] = f.values
    return GridFunction(f.n, f.L * factor, M, vals)


def bobylev_modes(F: GridFunction, kern: AngularKernel, rule: SphereRule | int = 12,
                  modes=None) -> np.ndarray:
    """int F(k+) F(k-) b(k^ . w) dw at the given modes (default: all grid modes of F).

    Values of F off the grid come from cubic spline interpolation.
    """
    at = _interpolator(F)
    order = _order(rule)
    n = F.n
    k = F.points() if modes is None else np.asarray(modes, dtype=float)
    flat = k.reshape(-1, n)
    out = np.zeros(len(flat), dtype=complex)
    nk = np.linalg.norm(flat, axis=-1)
    pole = flat / np.where(nk > 0, nk, 1.0)[:, None]
    pole[nk == 0] = np.eye(n)[0]
    M = len(_polar_rule(kern, n, order)[0]) * sphere_rule(n - 1, order).size
    step = max(1, (1 << 20) // (M * n))
    for s in range(0, len(flat), step):
        sl = slice(s, s + step)
        nodes, w = aligned_rule(kern, n, order, pole[sl])
        half = 0.5 * flat[sl][:, None, :]
        rad = 0.5 * nk[sl][:, None, None] * nodes
        out[sl] = pairwise_sum(at(half + rad) * at(half - rad) * w)
    return out.reshape(k.shape[:-1])


def q0_plus_bobylev(f: GridFunction, kern: AngularKernel, rule: SphereRule | int = 12,
                    tol: float = 1e-10, oversample: int = 2) -> GridFunction:
    """Q+(f, f) for Maxwellian molecules through the Fourier side, on the same grid as f.

    f^ is tabulated on a grid ``oversample`` times finer (zero padding in v)
    before it is interpolated at k+ and k-.  Modes outside the ball inscribed
    in the modal cube are set to zero, and only half of the remaining modes
    are computed: Q^(-k) is the conjugate of Q^(k) for real f.
    """
    if f.fourier:
        raise DomainError("pass the physical-space grid")
    if not np.any(f.values):
        return replace(f, values=np.zeros_like(f.values))
    cut = grad_cutoff(XiMeasure(kern, f.n))
    if cut.divergent:
        raise NonIntegrable("the angular kernel is not integrable on the sphere")
    F = fourier_transform(f, tol)
    fine = fourier_transform(_padded(f, int(oversample)), math.inf)
    N, n = f.N, f.n
    idx = np.indices((N,) * n).reshape(n, -1).T
    k = (idx - N // 2) * F.spacing
    flat = np.arange(N ** n)
    partner = np.ravel_multi_index(((N - idx) % N).T, (N,) * n)
    todo = (np.linalg.norm(k, axis=-1) <= F.L - 0.5 * F.spacing) & (flat <= partner)
    vals = bobylev_modes(fine, kern, rule, modes=k[todo])
    Q = np.zeros(N ** n, dtype=complex)
    Q[partner[todo]] = np.conj(vals)
    Q[flat[todo]] = vals
    return inverse_fourier_transform(replace(F, values=Q.reshape((N,) * n)))


# ---------------------------------------------------------------------------
# norms and the L^p_lambda inequality


def lambda_norm(f: VelocityFunction, spec: LambdaNormSpec,
                quad: QuadratureSpec = QuadratureSpec()) -> float:
    """(int |f|^p (1 + |k|^(p lam)) dk)^(1/p); for p = inf, sup |f| (1 + |k|^lam)."""
    if f.is_zero():
        return 0.0
    R = f.extent
    if not math.isfinite(R):
        raise NonIntegrable(f"{f.label or 'function'} has no finite support or cutoff")
    p, lam = spec.p, spec.lam
    if math.isinf(p):
        rule = sphere_rule(f.n, quad.sphere_order)
        r = np.linspace(0.0, R, 513)
        pts = r[:, None, None] * rule.nodes[None]
        return float(np.max(np.abs(f(pts)) * (1 + r[:, None] ** lam)))

    def F(k):
        a = np.abs(f(k)) ** p
        return a * (1.0 + np.linalg.norm(k, axis=-1) ** (p * lam)) if lam else 2.0 * a

    return _ball_integral(F, f.n, R, 0.0, quad) ** (1.0 / p)


def theorem2_constant(n: int, lam: float, r: float, kern: AngularKernel,
                      quad: QuadratureSpec = QuadratureSpec()):
    """2^(lam+n-1) |S^(n-2)| beta_b(-n/2r', -n/2r') and the beta arguments."""
    inv_rp = 1.0 - (0.0 if math.isinf(r) else 1.0 / r)
    x = -n / 2 * inv_rp
    beta = beta_b(x, x, XiMeasure(kern, n), quad)
    return beta.scaled(2.0 ** (lam + n - 1) * sphere_area(n - 2)), x


def _qplus_norm(g, h, ck, r, quad, radial_points: int) -> float:
    """||Q+(g, h)||_{L^r} by quadrature over v (Carleman evaluations)."""
    n = g.n
    R = g.extent + h.extent
    qfun = lambda pts: np.array([q_plus_carleman(g, h, v, ck, quad)
                                 for v in pts.reshape(-1, n)]).reshape(pts.shape[:-1])
    radial = g.radial and h.radial
    if radial:
        # Q+ of radial inputs is radial: sample along one ray
        e1 = np.eye(n)[0]
        prof = lambda rs: qfun(np.asarray(rs, dtype=float)[..., None] * e1)
        if math.isinf(r):
            rs = np.linspace(0.0, R, radial_points)
            vals = np.abs(prof(rs))
            i = int(np.argmax(vals))
            lo, hi = rs[max(i - 1, 0)], rs[min(i + 1, len(rs) - 1)]
            res = minimize_scalar(lambda t: -abs(float(prof(np.array([t]))[0])),
                                  bounds=(lo, hi), method="bounded", options={"xatol": 1e-6})
            return float(max(vals[i], -res.fun))
        from .quadrature import interval_rule

        rs, w = interval_rule(0.0, R, radial_points // 4, breaks=np.linspace(0, R, 5)[1:-1],
                              left_exp=n - 1.0, grade=False)
        vals = np.abs(prof(rs)) ** r
        return (sphere_area(n - 1) * float(pairwise_sum(w * rs ** (n - 1) * vals))) ** (1.0 / r)
    f = VelocityFunction(qfun, n, R, R, None, "Q+")
    if math.isinf(r):
        rule = sphere_rule(n, quad.sphere_order)
        rs = np.linspace(0.0, R, radial_points)
        return float(np.max(np.abs(f(rs[:, None, None] * rule.nodes[None]))))
    return _ball_integral(lambda k: np.abs(f(k)) ** r, n, R, 0.0,
                          quad.with_(radial_order=radial_points // 4)) ** (1.0 / r)


def theorem2_check(g: VelocityFunction, h: VelocityFunction, e: ExponentTriple,
                   ck: CollisionKernel, rule: SphereRule | int = 12,
                   quad: QuadratureSpec = QuadratureSpec(sphere_order=10, radial_order=24),
                   tol: float = 1e-3, radial_points: int = 64) -> InequalityReport:
    """||Q+(g,h)||_{L^r} <= C ||g||_{L^p_lam} ||h||_{L^q_lam} for 1/p + 1/q = 1 + 1/r."""
    if e.relation != "young":
        raise ValueError("the L^p_lambda bound needs 1/p + 1/q = 1 + 1/r")
    n = g.n
    C, x = theorem2_constant(n, ck.lam, e.r, ck.angular, quad)
    if C.divergent:
        raise DivergentConstant(f"beta_b({x:g}, {x:g}) diverges for {ck.angular.label}, n={n}")
    params = dict(n=n, p=e.p, q=e.q, r=e.r, lam=ck.lam, kernel=ck.angular.label)
    prov = dict(sphere_order=quad.sphere_order, radial_order=quad.radial_order,
                radial_points=radial_points, method="carleman")
    ng = lambda_norm(g, LambdaNormSpec(e.p, ck.lam), quad)
    nh = lambda_norm(h, LambdaNormSpec(e.q, ck.lam), quad)
    if ng == 0 or nh == 0:
        lhs = 0.0
    else:
        lhs = _qplus_norm(g, h, ck, e.r, quad, radial_points)
    return InequalityReport.build("thm2", lhs, C.value, [("g_p_lam", ng), ("h_q_lam", nh)],
                                  tolerance=tol, params=params, provenance=prov)
