"""Angular collision kernels and the beta-type integrals built from them.

For an angular kernel ``b`` on [-1, 1] and a dimension ``n`` the measure

    dxi(z) = b(2z - 1) [z (1 - z)]**((n - 3) / 2) dz      on [0, 1]

carries every constant in the package through

    beta_b(x, y) = int_0^1 z**x (1 - z)**y dxi(z).

Surface areas use |S^m| = 2 pi**((m+1)/2) / Gamma((m+1)/2), so |S^0| = 2.
"""
from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DomainError, QuadratureFailure
from .quadrature import QuadratureSpec, gauss_jacobi, interval_rule, pairwise_sum

__all__ = [
    "AngularKernel",
    "XiMeasure",
    "BetaResult",
    "Finiteness",
    "sphere_area",
    "xi_density",
    "finiteness_check",
    "beta_b",
    "grad_cutoff",
]


def sphere_area(m: int) -> float:
    """Surface measure of the unit sphere S^m in R^(m+1)."""
    if m < 0:
        raise DomainError(f"sphere dimension must be >= 0, got {m}")
    return 2.0 * math.pi ** ((m + 1) / 2) / math.gamma((m + 1) / 2)


@dataclass(frozen=True)
class AngularKernel:
    """Angular factor ``b(s)`` of the collision kernel, ``s`` in [-1, 1].

    Three forms are supported:

    * ``constant``: ``b(s) = c``;
    * ``power``: ``b(s) = c (1 - s)**(-a_minus) (1 + s)**(-a_plus)``;
    * ``table``: linear interpolation of nonnegative samples, assumed bounded.

    Use the ``constant``/``power``/``table``/``parse`` constructors rather than
    calling the class directly.
    """

    kind: str
    c: float = 1.0
    a_minus: float = 0.0
    a_plus: float = 0.0
    table_s: tuple[float, ...] = ()
    table_b: tuple[float, ...] = ()
    label: str = ""

    def __post_init__(self):
        if self.kind not in ("constant", "power", "table"):
            raise ValueError(f"unknown kernel kind {self.kind!r}")
        if self.kind == "table":
            s = np.asarray(self.table_s, dtype=float)
            b = np.asarray(self.table_b, dtype=float)
            if s.size < 2 or s.size != b.size:
                raise ValueError("table kernel needs at least two (s, b) samples")
            if np.any(np.diff(s) <= 0) or s[0] != -1.0 or s[-1] != 1.0:
                raise ValueError("table abscissae must increase from -1 to 1")
            if np.any(b < 0) or not np.all(np.isfinite(b)):
                raise ValueError("table values must be finite and nonnegative")
            if self.a_minus or self.a_plus:
                raise ValueError("table kernels carry zero endpoint exponents")
        elif self.c < 0:
            raise ValueError(f"kernel constant must be nonnegative, got {self.c}")
        if self.kind == "constant" and (self.a_minus or self.a_plus):
            raise ValueError("constant kernels carry zero endpoint exponents")

    @classmethod
    def constant(cls, c: float = 1.0) -> "AngularKernel":
        return cls("constant", c=float(c), label=f"constant:{_fmt(c)}")

    @classmethod
    def power(cls, c: float, a_minus: float, a_plus: float = 0.0) -> "AngularKernel":
        return cls("power", c=float(c), a_minus=float(a_minus), a_plus=float(a_plus),
                   label=f"power:{_fmt(c)},{_fmt(a_minus)},{_fmt(a_plus)}")

    @classmethod
    def table(cls, s, b, label: str = "table") -> "AngularKernel":
        return cls("table", table_s=tuple(float(v) for v in s),
                   table_b=tuple(float(v) for v in b), label=label)

    @classmethod
    def from_csv(cls, path) -> "AngularKernel":
        rows = []
        with open(path, newline="") as fh:
            for row in csv.reader(fh):
                if not row or row[0].strip().startswith("#"):
                    continue
                try:
                    rows.append((float(row[0]), float(row[1])))
                except ValueError:
                    if rows:
                        raise
                    continue  # header line
        s, b = zip(*rows)
        return cls.table(s, b, label=f"table:{Path(path)}")

    @classmethod
    def parse(cls, text: str) -> "AngularKernel":
        """Parse ``constant:<c>``, ``power:<c>,<a_minus>,<a_plus>`` or ``table:<path>``."""
        kind, _, arg = text.partition(":")
        kind = kind.strip()
        try:
            if kind == "constant":
                return cls.constant(float(arg) if arg else 1.0)
            if kind == "power":
                vals = [float(v) for v in arg.split(",")]
                if len(vals) == 2:
                    vals.append(0.0)
                if len(vals) != 3:
                    raise ValueError("power kernel takes c,a_minus,a_plus")
                return cls.power(*vals)
            if kind == "table":
                return cls.from_csv(arg)
        except (ValueError, OSError) as exc:
            raise ValueError(f"bad kernel {text!r}: {exc}") from exc
        raise ValueError(f"bad kernel {text!r}: unknown kind {kind!r}")

    def reflected(self) -> "AngularKernel":
        """The kernel ``s -> b(-s)``."""
        if self.kind == "constant":
            return self
        if self.kind == "power":
            return AngularKernel.power(self.c, self.a_plus, self.a_minus)
        s = tuple(-v for v in reversed(self.table_s))
        return AngularKernel.table(s, tuple(reversed(self.table_b)), label=f"reflected:{self.label}")

    @property
    def endpoint_exponents(self) -> tuple[float, float]:
        """(a_plus at s = -1, a_minus at s = +1)."""
        return self.a_plus, self.a_minus

    @property
    def is_constant(self) -> bool:
        return self.kind == "constant"

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        if self.kind == "table":
            return np.interp(s, self.table_s, self.table_b)
        out = np.full(s.shape, self.c)
        if self.a_minus:
            out = out * (1.0 - s) ** (-self.a_minus)
        if self.a_plus:
            out = out * (1.0 + s) ** (-self.a_plus)
        return out

    def from_halves(self, z, zc):
        """``b(s)`` given ``z = (1 + s) / 2`` and ``zc = (1 - s) / 2`` separately.

        Keeps the endpoint factors accurate when ``s`` is within rounding of +-1.
        """
        z = np.asarray(z, dtype=float)
        zc = np.asarray(zc, dtype=float)
        out = self.regular_part(z - zc)
        with np.errstate(divide="ignore"):
            if self.a_minus:
                out = out * (2.0 * zc) ** (-self.a_minus)
            if self.a_plus:
                out = out * (2.0 * z) ** (-self.a_plus)
        return out

    def regular_part(self, s):
        """``b(s) (1 - s)**a_minus (1 + s)**a_plus``: bounded and smooth for power forms."""
        s = np.asarray(s, dtype=float)
        if self.kind == "table":
            return np.interp(s, self.table_s, self.table_b)
        return np.full(s.shape, self.c)

    @property
    def breakpoints(self) -> tuple[float, ...]:
        """Interior points in s where ``b`` is not smooth."""
        return self.table_s[1:-1] if self.kind == "table" else ()


def _fmt(v: float) -> str:
    return f"{float(v):g}"


@dataclass(frozen=True)
class XiMeasure:
    kernel: AngularKernel
    n: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise DomainError(f"dimension must be an integer >= 2, got {self.n}")

    @property
    def weight_exponent(self) -> float:
        return (self.n - 3) / 2

    def endpoint_exponents(self, x: float, y: float) -> tuple[float, float]:
        """Exponents of z**x (1-z)**y dxi(z) at z = 0 and z = 1."""
        a_plus, a_minus = self.kernel.endpoint_exponents
        w = self.weight_exponent
        return x + w - a_plus, y + w - a_minus


class Finiteness(enum.Enum):
    FINITE = "Finite"
    DIVERGENT = "Divergent"

    def __bool__(self):
        return self is Finiteness.FINITE

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class BetaResult:
    """Value of a beta-type integral, or the divergent outcome.

    ``value`` is ``inf`` and ``error_estimate`` is ``None`` when divergent.
    """

    value: float
    error_estimate: float | None
    divergent: bool = False

    @property
    def finite(self) -> bool:
        return not self.divergent

    def __float__(self):
        return float(self.value)

    def scaled(self, factor: float) -> "BetaResult":
        if self.divergent:
            return self
        return BetaResult(self.value * factor, self.error_estimate * abs(factor))

    @classmethod
    def divergent_result(cls) -> "BetaResult":
        return cls(math.inf, None, True)


def xi_density(z, m: XiMeasure):
    """Density b(2z-1) [z(1-z)]**((n-3)/2) of the measure xi on (0, 1)."""
    z = np.asarray(z, dtype=float)
    if np.any((z <= 0) | (z >= 1)):
        raise DomainError("xi density is defined for 0 < z < 1")
    out = m.kernel(2 * z - 1) * (z * (1 - z)) ** m.weight_exponent
    return out if out.ndim else float(out)


def finiteness_check(x: float, y: float, m: XiMeasure) -> Finiteness:
    e0, e1 = m.endpoint_exponents(x, y)
    if e0 > -1 and e1 > -1:
        return Finiteness.FINITE
    return Finiteness.DIVERGENT


def _xi_rule(m: XiMeasure, x: float, y: float, order: int):
    """Nodes and weights integrating G(z) z**x (1-z)**y dxi(z) for smooth G.

    The returned weights already include z**x (1-z)**y and the xi density.
    """
    e0, e1 = m.endpoint_exponents(x, y)
    kern = m.kernel
    breaks = tuple((s + 1) / 2 for s in kern.breakpoints)
    if breaks:
        t, w = interval_rule(0.0, 1.0, order, breaks=breaks, left_exp=e0, right_exp=e1,
                             grade=False)
        w = w * t ** e0 * (1 - t) ** e1
    else:
        xi, wj = gauss_jacobi(order, float(e1), float(e0))
        t = 0.5 * (1 + xi)
        w = wj * 0.5 ** (e0 + e1 + 1)
    # b(2z-1) = regular_part * (2(1-z))**-a_minus * (2z)**-a_plus; powers of z went into e0, e1
    a_plus, a_minus = kern.endpoint_exponents
    w = w * kern.regular_part(2 * t - 1) * 2.0 ** (-a_minus - a_plus)
    return t, w


def beta_b(x: float, y: float, m: XiMeasure,
           quad: QuadratureSpec = QuadratureSpec()) -> BetaResult:
    """Beta-type integral of z**x (1-z)**y against xi, or Divergent.

    The endpoint exponents are absorbed into a Gauss-Jacobi weight, so for
    constant and power kernels the residual integrand is constant and the
    rule is exact; tabulated kernels are integrated panel by panel between
    table knots.
    """
    if not finiteness_check(x, y, m):
        return BetaResult.divergent_result()
    order = quad.order
    _, w = _xi_rule(m, x, y, order)
    prev = float(pairwise_sum(w))
    while True:
        _, w = _xi_rule(m, x, y, 2 * order)
        cur = float(pairwise_sum(w))
        err = abs(cur - prev)
        if err <= quad.tol * max(1.0, abs(cur)):
            return BetaResult(cur, err)
        order *= 2
        if 2 * order > quad.max_order:
            raise QuadratureFailure(
                f"beta_b({x}, {y}) not converged: difference {err:.3e} at order {order}")
        prev = cur


def xi_integral(G, m: XiMeasure, x: float = 0.0, y: float = 0.0, order: int = 32) -> float:
    """Fixed-order value of int G(z) z**x (1-z)**y dxi(z) for smooth vectorised G."""
    t, w = _xi_rule(m, x, y, order)
    return float(pairwise_sum(w * G(t)))


def grad_cutoff(m: XiMeasure, quad: QuadratureSpec = QuadratureSpec()) -> BetaResult:
    """int_{S^{n-1}} b(u.w) dw written as 2**(n-2) |S^{n-2}| beta_b(0, 0)."""
    return beta_b(0.0, 0.0, m, quad).scaled(2.0 ** (m.n - 2) * sphere_area(m.n - 2))
