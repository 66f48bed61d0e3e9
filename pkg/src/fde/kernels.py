"""Exact Green kernels and boundary polynomials for the supported BVP families.

Kernels are stored as pairs of bivariate polynomials with rational
coefficients, one piece for ``s <= t`` and one for ``s >= t``.  All
s-derivatives used by the quadrature corrections are obtained by exact
polynomial differentiation.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import factorial

import numpy as np

from .errors import (
    BadInterval,
    DerivativeOrderTooHigh,
    OutOfDomain,
    SingularBcSystem,
    UnsupportedFamily,
)

MAX_S_DERIVATIVE = 7
_DOMAIN_SLACK = 1e-12


def _frac(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, np.integer)):
        return Fraction(int(value))
    return Fraction(float(value))


class BiPoly:
    """Polynomial in (t, s) with exact rational coefficients.

    ``coeffs`` maps ``(i, j)`` to the coefficient of ``t**i * s**j``.
    """

    def __init__(self, coeffs=None):
        clean = {}
        for key, c in (coeffs or {}).items():
            c = _frac(c)
            if c:
                clean[(int(key[0]), int(key[1]))] = c
        self.coeffs = clean

    @classmethod
    def const(cls, c) -> "BiPoly":
        return cls({(0, 0): c})

    @classmethod
    def t(cls) -> "BiPoly":
        return cls({(1, 0): 1})

    @classmethod
    def s(cls) -> "BiPoly":
        return cls({(0, 1): 1})

    @classmethod
    def univariate(cls, coeffs) -> "BiPoly":
        """Polynomial in t only, from ascending coefficients."""
        return cls({(i, 0): c for i, c in enumerate(coeffs)})

    def _coerce(self, other):
        if isinstance(other, BiPoly):
            return other
        return BiPoly.const(other)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.coeffs)
        for key, c in other.coeffs.items():
            out[key] = out.get(key, 0) + c
        return BiPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return BiPoly({k: -c for k, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        out: dict = {}
        for (i1, j1), c1 in self.coeffs.items():
            for (i2, j2), c2 in other.coeffs.items():
                key = (i1 + i2, j1 + j2)
                out[key] = out.get(key, 0) + c1 * c2
        return BiPoly(out)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        d = _frac(scalar)
        return BiPoly({k: c / d for k, c in self.coeffs.items()})

    def __pow__(self, n: int):
        out = BiPoly.const(1)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, BiPoly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(frozenset(self.coeffs.items()))

    def __repr__(self):
        terms = " + ".join(f"{c}*t^{i}*s^{j}" for (i, j), c in sorted(self.coeffs.items()))
        return f"BiPoly({terms or '0'})"

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def degree_t(self) -> int:
        return max((i for i, _ in self.coeffs), default=0)

    @property
    def degree_s(self) -> int:
        return max((j for _, j in self.coeffs), default=0)

    def diff_s(self, k: int = 1) -> "BiPoly":
        out = self
        for _ in range(k):
            out = BiPoly({(i, j - 1): c * j for (i, j), c in out.coeffs.items() if j > 0})
        return out

    def diff_t(self, k: int = 1) -> "BiPoly":
        out = self
        for _ in range(k):
            out = BiPoly({(i - 1, j): c * i for (i, j), c in out.coeffs.items() if i > 0})
        return out

    def integrate_s(self) -> "BiPoly":
        """Antiderivative in s vanishing at s = 0."""
        return BiPoly({(i, j + 1): c / (j + 1) for (i, j), c in self.coeffs.items()})

    def subs_s(self, value) -> "BiPoly":
        """Substitute a constant for s; the result depends on t only."""
        v = _frac(value)
        out: dict = {}
        for (i, j), c in self.coeffs.items():
            out[(i, 0)] = out.get((i, 0), 0) + c * v**j
        return BiPoly(out)

    def on_diagonal(self) -> "BiPoly":
        """Substitute s = t."""
        out: dict = {}
        for (i, j), c in self.coeffs.items():
            out[(i + j, 0)] = out.get((i + j, 0), 0) + c
        return BiPoly(out)

    def swap(self) -> "BiPoly":
        return BiPoly({(j, i): c for (i, j), c in self.coeffs.items()})

    @cached_property
    def float_coeffs(self) -> np.ndarray:
        arr = np.zeros((self.degree_t + 1, self.degree_s + 1))
        for (i, j), c in self.coeffs.items():
            arr[i, j] = float(c)
        return arr

    def __call__(self, t, s=0.0):
        t, s = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(s, dtype=float))
        out = np.polynomial.polynomial.polyval2d(t, s, self.float_coeffs)
        return out if out.ndim else float(out)

    def exact(self, t, s=0) -> Fraction:
        t, s = _frac(t), _frac(s)
        return sum((c * t**i * s**j for (i, j), c in self.coeffs.items()), Fraction(0))


@dataclass(frozen=True, eq=False)
class PiecewisePoly2:
    """Two polynomial pieces on [0, a]^2 split along the diagonal s = t."""

    lower: BiPoly  # 0 <= s <= t
    upper: BiPoly  # t <= s <= a
    interval_length: float

    def check_domain(self, t, s):
        a = self.interval_length
        tol = _DOMAIN_SLACK * max(1.0, a)
        t = np.asarray(t, dtype=float)
        s = np.asarray(s, dtype=float)
        if (
            np.any(~np.isfinite(t)) or np.any(~np.isfinite(s))
            or np.any(t < -tol) or np.any(t > a + tol)
            or np.any(s < -tol) or np.any(s > a + tol)
        ):
            raise OutOfDomain(f"kernel evaluated outside [0, {a}]^2")

    def __call__(self, t, s):
        self.check_domain(t, s)
        t, s = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(s, dtype=float))
        out = np.where(s <= t, self.lower(t, s), self.upper(t, s))
        return out if out.ndim else float(out)


class BcFamily(enum.Enum):
    """Boundary-condition families; the value order matches ``conditions``."""

    THIRD_A = "third_a"
    THIRD_B = "third_b"
    THIRD_C = "third_c"
    FOURTH_CLAMPED = "fourth_clamped"
    FIFTH = "fifth"

    @classmethod
    def parse(cls, tag) -> "BcFamily":
        if isinstance(tag, cls):
            return tag
        try:
            return cls(str(tag).strip().lower())
        except ValueError:
            raise UnsupportedFamily(f"unknown boundary-condition family {tag!r}") from None

    @property
    def order(self) -> int:
        return {"third_a": 3, "third_b": 3, "third_c": 3, "fourth_clamped": 4, "fifth": 5}[self.value]

    def conditions(self, a: float = 1.0) -> tuple:
        """(point, derivative order) for each boundary functional."""
        return {
            "third_a": ((0.0, 0), (0.0, 1), (a, 1)),
            "third_b": ((0.0, 0), (0.0, 1), (a, 0)),
            "third_c": ((0.0, 0), (a, 0), (a, 1)),
            "fourth_clamped": ((0.0, 0), (a, 0), (0.0, 1), (a, 1)),
            "fifth": ((0.0, 0), (0.0, 1), (0.0, 2), (a, 0), (a, 1)),
        }[self.value]

    @property
    def count(self) -> int:
        return len(self.conditions())


def _third_a(a: Fraction):
    t, s = BiPoly.t(), BiPoly.s()
    lower = s * (t * t / a - 2 * t + s) / 2
    upper = t * t * (s / a - 1) / 2
    return lower, upper


def _third_b(a: Fraction):
    t, s = BiPoly.t(), BiPoly.s()
    # the printed lower piece lacks the leading factor s; without it G is discontinuous at s = t
    lower = -s * (1 - t) * (2 * t - t * s - s) / 2
    upper = -(t * t) * (1 - s) ** 2 / 2
    return lower, upper


def _third_c(a: Fraction):
    t, s = BiPoly.t(), BiPoly.s()
    lower = s * s * (t - 1) ** 2 / 2
    upper = t * (s - 1) * (s * t - 2 * s + t) / 2
    return lower, upper


def _fourth_clamped(a: Fraction):
    t, s = BiPoly.t(), BiPoly.s()
    lower = s * s * (t - 1) ** 2 * (3 * t - s - 2 * t * s) / 6
    upper = t * t * (s - 1) ** 2 * (3 * s - t - 2 * t * s) / 6
    return lower, upper


def _fifth(a: Fraction):
    t, s = BiPoly.t(), BiPoly.s()
    s2, t2 = s * s, t * t
    lower = s2 * (t - 1) ** 2 * (3 * s2 * t2 + 2 * s2 * t + s2 - 8 * s * t2 - 4 * s * t + 6 * t2) / 24
    upper = (s - 1) ** 3 * t**3 * (t - 4 * s + 3 * t * s) / 24
    return lower, upper


_BUILDERS = {
    (3, BcFamily.THIRD_A): _third_a,
    (3, BcFamily.THIRD_B): _third_b,
    (3, BcFamily.THIRD_C): _third_c,
    (4, BcFamily.FOURTH_CLAMPED): _fourth_clamped,
    (5, BcFamily.FIFTH): _fifth,
}

SUPPORTED = tuple(_BUILDERS)


class Side(enum.Enum):
    LOWER = "lower"
    UPPER = "upper"


@dataclass(frozen=True, eq=False)
class GreenKernel:
    equation_order: int
    bc_family: BcFamily
    kernel: PiecewisePoly2
    s_derivatives: tuple = field(repr=False)  # ((lower_k, upper_k) for k = 0..MAX_S_DERIVATIVE)

    @property
    def interval_length(self) -> float:
        return self.kernel.interval_length

    def __call__(self, t, s):
        return self.kernel(t, s)

    def piece(self, k: int, side: Side) -> BiPoly:
        if k < 0 or k > MAX_S_DERIVATIVE:
            raise DerivativeOrderTooHigh(f"s-derivative order {k} not in [0, {MAX_S_DERIVATIVE}]")
        lower, upper = self.s_derivatives[k]
        return lower if Side(side) is Side.LOWER else upper

    def s_derivative(self, k: int, t, s, side=None):
        """k-th s-partial; ``side`` picks the piece, otherwise chosen by s <= t."""
        self.kernel.check_domain(t, s)
        if side is not None:
            return self.piece(k, side)(t, s)
        lower, upper = self.piece(k, Side.LOWER), self.piece(k, Side.UPPER)
        t, s = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(s, dtype=float))
        out = np.where(s <= t, lower(t, s), upper(t, s))
        return out if out.ndim else float(out)

    def jump(self, k: int) -> BiPoly:
        """Upper minus lower k-th s-derivative on the diagonal, as a polynomial in t."""
        return self._jumps[k]

    @cached_property
    def _jumps(self):
        return tuple((up.on_diagonal() - lo.on_diagonal()) for lo, up in self.s_derivatives)

    @cached_property
    def _endpoint_traces(self):
        a = _frac(self.interval_length)
        left = tuple(lo.subs_s(0) for lo, _ in self.s_derivatives)
        right = tuple(up.subs_s(a) for _, up in self.s_derivatives)
        return left, right

    def left_trace(self, k: int) -> BiPoly:
        """k-th s-derivative of the lower piece at s = 0, as a polynomial in t."""
        return self._endpoint_traces[0][k]

    def right_trace(self, k: int) -> BiPoly:
        """k-th s-derivative of the upper piece at s = a, as a polynomial in t."""
        return self._endpoint_traces[1][k]

    def vanishes_at(self, t) -> bool:
        """True when G(t, .) is identically zero (checked exactly)."""
        tv = _frac(t)
        return all(
            BiPoly({(0, j): c * tv**i for (i, j), c in piece.coeffs.items()}).is_zero()
            for piece in (self.kernel.lower, self.kernel.upper)
        )

    def integrate_against(self, psi_coeffs, t) -> float:
        """Exact ∫_0^a G(t, s) ψ(s) ds for polynomial ψ (ascending coefficients)."""
        return float(self.apply_exact(psi_coeffs).exact(t))

    def apply_exact(self, psi_coeffs) -> BiPoly:
        """Polynomial in t equal to ∫_0^a G(t, s) ψ(s) ds for polynomial ψ."""
        a = _frac(self.interval_length)
        psi = BiPoly({(0, j): c for j, c in enumerate(psi_coeffs)})
        lo = (self.kernel.lower * psi).integrate_s()
        up = (self.kernel.upper * psi).integrate_s()
        return lo.on_diagonal() + up.subs_s(a) - up.on_diagonal()


def build_green_kernel(order: int, family, interval_length=1.0) -> GreenKernel:
    family = BcFamily.parse(family)
    key = (int(order), family)
    if key not in _BUILDERS:
        raise UnsupportedFamily(f"no kernel for order {order} with family {family.value}")
    if not np.isfinite(interval_length) or interval_length <= 0:
        raise BadInterval(f"interval length must be positive, got {interval_length}")
    if family is not BcFamily.THIRD_A and interval_length != 1:
        raise BadInterval(f"family {family.value} is only available on [0, 1]")
    a = _frac(interval_length)
    lower, upper = _BUILDERS[key](a)
    derivs = tuple((lower.diff_s(k), upper.diff_s(k)) for k in range(MAX_S_DERIVATIVE + 1))
    return GreenKernel(
        equation_order=int(order),
        bc_family=family,
        kernel=PiecewisePoly2(lower, upper, float(interval_length)),
        s_derivatives=derivs,
    )


def kernel_s_derivative(kernel: GreenKernel, order_k: int, t: float, s: float, side) -> float:
    return kernel.s_derivative(order_k, t, s, Side(side))


@dataclass(frozen=True)
class BoundaryPoly:
    """Degree m-1 polynomial g(t) carrying the inhomogeneous boundary data."""

    coefficients: np.ndarray  # ascending powers

    def __call__(self, t, k: int = 0):
        c = self.coefficients
        if k:
            c = np.polynomial.polynomial.polyder(c, k)
        out = np.polynomial.polynomial.polyval(np.asarray(t, dtype=float), c)
        return out if np.ndim(out) else float(out)

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1


def build_boundary_poly(order: int, family, values, interval_length=1.0) -> BoundaryPoly:
    family = BcFamily.parse(family)
    if (int(order), family) not in _BUILDERS:
        raise UnsupportedFamily(f"no boundary polynomial for order {order} with family {family.value}")
    values = np.asarray(values, dtype=float)
    conds = family.conditions(float(interval_length))
    if values.shape != (len(conds),):
        raise ValueError(f"family {family.value} takes {len(conds)} boundary values, got {values.size}")
    m = int(order)
    system = np.zeros((m, m))
    for row, (point, k) in enumerate(conds):
        for p in range(k, m):
            system[row, p] = factorial(p) / factorial(p - k) * point ** (p - k)
    if abs(np.linalg.det(system)) < 1e-12:
        raise SingularBcSystem(f"boundary functionals of {family.value} are linearly dependent")
    return BoundaryPoly(np.linalg.solve(system, values))


def validate_kernel(order: int, family, trials: int = 20, seed: int = 0, samples: int = 100) -> dict:
    """Residual oracle and continuity check for a supported kernel on [0, 1].

    For random cubic ψ and random boundary data, u = g + ∫ G ψ is formed by
    exact polynomial integration; the report holds the worst residual of
    u^(m) = ψ, of the boundary conditions and of continuity at s = t.
    """
    kernel = build_green_kernel(order, family)
    family = kernel.bc_family
    rng = np.random.default_rng(seed)
    t = np.linspace(0.0, 1.0, samples)
    equation = boundary = 0.0
    for _ in range(trials):
        psi = [Fraction(float(c)) for c in rng.uniform(-1.0, 1.0, 4)]
        values = rng.uniform(-1.0, 1.0, family.count)
        g = build_boundary_poly(order, family, values)
        integral = kernel.apply_exact(psi)
        u_m = integral.diff_t(order)
        equation = max(equation, float(np.max(np.abs(u_m(t) - np.polynomial.polynomial.polyval(t, [float(c) for c in psi])))))
        for (point, k), value in zip(family.conditions(1.0), values):
            got = float(integral.diff_t(k).exact(point)) + g(point, k)
            boundary = max(boundary, float(abs(got - value)))
    lower, upper = kernel.kernel.lower, kernel.kernel.upper
    continuity = float(np.max(np.abs(lower(t, t) - upper(t, t))))
    return {
        "order": int(order),
        "family": family.value,
        "equation_residual": equation,
        "bc_residual": boundary,
        "continuity": continuity,
        "passed": equation <= 1e-10 and boundary <= 1e-12 and continuity <= 1e-13,
    }
