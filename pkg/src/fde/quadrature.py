"""Corrected trapezoidal operators approximating x -> ∫_0^a G(x, s) ψ(s) ds.

The corrections are Euler-Maclaurin endpoint terms plus diagonal-jump terms
at s = x.  Each derivative of Φ(s) = G(x, s) ψ(s) is expanded with the
Leibniz rule: kernel factors are exact polynomial derivatives, ψ factors are
finite-difference functionals on the grid.  Every operator is linear in ψ, so
it is assembled once as a weight row and applied as a dot product.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property
from math import comb, floor

import numpy as np

from .errors import GridTooSmall, OutOfDomain
from .findiff import stencil_at
from .kernels import GreenKernel, Side

# B_{2l} / (2l)! for l = 1, 2, 3
BERNOULLI_FACTORS = {1: 1.0 / 12.0, 2: -1.0 / 720.0, 3: 1.0 / 30240.0}

_NODE_SNAP = 1e-9


class Level(enum.IntEnum):
    """Number p of Euler-Maclaurin levels; accuracy is O(h^(2p))."""

    PLAIN = 1
    P2 = 2
    P3 = 3
    P4 = 4

    @classmethod
    def parse(cls, value) -> "Level":
        if isinstance(value, cls):
            return value
        aliases = {"plain": 1, "p2": 2, "p4": 2, "p3": 3, "p6": 3, "p8": 4,
                   "method1": 2, "method2": 3, "method3": 4}
        if isinstance(value, str):
            key = value.strip().lower().replace(" ", "").replace("_", "")
            if key in aliases:
                return cls(aliases[key])
            raise ValueError(f"unknown quadrature level {value!r}")
        return cls(int(value))

    @property
    def accuracy(self) -> int:
        return 2 * int(self)


@dataclass(frozen=True)
class UniformGrid:
    n: int
    interval_length: float = 1.0

    def __post_init__(self):
        if self.n < 4:
            raise GridTooSmall(f"grid needs n >= 4 intervals, got {self.n}")
        if not self.interval_length > 0:
            raise OutOfDomain("interval length must be positive")

    @property
    def h(self) -> float:
        return self.interval_length / self.n

    @cached_property
    def nodes(self) -> np.ndarray:
        nodes = np.arange(self.n + 1) * self.h
        nodes[-1] = self.interval_length
        return nodes

    @cached_property
    def weights(self) -> np.ndarray:
        rho = np.ones(self.n + 1)
        rho[0] = rho[-1] = 0.5
        return self.h * rho

    def node_index(self, x: float):
        """0-based index of the node equal to x, or None when x is off-grid."""
        r = x / self.h
        i = round(r)
        if abs(r - i) <= _NODE_SNAP:
            return int(i)
        return None

    def check(self, x: float):
        a = self.interval_length
        if not np.isfinite(x) or x < -1e-12 * a or x > a * (1 + 1e-12):
            raise OutOfDomain(f"evaluation point {x} outside [0, {a}]")


@dataclass(frozen=True)
class GridFunction:
    grid: UniformGrid
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != (self.grid.n + 1,):
            raise ValueError(f"expected {self.grid.n + 1} values, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise ValueError("grid function values must be finite")
        object.__setattr__(self, "values", values)

    @classmethod
    def sample(cls, grid: UniformGrid, func) -> "GridFunction":
        return cls(grid, np.broadcast_to(np.asarray(func(grid.nodes), dtype=float), grid.nodes.shape).copy())


def _stencil_functional(grid: UniformGrid, r: int, k: int, node: int):
    st = stencil_at(r, k, node, grid.n)
    return node + np.asarray(st.offsets), np.asarray(st.weights) / grid.h**r


def _lagrange_functional(grid: UniformGrid, k: int, x: float):
    n, h = grid.n, grid.h
    base = floor(x / h)
    start = min(max(base - k // 2 + 1, 0), n + 1 - k)
    idx = np.arange(start, start + k)
    nodes = idx * h
    w = np.ones(k)
    for j in range(k):
        for i in range(k):
            if i != j:
                w[j] *= (x - nodes[i]) / (nodes[j] - nodes[i])
    return idx, w


def psi_derivative_functional(grid: UniformGrid, r: int, k: int, x: float):
    """Node indices and weights approximating ψ^(r)(x) to O(h^k).

    On a node this is the canonical stencil there.  Off the grid, values
    (r = 0) use local Lagrange interpolation on k nodes and derivatives use
    the Taylor shift ψ^(r)(x) ≈ Σ_j D^(r+j) ψ_m (x - t_m)^j / j! from the
    node t_m just left of x, clamped so that t_m is an interior node.
    """
    node = grid.node_index(x)
    if node is not None:
        if r == 0:
            return np.array([node]), np.array([1.0])
        return _stencil_functional(grid, r, k, node)
    if r == 0:
        return _lagrange_functional(grid, k, x)
    base = min(max(floor(x / grid.h), 1), grid.n - 1)
    delta = x - base * grid.h
    idx_parts, w_parts = [], []
    factor = 1.0
    for j in range(k):
        if j:
            factor *= delta / j
        acc = max(2, k - j + (k - j) % 2)
        idx, w = _stencil_functional(grid, r + j, acc, base)
        idx_parts.append(idx)
        w_parts.append(w * factor)
    return np.concatenate(idx_parts), np.concatenate(w_parts)


def trapezoid(kernel: GreenKernel, grid: UniformGrid, x: float, psi) -> float:
    """Plain composite trapezoid sum of G(x, s) ψ(s)."""
    grid.check(x)
    values = psi.values if isinstance(psi, GridFunction) else np.asarray(psi, dtype=float)
    return float(np.dot(grid.weights * kernel(min(x, grid.interval_length), grid.nodes), values))


def jump_averaged_trapezoid(phi_left, phi_right, grid: UniformGrid, x: float) -> float:
    """Trapezoid sum of a function with a jump at x, averaging both limits at x.

    ``phi_left`` gives Φ on s < x and ``phi_right`` on s > x (both vectorised).
    None of the supported kernels is discontinuous, so the solvers never take
    this path; it is kept for kernels with a genuine jump.
    """
    grid.check(x)
    s = grid.nodes
    vals = np.where(s < x, phi_left(s), phi_right(s))
    node = grid.node_index(x)
    if node is not None:
        vals[node] = 0.5 * (phi_left(s[node]) + phi_right(s[node]))
    return float(np.dot(grid.weights, vals))


OFFGRID_JUMPS = ("standard", "reflected")


class QuadratureOperator:
    """Corrected trapezoid rule L_p(G, x) for a fixed kernel, grid and level.

    ``offgrid_jump`` selects the sign of the diagonal-jump term when x is not
    a node.  ``"standard"`` uses the same sign as on the grid.  ``"reflected"``
    negates it, which is closer to the true off-grid Bernoulli-polynomial
    coefficient at mid-cell points; it is kept for comparison studies.
    """

    def __init__(self, kernel: GreenKernel, grid: UniformGrid, level=Level.P2, offgrid_jump: str = "standard"):
        if offgrid_jump not in OFFGRID_JUMPS:
            raise ValueError(f"offgrid_jump must be one of {OFFGRID_JUMPS}, got {offgrid_jump!r}")
        self.offgrid_jump = offgrid_jump
        if abs(kernel.interval_length - grid.interval_length) > 1e-14:
            raise OutOfDomain("kernel and grid live on different intervals")
        self.kernel = kernel
        self.grid = grid
        self.level = Level.parse(level)
        self._zero_at = {
            x: kernel.vanishes_at(x) for x in (0.0, grid.interval_length)
        }
        p = int(self.level)
        self._terms = []  # (l, j, r, acc, coefficient)
        for l in range(1, p):
            order = 2 * l - 1
            acc = 2 * (p - l)
            coef = -BERNOULLI_FACTORS[l] * grid.h ** (2 * l)
            for j in range(order + 1):
                self._terms.append((l, j, order - j, acc, coef * comb(order, j)))

    def _add(self, row, x, r, acc, weight):
        idx, w = psi_derivative_functional(self.grid, r, acc, x)
        np.add.at(row, idx, weight * w)

    def row(self, x: float) -> np.ndarray:
        grid, kernel = self.grid, self.kernel
        grid.check(x)
        a = grid.interval_length
        x = min(max(float(x), 0.0), a)
        for end, zero in self._zero_at.items():
            if zero and x == end:
                return np.zeros(grid.n + 1)
        row = grid.weights * kernel(x, grid.nodes)
        sign = -1.0 if self.offgrid_jump == "reflected" and grid.node_index(x) is None else 1.0
        for _l, j, r, acc, coef in self._terms:
            right = kernel.right_trace(j)
            if not right.is_zero():
                self._add(row, a, r, acc, coef * right(x))
            left = kernel.left_trace(j)
            if not left.is_zero():
                self._add(row, 0.0, r, acc, -coef * left(x))
            jump = kernel.jump(j)
            if not jump.is_zero():
                self._add(row, x, r, acc, -sign * coef * jump(x))
        return row

    def matrix(self, points) -> np.ndarray:
        return np.vstack([self.row(x) for x in np.asarray(points, dtype=float)])

    def correction_row(self, x: float) -> np.ndarray:
        """Row minus its plain trapezoid part."""
        self.grid.check(x)
        xc = min(max(float(x), 0.0), self.grid.interval_length)
        return self.row(x) - self.grid.weights * self.kernel(xc, self.grid.nodes)

    def __call__(self, x: float, psi) -> float:
        values = psi.values if isinstance(psi, GridFunction) else np.asarray(psi, dtype=float)
        return float(np.dot(self.row(x), values))


def corrected_integral(kernel: GreenKernel, grid: UniformGrid, level, x: float, psi, offgrid_jump="standard") -> float:
    return QuadratureOperator(kernel, grid, level, offgrid_jump)(x, psi)


def operator_row(kernel: GreenKernel, grid: UniformGrid, level, x: float, offgrid_jump="standard") -> np.ndarray:
    return QuadratureOperator(kernel, grid, level, offgrid_jump).row(x)


__all__ = [
    "BERNOULLI_FACTORS",
    "GridFunction",
    "Level",
    "OFFGRID_JUMPS",
    "QuadratureOperator",
    "Side",
    "UniformGrid",
    "corrected_integral",
    "jump_averaged_trapezoid",
    "operator_row",
    "psi_derivative_functional",
    "trapezoid",
]
