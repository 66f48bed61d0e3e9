"""Discrete fixed-point iteration for u^(m) = f(t, u(t), u(φ(t))).

Each sweep reconstructs U = g + L(G, t_i) Ψ and V = g(ξ_i) + L(G, ξ_i) Ψ with
ξ_i = φ(t_i) and updates Ψ <- f(t, U, V).  The quadrature rows are assembled
once per solve, so a sweep is two matrix-vector products and one evaluation
of f on the grid.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import MissingLipschitz, NoConvergence, NonFiniteIterate, PhiOutOfRange, UnsupportedFamily
from .kernels import BcFamily, GreenKernel, build_boundary_poly, build_green_kernel
from .quadrature import OFFGRID_JUMPS, GridFunction, Level, QuadratureOperator, UniformGrid

log = logging.getLogger(__name__)

STALL_FLOOR = 1e-13


@dataclass
class BvpProblem:
    order: int
    interval_length: float
    rhs: Callable  # f(t, u, v), vectorised over numpy arrays
    phi: Callable  # deviation t -> φ(t)
    bc_family: BcFamily
    bc_values: tuple
    exact: Optional[Callable] = None
    lipschitz: Optional[tuple] = None
    name: str = ""
    spec: object = field(default=None, repr=False, compare=False)
    note: str = ""

    def __post_init__(self):
        self.bc_family = BcFamily.parse(self.bc_family)
        self.bc_values = tuple(float(v) for v in self.bc_values)
        if self.bc_family.order != self.order:
            raise UnsupportedFamily(f"family {self.bc_family.value} is for order {self.bc_family.order}, not {self.order}")
        if len(self.bc_values) != self.bc_family.count:
            raise ValueError(
                f"family {self.bc_family.value} takes {self.bc_family.count} boundary values, "
                f"got {len(self.bc_values)}"
            )
        if self.lipschitz is not None:
            self.lipschitz = tuple(float(v) for v in self.lipschitz)
        self.check_phi()

    def check_phi(self, samples: int = 1000):
        a = self.interval_length
        t = np.linspace(0.0, a, samples)
        xi = np.broadcast_to(np.asarray(self.phi(t), dtype=float), t.shape)
        tol = 1e-12 * max(1.0, a)
        bad = ~np.isfinite(xi) | (xi < -tol) | (xi > a + tol)
        if np.any(bad):
            i = int(np.argmax(bad))
            raise PhiOutOfRange(f"deviation maps t={t[i]:.6g} to {xi[i]!r}, outside [0, {a}]")


@dataclass(frozen=True)
class SolverConfig:
    level: Level = Level.P2
    n: int = 8
    tol: float = 1e-14
    max_iter: int = 200
    offgrid_jump: str = "standard"

    def __post_init__(self):
        object.__setattr__(self, "level", Level.parse(self.level))
        if self.offgrid_jump not in OFFGRID_JUMPS:
            raise ValueError(f"offgrid_jump must be one of {OFFGRID_JUMPS}")
        if not self.tol >= 1e-16:
            raise ValueError("tol must be at least 1e-16")
        if self.max_iter < 1:
            raise ValueError("max_iter must be positive")


@dataclass
class SolveReport:
    U: GridFunction
    Psi: GridFunction
    iterations: int
    update_history: list
    converged: bool
    roundoff_stall: bool = False
    max_error: Optional[float] = None
    diagnostics: dict = field(default_factory=dict)

    @property
    def nodes(self) -> np.ndarray:
        return self.U.grid.nodes


@dataclass
class Discretization:
    """Precomputed quadrature rows and boundary data for one (problem, n, level)."""

    grid: UniformGrid
    t: np.ndarray
    xi: np.ndarray
    g_t: np.ndarray
    g_xi: np.ndarray
    A: np.ndarray
    B: np.ndarray

    def reconstruct(self, psi: np.ndarray):
        return self.g_t + self.A @ psi, self.g_xi + self.B @ psi


def discretize(problem: BvpProblem, config: SolverConfig, kernel: GreenKernel | None = None) -> Discretization:
    kernel = kernel or build_green_kernel(problem.order, problem.bc_family, problem.interval_length)
    g = build_boundary_poly(problem.order, problem.bc_family, problem.bc_values, problem.interval_length)
    grid = UniformGrid(config.n, problem.interval_length)
    op = QuadratureOperator(kernel, grid, config.level, config.offgrid_jump)
    t = grid.nodes
    xi = np.clip(np.broadcast_to(np.asarray(problem.phi(t), dtype=float), t.shape), 0.0, grid.interval_length)
    return Discretization(grid, t, xi, g(t), g(xi), op.matrix(t), op.matrix(xi))


def _evaluate_rhs(problem: BvpProblem, t, u, v) -> np.ndarray:
    out = np.broadcast_to(np.asarray(problem.rhs(t, u, v), dtype=float), t.shape).copy()
    bad = ~np.isfinite(out)
    if np.any(bad):
        i = int(np.argmax(bad))
        raise NonFiniteIterate(f"right-hand side is {out[i]} at node {i} (t={t[i]:.6g})", node=i)
    return out


def solve(problem: BvpProblem, config: SolverConfig | None = None, kernel: GreenKernel | None = None) -> SolveReport:
    config = config or SolverConfig()
    kernel = kernel or build_green_kernel(problem.order, problem.bc_family, problem.interval_length)
    disc = discretize(problem, config, kernel)
    t = disc.t
    zeros = np.zeros_like(t)

    psi = _evaluate_rhs(problem, t, zeros, zeros)
    history: list = []
    converged = stalled = False
    U = V = None
    for _ in range(config.max_iter):
        U, V = disc.reconstruct(psi)
        psi_next = _evaluate_rhs(problem, t, U, V)
        update = float(np.max(np.abs(psi_next - psi)))
        history.append(update)
        psi = psi_next
        if update <= config.tol:
            converged = True
            break
        if len(history) >= 3 and history[-1] < STALL_FLOOR and history[-1] >= history[-2] >= history[-3]:
            converged = stalled = True
            break

    if not converged:
        raise NoConvergence(
            f"no convergence after {config.max_iter} iterations; last updates {history[-3:]}",
            last_updates=history[-3:],
        )

    report = SolveReport(
        U=GridFunction(disc.grid, U),
        Psi=GridFunction(disc.grid, psi),
        iterations=len(history),
        update_history=history,
        converged=converged,
        roundoff_stall=stalled,
    )
    if problem.exact is not None:
        exact = np.broadcast_to(np.asarray(problem.exact(t), dtype=float), t.shape)
        report.max_error = float(np.max(np.abs(U - exact)))
    report.diagnostics["d"] = history[0]
    if problem.lipschitz is not None:
        check = contraction_check(problem, kernel)
        q = check["q"]
        report.diagnostics.update(check)
        if q < 1:
            k = len(history)
            report.diagnostics["a_priori_bound"] = check["M0"] * q**k / (1 - q) * history[0]
    log.debug("solve %s n=%d level=%s K=%d", problem.name, config.n, config.level.name, len(history))
    return report


def _abs_integral(coeffs: np.ndarray, lo: float, hi: float) -> float:
    """Exact ∫_lo^hi |p(s)| ds, splitting at the real roots of p."""
    if hi <= lo:
        return 0.0
    poly = np.polynomial.Polynomial(coeffs)
    cuts = [lo, hi]
    if poly.degree() > 0:
        for r in poly.roots():
            if abs(r.imag) < 1e-12 and lo < r.real < hi:
                cuts.append(r.real)
    cuts.sort()
    anti = poly.integ()
    return float(sum(abs(anti(b) - anti(c)) for c, b in zip(cuts[:-1], cuts[1:])))


def _s_coeffs(piece, t: float) -> np.ndarray:
    c = piece.float_coeffs
    return np.polynomial.polynomial.polyval(t, c)  # coefficients in s for fixed t


def abs_kernel_integral(kernel: GreenKernel, t: float) -> float:
    """∫_0^a |G(t, s)| ds computed piecewise exactly."""
    a = kernel.interval_length
    lower, upper = kernel.kernel.lower, kernel.kernel.upper
    return _abs_integral(_s_coeffs(lower, t), 0.0, t) + _abs_integral(_s_coeffs(upper, t), t, a)


def estimate_M0(kernel: GreenKernel, resolution: int = 256) -> float:
    """max_t ∫_0^a |G(t, s)| ds: sampled on ``resolution`` points, refined by Brent/golden search."""
    if resolution < 64:
        raise ValueError("resolution must be >= 64")
    a = kernel.interval_length
    ts = np.linspace(0.0, a, resolution + 1)
    vals = np.array([abs_kernel_integral(kernel, t) for t in ts])
    i = int(np.argmax(vals))
    best = vals[i]
    lo, hi = ts[max(i - 1, 0)], ts[min(i + 1, resolution)]
    if hi > lo:
        res = minimize_scalar(
            lambda x: -abs_kernel_integral(kernel, x), bounds=(lo, hi), method="bounded",
            options={"xatol": 1e-12},
        )
        best = max(best, -float(res.fun))
    return float(best)


def contraction_check(problem: BvpProblem, kernel: GreenKernel | None = None) -> dict:
    """q = (L1 + L2) M0 and whether it is below one (advisory)."""
    if problem.lipschitz is None:
        raise MissingLipschitz(f"problem {problem.name or '<unnamed>'} has no Lipschitz constants")
    kernel = kernel or build_green_kernel(problem.order, problem.bc_family, problem.interval_length)
    l1, l2 = problem.lipschitz
    m0 = estimate_M0(kernel)
    q = (l1 + l2) * m0
    return {"q": q, "satisfied": bool(q < 1), "M0": m0}


def fixed_point_residual(problem: BvpProblem, config: SolverConfig, psi: np.ndarray) -> float:
    """‖F(Ψ) - Ψ‖_∞ for the discrete map F at a given Ψ."""
    disc = discretize(problem, config)
    U, V = disc.reconstruct(psi)
    return float(np.max(np.abs(_evaluate_rhs(problem, disc.t, U, V) - psi)))


def observed_order(e_coarse: float, e_fine: float, ratio: float = 2.0) -> float:
    if e_coarse <= 0 or e_fine <= 0:
        return math.nan
    return math.log(e_coarse / e_fine) / math.log(ratio)
