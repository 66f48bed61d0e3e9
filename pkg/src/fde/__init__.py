"""High-order Green-function solvers for functional differential BVPs."""

__version__ = "0.1.0"

from .errors import FdeError
from .kernels import BcFamily, GreenKernel, build_boundary_poly, build_green_kernel, kernel_s_derivative
from .quadrature import GridFunction, Level, QuadratureOperator, UniformGrid, corrected_integral, operator_row, trapezoid
from .solver import BvpProblem, SolverConfig, SolveReport, contraction_check, estimate_M0, solve
from .problems import builtin, load_problem
from .harness import compare_reference, emit_table, run_convergence

__all__ = [
    "BcFamily",
    "BvpProblem",
    "FdeError",
    "GreenKernel",
    "GridFunction",
    "Level",
    "QuadratureOperator",
    "SolveReport",
    "SolverConfig",
    "UniformGrid",
    "build_boundary_poly",
    "build_green_kernel",
    "builtin",
    "compare_reference",
    "contraction_check",
    "corrected_integral",
    "emit_table",
    "estimate_M0",
    "kernel_s_derivative",
    "load_problem",
    "operator_row",
    "run_convergence",
    "solve",
    "trapezoid",
]
