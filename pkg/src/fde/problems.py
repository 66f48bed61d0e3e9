"""Problem definitions: the .fde text format and the built-in example registry.

A problem file is line oriented ``key = value``; ``#`` starts a comment.
Required keys are order, interval, rhs, phi, bc_family and bc; name, exact,
lipschitz and note are optional.  See ``dump_problem`` for the canonical form.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import FdeError, ProblemFileError, UnknownProblem, UnsupportedFamily
from .expr import Expr
from .findiff import make_stencil
from .kernels import BcFamily
from .solver import BvpProblem

log = logging.getLogger(__name__)

BUILTIN_NAMES = (
    "ex4_1", "ex4_2", "ex4_3", "ex4_4", "ex4_5", "ex4_6", "ex5_1", "ex5_2", "ex7_1", "ex7_2",
)
_REQUIRED = ("order", "interval", "rhs", "phi", "bc_family", "bc")
_OPTIONAL = ("name", "exact", "lipschitz", "note")
_KEY_ORDER = ("name", "order", "interval", "rhs", "phi", "bc_family", "bc", "exact", "lipschitz", "note")

RESIDUAL_TOL = 1e-6


@dataclass(frozen=True)
class ProblemSpec:
    order: int
    interval: float
    rhs: Expr
    phi: Expr
    bc_family: BcFamily
    bc: tuple  # Expr constants
    exact: Optional[Expr] = None
    lipschitz: Optional[tuple] = None
    name: str = ""
    note: str = ""

    @property
    def bc_values(self) -> tuple:
        return tuple(float(b()) for b in self.bc)

    def to_problem(self) -> BvpProblem:
        rhs, phi, exact = self.rhs, self.phi, self.exact
        return BvpProblem(
            order=self.order,
            interval_length=self.interval,
            rhs=lambda t, u, v: rhs(t, u, v),
            phi=lambda t: phi(t),
            bc_family=self.bc_family,
            bc_values=self.bc_values,
            exact=(lambda t: exact(t)) if exact is not None else None,
            lipschitz=self.lipschitz,
            name=self.name,
            spec=self,
            note=self.note,
        )


def _split_list(text: str) -> list:
    return [part.strip() for part in text.split(",")]


def _parse_interval(text: str) -> float:
    body = text.strip()
    if body.startswith("[") and body.endswith("]"):
        parts = _split_list(body[1:-1])
        if len(parts) != 2 or Expr(parts[0], ())() != 0:
            raise ValueError("interval must be [0, a]")
        body = parts[1]
    return float(Expr(body, ())())


def parse_problem(text: str) -> ProblemSpec:
    """Parse .fde text into a ProblemSpec (no solver-level checks)."""
    entries: dict = {}
    lines: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ProblemFileError("expected 'key = value'", lineno)
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _REQUIRED and key not in _OPTIONAL:
            raise ProblemFileError(f"unknown key {key!r}", lineno)
        if key in entries:
            raise ProblemFileError(f"duplicate key {key!r}", lineno)
        if not value:
            raise ProblemFileError(f"empty value for {key!r}", lineno)
        entries[key] = value
        lines[key] = lineno
    for key in _REQUIRED:
        if key not in entries:
            raise ProblemFileError(f"missing required key {key!r}")

    def field(key, convert):
        try:
            return convert(entries[key])
        except (ProblemFileError, UnsupportedFamily):
            raise
        except (FdeError, ValueError) as exc:
            raise ProblemFileError(f"{key}: {exc}", lines[key]) from exc

    order = field("order", int)
    bc_family = field("bc_family", BcFamily.parse)
    exact = field("exact", lambda s: Expr(s, ("t",))) if "exact" in entries else None
    lipschitz = None
    if "lipschitz" in entries:
        lipschitz = field("lipschitz", lambda s: tuple(float(x) for x in _split_list(s)))
        if len(lipschitz) != 2:
            raise ProblemFileError("lipschitz takes two values", lines["lipschitz"])
    return ProblemSpec(
        order=order,
        interval=field("interval", _parse_interval),
        rhs=field("rhs", lambda s: Expr(s, ("t", "u", "v"))),
        phi=field("phi", lambda s: Expr(s, ("t",))),
        bc_family=bc_family,
        bc=field("bc", lambda s: tuple(Expr(x, ()) for x in _split_list(s))),
        exact=exact,
        lipschitz=lipschitz,
        name=entries.get("name", ""),
        note=entries.get("note", ""),
    )


def load_problem(source) -> BvpProblem:
    """Build a BvpProblem from a path or from .fde text.

    Strings containing a newline or an '=' are treated as text.
    """
    if isinstance(source, Path) or ("\n" not in str(source) and "=" not in str(source)):
        path = Path(source)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise ProblemFileError(f"cannot read {path}: {exc.strerror}") from exc
        spec = parse_problem(text)
        if not spec.name:
            spec = replace(spec, name=path.stem)
    else:
        spec = parse_problem(source)
    return spec.to_problem()


def dump_problem(spec: ProblemSpec) -> str:
    values = {
        "name": spec.name or None,
        "order": str(spec.order),
        "interval": repr(spec.interval),
        "rhs": spec.rhs.source,
        "phi": spec.phi.source,
        "bc_family": spec.bc_family.value,
        "bc": ", ".join(b.source for b in spec.bc),
        "exact": spec.exact.source if spec.exact is not None else None,
        "lipschitz": ", ".join(repr(x) for x in spec.lipschitz) if spec.lipschitz else None,
        "note": spec.note or None,
    }
    return "".join(f"{key} = {values[key]}\n" for key in _KEY_ORDER if values[key] is not None)


# --- consistency of a problem with its own exact solution -------------------

_FD_STEP = 0.03
_FD_ACCURACY = 8


def _derivative(func, t, m: int) -> np.ndarray:
    """m-th derivative of a smooth callable by a wide central difference."""
    if m == 0:
        return np.asarray(func(t), dtype=float)
    st = make_stencil(m, _FD_ACCURACY)
    out = np.zeros_like(t)
    for o, w in zip(st.offsets, st.weights):
        out += w * np.asarray(func(t + o * _FD_STEP), dtype=float)
    return out / _FD_STEP**m


def residual(problem: BvpProblem, samples: int = 50) -> dict:
    """Residuals of the exact solution in the equation and boundary conditions."""
    if problem.exact is None:
        raise ValueError(f"problem {problem.name!r} has no exact solution")
    a = problem.interval_length
    t = np.linspace(0.0, a, samples)
    u = problem.exact
    lhs = _derivative(u, t, problem.order)
    xi = np.broadcast_to(np.asarray(problem.phi(t), dtype=float), t.shape)
    with np.errstate(all="ignore"):
        rhs = np.broadcast_to(np.asarray(problem.rhs(t, u(t), u(xi)), dtype=float), t.shape)
    equation = float(np.max(np.abs(lhs - rhs)))
    bc = 0.0
    for (point, k), value in zip(problem.bc_family.conditions(a), problem.bc_values):
        got = float(_derivative(u, np.array([point]), k)[0])
        bc = max(bc, abs(got - value))
    if not np.isfinite(equation):
        equation = float("inf")
    return {"equation": equation, "bc": bc}


def passes_residual(problem: BvpProblem, tol: float = RESIDUAL_TOL) -> bool:
    res = residual(problem)
    return res["equation"] <= tol and res["bc"] <= tol


# --- built-in registry ------------------------------------------------------

# Readings tried in turn for ex4_6, whose printed right-hand side is garbled.
# The first one consistent with the exact solution is used.
_EX4_6_READINGS = (
    ("printed coefficient, u(t/2)", "-2/3*u - 1/(3*exp(-0.5*t))*v", "t/2"),
    ("printed coefficient, u(1/2)", "-2/3*u - 1/(3*exp(-0.5*t))*v", "1/2"),
    ("coefficient exp(-t/2)/3, u(t/2)", "-2/3*u - exp(-0.5*t)/3*v", "t/2"),
)


def bundled_path(name: str) -> Path:
    return Path(str(resources.files("fde") / "data" / f"{name}.fde"))


def _select_reading(spec: ProblemSpec) -> ProblemSpec:
    for label, rhs, phi in _EX4_6_READINGS:
        candidate = replace(spec, rhs=Expr(rhs), phi=Expr(phi, ("t",)), note=f"reading: {label}")
        if passes_residual(candidate.to_problem()):
            log.info("ex4_6: using reading %r", label)
            return candidate
    raise FdeError("no reading of ex4_6 is consistent with its exact solution")


@lru_cache(maxsize=None)
def builtin_spec(name: str) -> ProblemSpec:
    if name not in BUILTIN_NAMES:
        raise UnknownProblem(f"unknown problem {name!r}; known: {', '.join(BUILTIN_NAMES)}")
    spec = parse_problem(bundled_path(name).read_text(encoding="utf-8"))
    if name == "ex4_6":
        spec = _select_reading(spec)
    return spec


def builtin(name: str) -> BvpProblem:
    return builtin_spec(name).to_problem()


def resolve(name_or_path) -> BvpProblem:
    """A built-in name, else a path to a .fde file."""
    if str(name_or_path) in BUILTIN_NAMES:
        return builtin(str(name_or_path))
    path = Path(name_or_path)
    if not path.exists():
        raise UnknownProblem(f"{name_or_path!r} is neither a built-in problem nor a file")
    return load_problem(path)


__all__ = [
    "BUILTIN_NAMES",
    "ProblemSpec",
    "builtin",
    "builtin_spec",
    "bundled_path",
    "dump_problem",
    "load_problem",
    "parse_problem",
    "passes_residual",
    "residual",
    "resolve",
]
