"""Finite-difference stencils on a uniform grid.

Weights come from the moment (Vandermonde) system solved in exact rational
arithmetic, so every stencil is exact on polynomials of degree below its
node count.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial

import numpy as np

from .errors import GridTooSmall, IndexOutOfRange

INTERIOR = "interior"
LEFT = "left"
RIGHT = "right"


@dataclass(frozen=True)
class Stencil:
    derivative_order: int
    accuracy_order: int
    offsets: tuple
    weights: tuple  # unscaled; divide by h**derivative_order

    @property
    def exact_weights(self) -> tuple:
        return _solve_weights(self.offsets, self.derivative_order)

    def __len__(self):
        return len(self.offsets)


def _solve_weights(offsets, m):
    """Solve sum_j w_j * o_j**p / p! = [p == m] for p < len(offsets)."""
    size = len(offsets)
    rows = [[Fraction(o) ** p / factorial(p) for o in offsets] + [Fraction(int(p == m))] for p in range(size)]
    for col in range(size):
        pivot = next(r for r in range(col, size) if rows[r][col] != 0)
        rows[col], rows[pivot] = rows[pivot], rows[col]
        inv = 1 / rows[col][col]
        rows[col] = [v * inv for v in rows[col]]
        for r in range(size):
            if r != col and rows[r][col] != 0:
                f = rows[r][col]
                rows[r] = [v - f * p for v, p in zip(rows[r], rows[col])]
    return tuple(row[-1] for row in rows)


@lru_cache(maxsize=None)
def make_stencil(m: int, k: int, position: str = INTERIOR, offset: int = 0) -> Stencil:
    """Stencil for the m-th derivative with O(h^k) accuracy.

    ``position`` is ``"interior"`` (centred nodes) or ``"left"``/``"right"``,
    in which case ``offset`` is the distance from the target node to the
    nearest boundary node of the m + k node one-sided window.
    """
    if m < 1:
        raise ValueError("derivative order must be >= 1")
    if k < 1 or k % 2:
        raise ValueError("accuracy order must be a positive even integer")
    if position == INTERIOR:
        half = (m - 1) // 2 + k // 2
        offsets = tuple(range(-half, half + 1))
    elif position == LEFT:
        offsets = tuple(range(-offset, m + k - offset))
    elif position == RIGHT:
        offsets = tuple(range(offset - (m + k - 1), offset + 1))
    else:
        raise ValueError(f"unknown stencil position {position!r}")
    exact = _solve_weights(offsets, m)
    # zero weights (e.g. the centre of a first-derivative stencil) are dropped
    kept = [(o, w) for o, w in zip(offsets, exact) if w != 0]
    return Stencil(m, k, tuple(o for o, _ in kept), tuple(float(w) for _, w in kept))


def stencil_at(m: int, k: int, node: int, n: int) -> Stencil:
    """Canonical stencil for 0-based ``node`` on a grid with nodes 0..n."""
    if n + 1 < m + k:
        raise GridTooSmall(f"grid with {n + 1} nodes cannot hold an {m + k}-node stencil")
    half = (m - 1) // 2 + k // 2
    if node - half >= 0 and node + half <= n:
        return make_stencil(m, k, INTERIOR)
    if node - half < 0:
        return make_stencil(m, k, LEFT, node)
    return make_stencil(m, k, RIGHT, n - node)


def apply_stencil(stencil: Stencil, psi, node_index: int, h: float | None = None) -> float:
    """Sum of weights * psi[node + offset] / h**m.

    ``psi`` is a GridFunction, or a plain array when ``h`` is given.
    """
    if h is None:
        h = psi.grid.h
        values = psi.values
    else:
        values = np.asarray(psi, dtype=float)
    idx = node_index + np.asarray(stencil.offsets)
    if idx.min() < 0 or idx.max() >= len(values):
        raise IndexOutOfRange(f"stencil at node {node_index} leaves the grid")
    return float(np.dot(stencil.weights, values[idx]) / h**stencil.derivative_order)
