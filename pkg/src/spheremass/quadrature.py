"""Adaptive 2-D Gauss-Legendre quadrature on the unit square.

An independent numerical oracle for the exact integrals; never part of the
certified path.  Each square cell is integrated with an ``n x n``
tensor-product Gauss-Legendre rule and with the same rule on its four
dyadic children.  The difference of the two estimates is the cell's error
estimate; the worst cells are split until the summed estimate drops below
the tolerance.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from . import kernels
from .xyfunc import XYRational

__all__ = ["QuadResult", "QuadratureError", "quad_square"]

Integrand = Union[XYRational, Callable[[np.ndarray, np.ndarray], np.ndarray]]


class QuadratureError(RuntimeError):
    """Adaptive refinement ran out of budget before meeting the tolerance."""

    def __init__(self, message: str, value: float, error: float):
        super().__init__(message)
        self.value = value
        self.error = error


@dataclass(frozen=True)
class QuadResult:
    value: float
    error: float
    evaluations: int
    cells: int

    def __float__(self):
        return self.value


def _vectorize(u: Integrand):
    if isinstance(u, XYRational):
        mons = list(u.monomials())
        ex = np.array([a for _, a, _ in mons], dtype=np.int64)
        ey = np.array([b for _, _, b in mons], dtype=np.int64)
        coef = np.array([float(c) for c, _, _ in mons], dtype=np.float64)
        k = u.k
        return lambda xs, ys: kernels.eval_monomials(xs, ys, ex, ey, coef, k)
    return u


class _Rule:
    def __init__(self, order: int):
        t, w = np.polynomial.legendre.leggauss(order)
        self.t = (t + 1.0) / 2.0
        self.w = w / 2.0
        self.w2 = np.outer(self.w, self.w)

    def integrate(self, fn, x0, y0, h):
        """Integrals over the cells ``[x0, x0+h] x [y0, y0+h]`` (arrays)."""
        xs = x0[:, None, None] + h[:, None, None] * self.t[None, :, None]
        ys = y0[:, None, None] + h[:, None, None] * self.t[None, None, :]
        xs, ys = np.broadcast_arrays(xs, ys)
        vals = np.asarray(fn(xs, ys), dtype=np.float64)
        return (vals * self.w2).sum(axis=(1, 2)) * h * h


def _children(x0, y0, h):
    h2 = h / 2.0
    cx = np.concatenate([x0, x0 + h2, x0, x0 + h2])
    cy = np.concatenate([y0, y0, y0 + h2, y0 + h2])
    ch = np.concatenate([h2, h2, h2, h2])
    return cx, cy, ch


def quad_square(
    u: Integrand,
    tol: float = 1e-9,
    *,
    order: int = 8,
    max_cells: int = 200_000,
) -> QuadResult:
    """Integrate ``u`` over ``[0, 1]^2`` to an estimated absolute error ``tol``.

    Parameters
    ----------
    u : XYRational or callable
        A callable must accept broadcastable float arrays ``(x, y)``.
    tol : float
        Target absolute error; must be at least ``1e-12``.
    order : int
        Gauss-Legendre points per axis in each cell.
    max_cells : int
        Refinement budget; exceeding it raises :class:`QuadratureError`.
    """
    if not tol >= 1e-12:
        raise ValueError("tol must be >= 1e-12")
    fn = _vectorize(u)
    rule = _Rule(order)
    per_cell = order * order
    evals = 0

    def assess(x0, y0, h, coarse):
        # (refined value, error, child data) for each parent cell
        nonlocal evals
        cx, cy, ch = _children(x0, y0, h)
        fine_parts = rule.integrate(fn, cx, cy, ch)
        evals += fine_parts.size * per_cell
        m = x0.size
        parts = fine_parts.reshape(4, m)
        fine = parts.sum(axis=0)
        err = np.abs(fine - coarse)
        return fine, err, cx.reshape(4, m), cy.reshape(4, m), ch.reshape(4, m), parts

    one = np.array([0.0]), np.array([0.0]), np.array([1.0])
    coarse = rule.integrate(fn, *one)
    evals += per_cell
    fine, err, cx, cy, ch, parts = assess(*one, coarse)

    # heap of (-err, id); cell data kept alongside
    cells: dict[int, tuple] = {}
    heap: list[tuple[float, int]] = []
    counter = 0

    def push(value, error, kids):
        nonlocal counter
        cells[counter] = (value, error, kids)
        heapq.heappush(heap, (-error, counter))
        counter += 1

    push(float(fine[0]), float(err[0]), (cx[:, 0], cy[:, 0], ch[:, 0], parts[:, 0]))
    total_err = float(err[0])
    n_cells = 1

    while total_err > tol:
        if n_cells > max_cells:
            value = math.fsum(v for v, _, _ in cells.values())
            raise QuadratureError(
                f"quadrature did not reach tol={tol:g} within {max_cells} cells "
                f"(error estimate {total_err:.3g})",
                value,
                total_err,
            )
        # split every cell carrying more than its fair share of the error
        share = tol / max(len(cells), 1)
        batch = []
        while heap and (not batch or -heap[0][0] > share) and len(batch) < 256:
            _, cid = heapq.heappop(heap)
            batch.append(cells.pop(cid))
        kx = np.concatenate([kids[0] for _, _, kids in batch])
        ky = np.concatenate([kids[1] for _, _, kids in batch])
        kh = np.concatenate([kids[2] for _, _, kids in batch])
        kq = np.concatenate([kids[3] for _, _, kids in batch])
        fine, err, cx, cy, ch, parts = assess(kx, ky, kh, kq)
        for i in range(kx.size):
            push(float(fine[i]), float(err[i]), (cx[:, i], cy[:, i], ch[:, i], parts[:, i]))
        n_cells += 3 * len(batch)
        total_err = math.fsum(e for _, e, _ in cells.values())

    value = math.fsum(v for v, _, _ in cells.values())
    return QuadResult(value=value, error=total_err, evaluations=evals, cells=len(cells))
