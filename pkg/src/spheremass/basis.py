"""Spectral basis data for the torus-invariant eigenfunctions of S^2 x S^2.

The invariant eigenfunction of degree ``j`` on one sphere factor is, in the
coordinate ``x = (1 - cos r)/2``, a multiple of ``P_j(1 - 2x)``.  Its L^2
normalisation ``sqrt((2j+1)/(4 pi))`` never has to be carried around: in the
mass series the normalisations of the two factors multiply with the
``4 pi sqrt(2j+1) sqrt(2k+1)`` from the Fourier coefficient and collapse into
the rational weight ``(2j+1)(2k+1)``.  Only integers and rationals are
handled here.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

__all__ = [
    "ShiftedLegendre",
    "binomial",
    "shifted_legendre",
    "alt_harmonic",
    "c_coeff",
    "legendre_coeff",
]


_PASCAL: list[list[int]] = [[1]]
_PASCAL_LOCK = threading.Lock()


def _pascal_row(n: int) -> list[int]:
    if n < len(_PASCAL):
        return _PASCAL[n]
    with _PASCAL_LOCK:
        while len(_PASCAL) <= n:
            prev = _PASCAL[-1]
            _PASCAL.append([1] + [prev[i] + prev[i + 1] for i in range(len(prev) - 1)] + [1])
        return _PASCAL[n]


def binomial(n: int, k: int) -> int:
    """Binomial coefficient from a memoised Pascal triangle."""
    if k < 0 or k > n:
        return 0
    return _pascal_row(n)[k]


def legendre_coeff(j: int, p: int) -> int:
    """Coefficient of ``x**p`` in ``P_j(1 - 2x)``: ``(-1)^p C(j,p) C(j+p,p)``."""
    if p < 0 or p > j:
        return 0
    c = binomial(j, p) * binomial(j + p, p)
    return -c if p % 2 else c


@dataclass(frozen=True)
class ShiftedLegendre:
    """Integer coefficient vector of ``P_j(1 - 2x)`` in powers of ``x``."""

    j: int
    coeffs: tuple[int, ...]

    def __call__(self, x):
        # Horner; works for int, Fraction, float or numpy arrays
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __len__(self) -> int:
        return len(self.coeffs)


@lru_cache(maxsize=None)
def shifted_legendre(j: int) -> ShiftedLegendre:
    if j < 0:
        raise ValueError("degree must be nonnegative")
    return ShiftedLegendre(j, tuple(legendre_coeff(j, p) for p in range(j + 1)))


_ALT_HARMONIC: list[Fraction] = [Fraction(0)]
_ALT_LOCK = threading.Lock()


def alt_harmonic(p: int) -> Fraction:
    """Partial sum ``A(p) = 1 - 1/2 + 1/3 - ... + (-1)^(p-1)/p`` with ``A(0) = 0``."""
    if p < 0:
        raise ValueError("p must be nonnegative")
    if p < len(_ALT_HARMONIC):
        return _ALT_HARMONIC[p]
    with _ALT_LOCK:
        while len(_ALT_HARMONIC) <= p:
            i = len(_ALT_HARMONIC)
            _ALT_HARMONIC.append(_ALT_HARMONIC[-1] + Fraction(1 if i % 2 else -1, i))
        return _ALT_HARMONIC[p]


def c_coeff(j: int, k: int, p: int, q: int) -> int:
    """Expansion coefficient of ``P_j(1-2x) P_k(1-2y)`` on the monomial ``x^p y^q``."""
    if not (0 <= p <= j and 0 <= q <= k):
        raise ValueError(f"c_coeff requires 0 <= p <= j and 0 <= q <= k, got {(j, k, p, q)}")
    return legendre_coeff(j, p) * legendre_coeff(k, q)
