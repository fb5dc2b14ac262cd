"""Floating-point kernels: numba-compiled when available, numpy otherwise.

Nothing here feeds a certified number.  The kernels serve the quadrature
oracle, the fast-float diagnostic mode and brute-force tail sums used as
sanity checks on the analytic truncation bounds.

Set ``SPHEREMASS_DISABLE_NUMBA=1`` to force the pure-numpy path.
"""

from __future__ import annotations

import os

import numpy as np

__all__ = [
    "BACKEND",
    "eval_monomials",
    "float_series",
    "brute_tail",
    "numpy_impl",
    "numba_impl",
]


def _numba_requested() -> bool:
    flag = os.environ.get("SPHEREMASS_DISABLE_NUMBA", "").strip().lower()
    return flag in ("", "0", "false", "no")


# --------------------------------------------------------------------------
# pure numpy


def _np_eval_monomials(xs, ys, ex, ey, coef, k):
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    s = xs + ys
    t = (xs / s)[..., None]
    w = (ys / s)[..., None]
    # c * (x/s)^a (y/s)^b s^(a+b-k): no over/underflow close to the origin
    terms = coef * t**ex * w**ey * s[..., None] ** (ex + ey - k)
    return terms.sum(axis=-1)


def _np_float_series(fpq, leg, weight):
    inner = leg @ fpq @ leg.T
    return float((weight * inner).sum())


def _np_brute_tail(n, size, parity_mode):
    j = np.arange(size, dtype=np.float64)
    u = j * (j + 1.0)
    g = np.outer(2 * j + 1, 2 * j + 1) / (6.0 * (u[:, None] + u[None, :]) + 4.0) ** 4
    jj = np.arange(size)
    tail = (jj[:, None] > n) | (jj[None, :] > n)
    if parity_mode == 1:
        tail &= (jj[:, None] + jj[None, :]) % 2 == 0
        g = g * 4.0
    elif parity_mode == 2:
        tail &= (jj[:, None] % 2 == 0) & (jj[None, :] % 2 == 0)
        g = g * 16.0
    return float(g[tail].sum())


# --------------------------------------------------------------------------
# numba


def _build_numba():
    from numba import njit

    @njit(cache=True)
    def eval_monomials(xs, ys, ex, ey, coef, k):
        out = np.empty(xs.size)
        xf = xs.ravel()
        yf = ys.ravel()
        for i in range(xf.size):
            s = xf[i] + yf[i]
            t = xf[i] / s
            w = yf[i] / s
            acc = 0.0
            for m in range(coef.size):
                acc += coef[m] * t ** ex[m] * w ** ey[m] * s ** (ex[m] + ey[m] - k)
            out[i] = acc
        return out.reshape(xs.shape)

    @njit(cache=True)
    def brute_tail(n, size, parity_mode):
        total = 0.0
        for j in range(size):
            uj = j * (j + 1.0)
            for k in range(size):
                if j <= n and k <= n:
                    continue
                if parity_mode == 1 and (j + k) % 2 != 0:
                    continue
                if parity_mode == 2 and (j % 2 != 0 or k % 2 != 0):
                    continue
                lam = 6.0 * (uj + k * (k + 1.0)) + 4.0
                g = (2 * j + 1.0) * (2 * k + 1.0) / lam**4
                if parity_mode == 1:
                    g *= 4.0
                elif parity_mode == 2:
                    g *= 16.0
                total += g
        return total

    # dense matrix products: BLAS through numpy beats a compiled triple loop
    return eval_monomials, _np_float_series, brute_tail


class _Impl:
    def __init__(self, name, eval_monomials, float_series, brute_tail):
        self.name = name
        self._eval = eval_monomials
        self._series = float_series
        self._tail = brute_tail

    def eval_monomials(self, xs, ys, ex, ey, coef, k):
        xs = np.ascontiguousarray(xs, dtype=np.float64)
        ys = np.ascontiguousarray(ys, dtype=np.float64)
        return self._eval(
            xs,
            ys,
            np.asarray(ex, dtype=np.int64),
            np.asarray(ey, dtype=np.int64),
            np.asarray(coef, dtype=np.float64),
            int(k),
        )

    def float_series(self, fpq, leg, weight):
        return self._series(
            np.ascontiguousarray(fpq, dtype=np.float64),
            np.ascontiguousarray(leg, dtype=np.float64),
            np.ascontiguousarray(weight, dtype=np.float64),
        )

    def brute_tail(self, n, size, parity_mode=0):
        return self._tail(int(n), int(size), int(parity_mode))


numpy_impl = _Impl("numpy", _np_eval_monomials, _np_float_series, _np_brute_tail)


def _make_numba_impl():
    try:
        fns = _build_numba()
    except ImportError:
        return None
    return _Impl("numba", *fns)


numba_impl = _make_numba_impl()

_active = numba_impl if (numba_impl is not None and _numba_requested()) else numpy_impl
BACKEND = _active.name

eval_monomials = _active.eval_monomials
float_series = _active.float_series
brute_tail = _active.brute_tail
