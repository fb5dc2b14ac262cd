"""The mass series, its truncation bounds, and certified mass / t0 enclosures.

For the three Einstein manifolds built from the round S^2 x S^2,

    m = c - 12 * sum_{j,k>=0} (2j+1)(2k+1) / lambda_{j,k} * w(j,k) * inner(j,k)
    inner(j,k) = sum_{p<=j, q<=k} c_{j,k}^{p,q} f~_{p,q}

with ``c = 2/3, 17/6, 53/6`` and ``w = 1``, ``1 + (-1)^(j+k)``,
``(1 + (-1)^j)(1 + (-1)^k)``.  Partial sums over the square ``j, k <= N``
are computed exactly; the discarded tail is bounded by Cauchy-Schwarz
against ``||box f||^2 = 16 pi^2 * 61547/45045``.

Truncation bounds
-----------------
Everything reduces to bounding the discrete tail

    T = sum_{(j,k) not in [0,N]^2} w(j,k)^2 (2j+1)(2k+1) / lambda_{j,k}^4 .

``method="envelope"`` uses the closed-form envelope F(N) with corner
multipliers 1, 2, 4.  ``method="refined"`` bounds T directly: in the
variables ``u = j(j+1)`` the summand is ``(2j+1)(2k+1) G(u, v)`` with
``G = (6u + 6v + 4)^-4`` jointly convex, each index owns a tile of width
``2j+1`` centred at ``u_j`` (``2(2j+1)`` when only one parity is summed), and
Jensen's inequality on every tile turns the sum into an integral of G
over the union of tiles.  Those integrals are rational in closed form.
"""

from __future__ import annotations

import enum
import math
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .basis import alt_harmonic, c_coeff, legendre_coeff
from .exactnum import ExactValue, RatInterval, eval_interval, exact_sum, sqrt_upper
from .integrals import f_tilde, half_numerator

__all__ = [
    "BOX_F_L2",
    "Manifold",
    "MassEstimate",
    "SpectralTable",
    "eigenvalue",
    "inner_sum",
    "spectral_table",
    "clear_tables",
    "partial_sum",
    "f_bound_sq",
    "tail_bound",
    "weighted_tail_bound",
    "envelope_certified",
    "error_bound",
    "mass_estimate",
    "check_distinct_t0",
    "distinctness_table",
    "float_partial_sum",
]

# int int (box f)^2 dx dy over the unit square
BOX_F_L2 = Fraction(61547, 45045)


class Manifold(enum.Enum):
    S2XS2 = "s2xs2"
    G24 = "g24"
    RP2XRP2 = "rp2xrp2"

    @property
    def constant_term(self) -> Fraction:
        return _CONSTANTS[self]

    @property
    def error_multiplier(self) -> int:
        return _MULTIPLIERS[self]

    @property
    def label(self) -> str:
        return _LABELS[self]

    @property
    def symbol(self) -> str:
        return _SYMBOLS[self]

    def weight(self, j: int, k: int) -> int:
        if self is Manifold.S2XS2:
            return 1
        if self is Manifold.G24:
            return 2 if (j + k) % 2 == 0 else 0
        return 4 if (j % 2 == 0 and k % 2 == 0) else 0

    @classmethod
    def parse(cls, name: str) -> "Manifold":
        try:
            return cls(name.lower())
        except ValueError:
            raise ValueError(f"unknown manifold {name!r}; choose from s2xs2, g24, rp2xrp2") from None


_CONSTANTS = {
    Manifold.S2XS2: Fraction(2, 3),
    Manifold.G24: Fraction(17, 6),
    Manifold.RP2XRP2: Fraction(53, 6),
}
_MULTIPLIERS = {Manifold.S2XS2: 1, Manifold.G24: 2, Manifold.RP2XRP2: 4}
_LABELS = {Manifold.S2XS2: "S2xS2", Manifold.G24: "G(2,4)", Manifold.RP2XRP2: "RP2xRP2"}
_SYMBOLS = {Manifold.S2XS2: "m1", Manifold.G24: "m2", Manifold.RP2XRP2: "m3"}


def eigenvalue(j: int, k: int) -> int:
    """Eigenvalue of the conformal Laplacian on ``P_j(cos r1) P_k(cos r2)``."""
    return 6 * (j * (j + 1) + k * (k + 1)) + 4


@lru_cache(maxsize=None)
def inner_sum(j: int, k: int) -> ExactValue:
    if k < j:
        return inner_sum(k, j)
    return exact_sum(
        f_tilde(p, q) * c_coeff(j, k, p, q) for p in range(j + 1) for q in range(k + 1)
    )


# --------------------------------------------------------------------------
# exact tables of inner sums


@dataclass(frozen=True)
class SpectralTable:
    """All inner sums for ``j, k <= n`` over one common denominator.

    ``inner_sum(j, k) == (a[j][k] + b[j][k] * ln2) / den``.
    """

    n: int
    den: int
    a: tuple[tuple[int, ...], ...]
    b: tuple[tuple[int, ...], ...]

    def inner(self, j: int, k: int) -> ExactValue:
        return ExactValue(Fraction(self.a[j][k], self.den), Fraction(self.b[j][k], self.den))

    def restrict(self, n: int) -> "SpectralTable":
        if n > self.n:
            raise ValueError(f"table only covers N <= {self.n}")
        if n == self.n:
            return self
        return SpectralTable(
            n, self.den, tuple(r[: n + 1] for r in self.a[: n + 1]), tuple(r[: n + 1] for r in self.b[: n + 1])
        )

    @classmethod
    def from_inner_sums(cls, n: int, values) -> "SpectralTable":
        """Build from a mapping ``(j, k) -> ExactValue`` covering ``j, k <= n``."""
        den = 1
        for j in range(n + 1):
            for k in range(n + 1):
                v = values[(j, k)]
                den = math.lcm(den, v.a.denominator, v.b.denominator)
        a = tuple(tuple(int(values[(j, k)].a * den) for k in range(n + 1)) for j in range(n + 1))
        b = tuple(tuple(int(values[(j, k)].b * den) for k in range(n + 1)) for j in range(n + 1))
        return cls(n, den, a, b)


def _chunks(n: int, parts: int) -> list[range]:
    parts = max(1, min(parts, n))
    step = -(-n // parts)
    return [range(i, min(i + step, n)) for i in range(0, n, step)]


def build_spectral_table(n: int, threads: int = 1) -> SpectralTable:
    """Exact ``L M L^T`` where ``M[p][q] = f~_{p,q}`` and ``L`` holds Legendre coefficients.

    ``f~_{p,q} = (h(p) + h(q)) / (18 (p+q+3))`` is scaled to integers first,
    so the two matrix products are pure big-integer arithmetic.
    """
    if n < 0:
        raise ValueError("N must be nonnegative")
    size = n + 1
    halves = [half_numerator(p) for p in range(size)]
    d_alpha = 1
    for h in halves:
        d_alpha = math.lcm(d_alpha, h.a.denominator)
        assert h.b.denominator == 1
    lcm_gap = math.lcm(*range(3, 2 * n + 4))
    alpha = [int(h.a * d_alpha) for h in halves]
    beta = [int(h.b) for h in halves]

    ma = np.empty((size, size), dtype=object)
    mb = np.empty((size, size), dtype=object)
    for p in range(size):
        for q in range(size):
            s = lcm_gap // (p + q + 3)
            ma[p, q] = (alpha[p] + alpha[q]) * s
            mb[p, q] = (beta[p] + beta[q]) * d_alpha * s
    leg = np.zeros((size, size), dtype=object)
    for j in range(size):
        for p in range(j + 1):
            leg[j, p] = legendre_coeff(j, p)
    leg_t = leg.T.copy()

    def rows(block: range):
        sub = leg[block.start : block.stop]
        return sub.dot(ma).dot(leg_t), sub.dot(mb).dot(leg_t)

    blocks = _chunks(size, threads)
    if threads > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(rows, blocks))
    else:
        results = [rows(b) for b in blocks]
    a_rows: list[tuple[int, ...]] = []
    b_rows: list[tuple[int, ...]] = []
    for ra, rb in results:
        a_rows.extend(tuple(int(v) for v in r) for r in ra)
        b_rows.extend(tuple(int(v) for v in r) for r in rb)
    return SpectralTable(n, 18 * d_alpha * lcm_gap, tuple(a_rows), tuple(b_rows))


_TABLE: SpectralTable | None = None


def spectral_table(n: int, threads: int = 1) -> SpectralTable:
    """Memoised :func:`build_spectral_table`; a larger table serves smaller ``n``."""
    global _TABLE
    cached = _TABLE
    if cached is not None and cached.n >= n:
        return cached.restrict(n)
    table = build_spectral_table(n, threads)
    _TABLE = table
    return table


def clear_tables() -> None:
    """Drop the in-process table memo (inner sums stay memoised)."""
    global _TABLE
    _TABLE = None


def install_table(table: SpectralTable) -> None:
    """Seed the in-process memo, e.g. from an on-disk cache."""
    global _TABLE
    if _TABLE is None or table.n > _TABLE.n:
        _TABLE = table


def _fraction_tree_sum(fracs: list[Fraction]) -> Fraction:
    if not fracs:
        return Fraction(0)
    while len(fracs) > 1:
        nxt = [fracs[i] + fracs[i + 1] for i in range(0, len(fracs) - 1, 2)]
        if len(fracs) % 2:
            nxt.append(fracs[-1])
        fracs = nxt
    return fracs[0]


def partial_sum(
    m: Manifold, n: int, *, threads: int = 1, table: SpectralTable | None = None
) -> ExactValue:
    """Exact square partial sum ``S_N`` of the mass series (``j, k <= N``)."""
    if n < 0:
        raise ValueError("N must be nonnegative")
    tab = table.restrict(n) if table is not None else spectral_table(n, threads)
    # group by eigenvalue so the rational sum only sees distinct denominators
    num_a: dict[int, int] = defaultdict(int)
    num_b: dict[int, int] = defaultdict(int)
    for j in range(n + 1):
        for k in range(n + 1):
            w = m.weight(j, k)
            if w == 0:
                continue
            c = (2 * j + 1) * (2 * k + 1) * w
            lam = eigenvalue(j, k)
            num_a[lam] += c * tab.a[j][k]
            num_b[lam] += c * tab.b[j][k]
    keys = sorted(num_a)
    sa = _fraction_tree_sum([Fraction(num_a[lam], lam) for lam in keys])
    sb = _fraction_tree_sum([Fraction(num_b[lam], lam) for lam in keys])
    scale = Fraction(-12, tab.den)
    return ExactValue(m.constant_term + sa * scale, sb * scale)


# --------------------------------------------------------------------------
# truncation bounds


def f_bound_sq(n: int) -> Fraction:
    """``F(N)^2 = -(1/24)/(3N^2+3N+1)^2 + (1/3)/(3N^2+3N+2)^2 + 1/(3N^2+3N+2)^3``."""
    if n < 1:
        raise ValueError("F(N) needs N >= 1")
    a = 3 * n * n + 3 * n + 1
    b = a + 1
    return Fraction(-1, 24 * a * a) + Fraction(1, 3 * b * b) + Fraction(1, b**3)


def _phi(s: Fraction, t: Fraction) -> Fraction:
    # int_s^inf int_t^inf (6u + 6v + 4)^-4 dv du
    z = 6 * s + 6 * t + 4
    assert z > 0
    return 1 / (216 * z * z)


def _tiling(n: int, parity: int | None) -> tuple[Fraction, Fraction, Fraction]:
    """(start of first tile, start of first tail tile, density) along one axis."""
    if parity is None:
        # tile of j: [j^2 - 1/2, (j+1)^2 - 1/2], width 2j+1, centre j(j+1)
        return Fraction(-1, 2), Fraction((n + 1) ** 2) - Fraction(1, 2), Fraction(1)
    # tile of j (one parity only): [j^2 - j - 1, j^2 + 3j + 1], width 2(2j+1)
    e = n + 1 if (n + 1) % 2 == parity else n + 2
    return Fraction(-1), Fraction(e * e - e - 1), Fraction(1, 2)


def tail_bound(n: int, parity: int | None = None) -> Fraction:
    """Rational upper bound for ``sum (2j+1)(2k+1)/lambda_{j,k}^4`` off ``[0,N]^2``.

    With ``parity`` set, only pairs with ``j`` and ``k`` both of that parity
    are summed.
    """
    if n < 1:
        raise ValueError("tail bounds need N >= 1")
    start, cut, density = _tiling(n, parity)
    return density * density * (2 * _phi(cut, start) - _phi(cut, cut))


def weighted_tail_bound(m: Manifold, n: int) -> Fraction:
    """Bound for ``sum w(j,k)^2 (2j+1)(2k+1)/lambda^4`` over the tail."""
    full = tail_bound(n)
    if m is Manifold.S2XS2:
        return full
    if m is Manifold.G24:
        return 4 * min(full, tail_bound(n, 0) + tail_bound(n, 1))
    return 16 * min(full, tail_bound(n, 0))


def envelope_certified(n: int) -> bool:
    """True when ``F(N)^2 / 144`` dominates the rigorous tail bound.

    This is what makes the closed-form envelope a proved bound at ``N``.
    """
    return f_bound_sq(n) / 144 >= tail_bound(n)


def error_bound(m: Manifold, n: int, method: str = "envelope") -> Fraction:
    """Certified upper bound on ``|m - S_N|``.

    ``"envelope"``: ``multiplier * sqrt(61547/45045 * F(N)^2)``.
    ``"refined"``: ``12 * sqrt(61547/45045 * T)`` with ``T`` from
    :func:`weighted_tail_bound`.
    """
    if n < 1:
        raise ValueError("error bounds need N >= 1")
    if method == "envelope":
        if not envelope_certified(n):
            raise ArithmeticError(f"F({n}) does not dominate the tail bound")
        return m.error_multiplier * sqrt_upper(BOX_F_L2 * f_bound_sq(n))
    if method == "refined":
        return 12 * sqrt_upper(BOX_F_L2 * weighted_tail_bound(m, n))
    raise ValueError(f"unknown bound method {method!r}")


# --------------------------------------------------------------------------
# certified estimates


def _ln2_digits_for(v: ExactValue, digits: int) -> int:
    # |b| * 10^-d <= 10^-(digits+2)
    mag = abs(v.b)
    extra = len(str(mag.numerator // mag.denominator)) if mag >= 1 else 0
    return digits + extra + 2


@dataclass(frozen=True)
class MassEstimate:
    manifold: Manifold
    n: int
    partial_sum: ExactValue
    sum_interval: RatInterval
    error_bound: Fraction
    mass_interval: RatInterval
    t0_interval: RatInterval
    t0_double_interval: RatInterval
    bound_method: str
    digits: int


def _t0(interval: RatInterval, factor: int) -> RatInterval:
    # t = -factor / (9 m) is increasing in m > 0
    if interval.lo <= 0:
        raise ArithmeticError("mass interval is not strictly positive; t0 unavailable")
    return RatInterval(Fraction(-factor, 1) / (9 * interval.lo), Fraction(-factor, 1) / (9 * interval.hi))


def mass_estimate(
    m: Manifold,
    n: int,
    digits: int = 10,
    *,
    bound: str = "envelope",
    threads: int = 1,
    table: SpectralTable | None = None,
) -> MassEstimate:
    """Certified enclosure of the mass from the ``N``-th square partial sum.

    ``digits`` sets the decimal precision: ln 2 is enclosed tightly enough
    that the partial-sum enclosure is narrower than ``10**-(digits+2)``.
    """
    if n < 1:
        raise ValueError("mass estimates need N >= 1")
    if digits < 1:
        raise ValueError("digits must be >= 1")
    s = partial_sum(m, n, threads=threads, table=table)
    s_int = eval_interval(s, _ln2_digits_for(s, digits))
    eb = error_bound(m, n, bound)
    mass = s_int.widen(eb)
    return MassEstimate(
        manifold=m,
        n=n,
        partial_sum=s,
        sum_interval=s_int,
        error_bound=eb,
        mass_interval=mass,
        t0_interval=_t0(mass, 1),
        t0_double_interval=_t0(mass, 2),
        bound_method=bound,
        digits=digits,
    )


def check_distinct_t0(pairs: Iterable[tuple[RatInterval, RatInterval]]) -> list[bool]:
    """For each pair of certified enclosures: True when they are disjoint."""
    return [left.is_disjoint(right) for left, right in pairs]


MINUS_THIRD = RatInterval.point(Fraction(-1, 3))


@dataclass(frozen=True)
class DistinctRow:
    topology: str
    left_label: str
    right_label: str
    left: RatInterval
    right: RatInterval
    proven: bool

    @property
    def verdict(self) -> str:
        return "proven" if self.proven else "undecided at this N"


_DISTINCT_PAIRS = [
    ("S2xS2 # CP2bar", ("third", None), ("single", Manifold.S2XS2)),
    ("G(2,4) # CP2bar", ("third", None), ("single", Manifold.G24)),
    ("G(2,4) # S2xS2", ("double", Manifold.S2XS2), ("double", Manifold.G24)),
    ("G(2,4) # RP2xRP2", ("double", Manifold.RP2XRP2), ("double", Manifold.G24)),
    ("RP2xRP2 # CP2bar", ("third", None), ("single", Manifold.RP2XRP2)),
    ("RP2xRP2 # S2xS2", ("double", Manifold.S2XS2), ("double", Manifold.RP2XRP2)),
]


def _t0_operand(kind: str, m: Manifold | None, estimates) -> tuple[str, RatInterval]:
    if kind == "third":
        return "-1/3", MINUS_THIRD
    est = estimates[m]
    idx = m.symbol[1:]
    if kind == "single":
        return f"-(9 m{idx})^-1", est.t0_interval
    return f"-2(9 m{idx})^-1", est.t0_double_interval


def distinctness_table(estimates: dict[Manifold, MassEstimate]) -> list[DistinctRow]:
    """Disjointness verdicts for the pairs of t0 values, where computable."""
    rows = []
    for topology, left_spec, right_spec in _DISTINCT_PAIRS:
        needed = {s[1] for s in (left_spec, right_spec) if s[1] is not None}
        if not needed <= estimates.keys():
            continue
        ll, li = _t0_operand(*left_spec, estimates)
        rl, ri = _t0_operand(*right_spec, estimates)
        (proven,) = check_distinct_t0([(li, ri)])
        rows.append(DistinctRow(topology, ll, rl, li, ri, proven))
    return rows


# --------------------------------------------------------------------------
# fast-float diagnostics


def float_partial_sum(m: Manifold, n: int) -> float:
    """Double-precision ``S_N``.  Diagnostics only.

    The alternating binomial sums cancel catastrophically, so the result is
    meaningless beyond small ``N`` (roughly ``N > 20`` for S2xS2, earlier
    for the quotients).
    """
    size = n + 1
    ln2 = math.log(2.0)
    h = np.empty(size)
    for p in range(size):
        sign = -1.0 if p % 2 else 1.0
        log_coef = 4.0 * sign * (p + 1) * (p + 2) * (3 * p * p + 9 * p + 10)
        h[p] = -54.5 - 68 * p - 33 * p**2 - 6 * p**3 + log_coef * (ln2 - float(alt_harmonic(p)))
    idx = np.arange(size)
    fpq = (h[:, None] + h[None, :]) / (18.0 * (idx[:, None] + idx[None, :] + 3))
    leg = np.array([[float(legendre_coeff(j, p)) for p in range(size)] for j in range(size)])
    weight = np.array(
        [
            [(2 * j + 1) * (2 * k + 1) * m.weight(j, k) / eigenvalue(j, k) for k in range(size)]
            for j in range(size)
        ]
    )
    return float(m.constant_term) - 12.0 * kernels.float_series(fpq, leg, weight)
