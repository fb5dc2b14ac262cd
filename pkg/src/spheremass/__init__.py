"""Certified masses of the Green's function metrics on S2xS2, G(2,4) and RP2xRP2.

The mass series is summed exactly in ``Q + Q*ln2`` and its truncation error
is bounded rigorously, so every decimal this package prints is a proved
enclosure.

>>> from spheremass import Manifold, mass_estimate
>>> est = mass_estimate(Manifold.S2XS2, 1, digits=4)
>>> str(est.partial_sum)
'4777/1260 - 208/45*ln2'
"""

__version__ = "0.1.0"

from .exactnum import ExactValue, RatInterval, decimal_string, eval_interval, ln2_enclosure, sqrt_upper
from .mass import (
    Manifold,
    MassEstimate,
    check_distinct_t0,
    eigenvalue,
    error_bound,
    f_bound_sq,
    inner_sum,
    mass_estimate,
    partial_sum,
)

__all__ = [
    "ExactValue",
    "RatInterval",
    "decimal_string",
    "eval_interval",
    "ln2_enclosure",
    "sqrt_upper",
    "Manifold",
    "MassEstimate",
    "check_distinct_t0",
    "eigenvalue",
    "error_bound",
    "f_bound_sq",
    "inner_sum",
    "mass_estimate",
    "partial_sum",
]
