"""Reference distributions for the paired-comparison tests.

The chi-square upper quantile is obtained by inverting the regularized
incomplete gamma function (power series below ``a + 1``, Lentz continued
fraction above) with bisection. Studentized-range quantiles at infinite
degrees of freedom are tabulated.
"""
from __future__ import annotations

import math

from ..errors import InputError, UnsupportedError

_EPS = 1e-15
_TINY = 1e-300


def _gamma_series(a: float, x: float) -> float:
    """Lower regularized gamma P(a, x) by its power series (x < a + 1)."""
    term = 1.0 / a
    total = term
    ap = a
    for _ in range(10000):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            break
    return total * math.exp(-x + a * math.log(x) - math.lgamma(a))


def _gamma_cf(a: float, x: float) -> float:
    """Upper regularized gamma Q(a, x) by continued fraction (x >= a + 1)."""
    b = x + 1.0 - a
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, 10000):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        d = _TINY if abs(d) < _TINY else d
        c = b + an / c
        c = _TINY if abs(c) < _TINY else c
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    return math.exp(-x + a * math.log(x) - math.lgamma(a)) * h


def gamma_q(a: float, x: float) -> float:
    """Upper regularized incomplete gamma function Q(a, x)."""
    if a <= 0:
        raise InputError(f"gamma shape must be positive, got {a}")
    if x <= 0:
        return 1.0
    if x < a + 1.0:
        return 1.0 - _gamma_series(a, x)
    return _gamma_cf(a, x)


def chi2_sf(x: float, df: float) -> float:
    """Survival function P(X >= x) of the chi-square distribution."""
    return gamma_q(df / 2.0, x / 2.0)


def chi2_isf(alpha: float, df: float, tol: float = 1e-10) -> float:
    """Upper-``alpha`` quantile: the x with ``chi2_sf(x, df) == alpha``."""
    if not 0 < alpha < 1:
        raise InputError(f"alpha must lie in (0, 1), got {alpha}")
    if df <= 0:
        raise InputError(f"degrees of freedom must be positive, got {df}")
    lo, hi = 0.0, max(1.0, float(df))
    while chi2_sf(hi, df) > alpha:
        lo, hi = hi, hi * 2.0
    while hi - lo > tol * max(1.0, hi):
        mid = 0.5 * (lo + hi)
        if chi2_sf(mid, df) > alpha:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# Upper quantiles q(alpha, k, inf) of the studentized range for k = 2..10
# (standard published tables, three decimals).
STUDENTIZED_RANGE_INF = {
    0.05: (2.772, 3.314, 3.633, 3.858, 4.030, 4.170, 4.286, 4.387, 4.474),
    0.01: (3.643, 4.120, 4.403, 4.603, 4.757, 4.882, 4.987, 5.078, 5.157),
}


def studentized_range_q(alpha: float, k: int) -> float:
    for level, row in STUDENTIZED_RANGE_INF.items():
        if math.isclose(alpha, level, rel_tol=0, abs_tol=1e-12):
            if 2 <= k <= 1 + len(row):
                return row[k - 2]
            raise UnsupportedError(f"studentized range table covers 2..{1 + len(row)} stimuli, got {k}")
    raise UnsupportedError(f"studentized range table has alpha in {sorted(STUDENTIZED_RANGE_INF)}, got {alpha}")


def normal_sf(z: float) -> float:
    return 0.5 * math.erfc(z / math.sqrt(2.0))
