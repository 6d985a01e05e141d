"""Within-judge consistency: circular triads and the coefficient of consistence."""
from __future__ import annotations

import numpy as np

from ..errors import DataError
from .data import check_matrix


def max_circular_triads(t: int) -> int:
    if t % 2:
        return (t ** 3 - t) // 24
    return (t ** 3 - 4 * t) // 24


def circular_triads(M) -> int:
    """Number of intransitive triples, from the judge's row sums ``a_i``.

    ``d = t(t-1)(2t-1)/12 - sum(a_i^2)/2``.
    """
    m = check_matrix(M)
    t = m.shape[0]
    a = m.sum(axis=1)
    twice = t * (t - 1) * (2 * t - 1) // 6 - int(np.dot(a, a))
    return twice // 2


def coefficient_of_consistence(d: int, t: int) -> float:
    """``zeta = 1 - d / d_max``; 1 for a transitive judge, 0 at the maximum."""
    if t < 3:
        raise DataError(f"consistence needs at least 3 stimuli, got {t}")
    dmax = max_circular_triads(t)
    if not 0 <= d <= dmax:
        raise DataError(f"circular triads must lie in [0, {dmax}] for t={t}, got {d}")
    denom = t ** 3 - t if t % 2 else t ** 3 - 4 * t
    return 1.0 - 24.0 * d / denom
