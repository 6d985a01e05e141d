"""Rank-based tests for rating data.

Exact null distributions are built by dynamic programming over doubled
midranks, so ties are handled exactly without enumerating assignments.
"""
from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Sequence

from ..errors import DegenerateInputError, InputError
from .distributions import normal_sf

EXACT_MWU_LIMIT = 20000   # largest C(n_A + n_B, n_A) handled exactly
EXACT_WILCOXON_LIMIT = 20  # nonzero differences
_REL = 1e-9


@dataclass(frozen=True)
class RankTestResult:
    statistic: float
    p_value: float
    exact: bool


def midranks(values: Sequence[float]) -> list[float]:
    """1-based ranks with ties given the mean of their positions."""
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        r = (i + j) / 2.0 + 1.0
        for k in range(i, j + 1):
            ranks[order[k]] = r
        i = j + 1
    return ranks


def _tie_sizes(values) -> list[int]:
    counts = defaultdict(int)
    for v in values:
        counts[v] += 1
    return [c for c in counts.values() if c > 1]


def mann_whitney_u(a: Sequence[float], b: Sequence[float]) -> RankTestResult:
    """U for sample ``a`` with a two-sided p-value.

    Exact when ``C(n_A + n_B, n_A) <= EXACT_MWU_LIMIT``:
    ``p = P(|U - mean| >= |U_obs - mean|)`` under random assignment of the
    observed midranks. Otherwise the tie-corrected normal approximation
    without continuity correction.
    """
    na, nb = len(a), len(b)
    if na == 0 or nb == 0:
        raise InputError("both groups must be non-empty")
    ranks = midranks(list(a) + list(b))
    ra = sum(ranks[:na])
    u = ra - na * (na + 1) / 2.0
    mean = na * nb / 2.0
    N = na + nb
    if math.comb(N, na) <= EXACT_MWU_LIMIT:
        doubled = [int(round(2 * r)) for r in ranks]
        # dist[k][s]: number of k-subsets with doubled rank sum s
        dist = [defaultdict(int) for _ in range(na + 1)]
        dist[0][0] = 1
        for r2 in doubled:
            for k in range(min(na, N) - 1, -1, -1):
                for s, c in dist[k].items():
                    dist[k + 1][s + r2] += c
        total = math.comb(N, na)
        obs = abs(u - mean)
        hits = 0
        for s2, c in dist[na].items():
            uu = s2 / 2.0 - na * (na + 1) / 2.0
            if abs(uu - mean) >= obs - _REL * max(1.0, obs):
                hits += c
        return RankTestResult(u, min(1.0, hits / total), True)
    ties = _tie_sizes(list(a) + list(b))
    var = na * nb / 12.0 * ((N + 1) - sum(t ** 3 - t for t in ties) / (N * (N - 1)))
    if var <= 0:
        return RankTestResult(u, 1.0, False)
    z = abs(u - mean) / math.sqrt(var)
    return RankTestResult(u, min(1.0, 2.0 * normal_sf(z)), False)


def wilcoxon_signed_rank(pairs: Sequence[tuple[float, float]]) -> RankTestResult:
    """``W = min(W+, W-)`` over nonzero differences ``x - y``, two-sided p.

    Exact for up to ``EXACT_WILCOXON_LIMIT`` nonzero differences:
    ``p = min(1, 2 P(W <= W_obs))`` under independent random signs;
    otherwise the tie-corrected normal approximation.
    """
    d = [float(x) - float(y) for x, y in pairs]
    d = [v for v in d if v != 0.0]
    if not d:
        raise DegenerateInputError("all paired differences are zero")
    n = len(d)
    ranks = midranks([abs(v) for v in d])
    w_plus = sum(r for r, v in zip(ranks, d) if v > 0)
    w_minus = sum(r for r, v in zip(ranks, d) if v < 0)
    w = float(min(w_plus, w_minus))
    if n <= EXACT_WILCOXON_LIMIT:
        dist = defaultdict(int)
        dist[0] = 1
        for r2 in (int(round(2 * r)) for r in ranks):
            nxt = defaultdict(int)
            for s, c in dist.items():
                nxt[s] += c
                nxt[s + r2] += c
            dist = nxt
        w2 = int(round(2 * w))
        hits = sum(c for s, c in dist.items() if s <= w2)
        return RankTestResult(w, min(1.0, 2.0 * hits / 2 ** n), True)
    ties = _tie_sizes([abs(v) for v in d])
    mean = n * (n + 1) / 4.0
    var = n * (n + 1) * (2 * n + 1) / 24.0 - sum(t ** 3 - t for t in ties) / 48.0
    z = abs(w - mean) / math.sqrt(var)
    return RankTestResult(w, min(1.0, 2.0 * normal_sf(z)), False)
