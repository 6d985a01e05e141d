"""Multiple-comparison threshold on score differences and the resulting groupings."""
from __future__ import annotations

import math
from dataclasses import dataclass

from ..errors import InputError
from .data import ScoreSummary
from .distributions import studentized_range_q


def multiple_comparison_threshold(n: int, t: int, alpha: float = 0.05) -> int:
    """Smallest significant score difference, ``ceil(q(alpha, t, inf) * sqrt(n t / 4))``."""
    if n < 1:
        raise InputError(f"judge count must be positive, got {n}")
    q = studentized_range_q(alpha, t)
    return math.ceil(q * math.sqrt(n * t) / 2.0)


@dataclass(frozen=True)
class Grouping:
    ranking: tuple[str, ...]
    scores: tuple[int, ...]   # aligned with ranking
    groups: tuple[tuple[str, ...], ...]
    R: int


def rank_stimuli(scores: ScoreSummary) -> list[int]:
    """Indices by descending score; equal scores keep label order."""
    return sorted(range(scores.t), key=lambda i: (-scores.s[i], scores.labels[i]))


def group_scores(scores: ScoreSummary, R: int) -> Grouping:
    """Maximal runs of consecutive ranked stimuli whose score spread is below R.

    A stimulus belongs to every maximal run containing it, so groups may
    overlap. Runs are listed from the top of the ranking.
    """
    if R < 1:
        raise InputError(f"R must be at least 1, got {R}")
    order = rank_stimuli(scores)
    vals = [scores.s[i] for i in order]
    t = len(order)
    runs = []
    end = 0
    for start in range(t):
        end = max(end, start)
        while end + 1 < t and vals[start] - vals[end + 1] < R:
            end += 1
        # maximal only when it is not contained in the previous run
        if not runs or end > runs[-1][1]:
            runs.append((start, end))
    labels = tuple(scores.labels[i] for i in order)
    return Grouping(labels, tuple(vals), tuple(labels[a:b + 1] for a, b in runs), R)
