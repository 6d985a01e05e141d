"""Test of equality of paired-comparison scores."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from ..errors import InputError
from .data import ScoreSummary
from .distributions import chi2_isf


@dataclass(frozen=True)
class EqualityResult:
    D: float
    df: int
    critical: float
    significant: bool
    alpha: float


def equality_statistic(scores: ScoreSummary) -> float:
    """``D = 4/(n t) * sum((s_i - n(t-1)/2)^2)``, evaluated exactly."""
    n, t = scores.n, scores.t
    mean = Fraction(n * (t - 1), 2)
    total = sum((Fraction(si) - mean) ** 2 for si in scores.s)
    return float(Fraction(4, n * t) * total)


def test_of_equality(scores: ScoreSummary, alpha: float = 0.05, df_override: int | None = None) -> EqualityResult:
    """Compare D against the chi-square upper-``alpha`` quantile.

    Degrees of freedom default to ``t - 1``.
    """
    df = scores.t - 1 if df_override is None else int(df_override)
    if df < 1:
        raise InputError(f"degrees of freedom must be at least 1, got {df}")
    D = equality_statistic(scores)
    crit = chi2_isf(alpha, df)
    return EqualityResult(D, df, crit, D >= crit, alpha)


test_of_equality.__test__ = False  # not a pytest test despite the name
