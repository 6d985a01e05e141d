"""Paired-comparison and rating statistics."""
from .consistency import circular_triads, coefficient_of_consistence, max_circular_triads
from .data import PreferenceData, ScoreSummary, check_matrix
from .distributions import chi2_isf, chi2_sf, gamma_q, studentized_range_q
from .equality import EqualityResult, equality_statistic, test_of_equality
from .multcomp import Grouping, group_scores, multiple_comparison_threshold, rank_stimuli
from .ranktests import RankTestResult, mann_whitney_u, midranks, wilcoxon_signed_rank
from .io import read_preferences, read_ratings, write_preferences
from .report import PairwiseReport, analyze, format_table, rating_tests, report_json

__all__ = [
    "circular_triads", "coefficient_of_consistence", "max_circular_triads",
    "PreferenceData", "ScoreSummary", "check_matrix",
    "chi2_isf", "chi2_sf", "gamma_q", "studentized_range_q",
    "EqualityResult", "equality_statistic", "test_of_equality",
    "Grouping", "group_scores", "multiple_comparison_threshold", "rank_stimuli",
    "RankTestResult", "mann_whitney_u", "midranks", "wilcoxon_signed_rank",
    "read_preferences", "read_ratings", "write_preferences",
    "PairwiseReport", "analyze", "format_table", "rating_tests", "report_json",
]
