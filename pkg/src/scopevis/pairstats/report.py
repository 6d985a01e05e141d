"""Full paired-comparison analysis and its JSON / plain-text renderings."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from typing import Mapping, Sequence

from .consistency import circular_triads, coefficient_of_consistence
from .data import PreferenceData, ScoreSummary
from .equality import test_of_equality
from .multcomp import group_scores, multiple_comparison_threshold
from .ranktests import mann_whitney_u, wilcoxon_signed_rank


@dataclass(frozen=True)
class PairwiseReport:
    name: str
    labels: tuple[str, ...]
    n: int
    scores: tuple[int, ...]
    zeta_per_judge: tuple[float, ...]
    zeta_group: float | None
    D: float
    D_df: int
    D_critical: float
    D_significant: bool
    alpha: float
    R: int
    ranking: tuple[str, ...]
    groupings: tuple[tuple[str, ...], ...]

    def to_dict(self) -> dict:
        return asdict(self)


def analyze(name: str, data: PreferenceData | ScoreSummary, alpha: float = 0.05,
            df_override: int | None = None) -> PairwiseReport:
    """Consistency, test of equality and multiple-comparison grouping.

    ``zeta_group`` is the minimum per-judge coefficient; it is ``None`` when
    only aggregate scores are available.
    """
    if isinstance(data, PreferenceData):
        scores = ScoreSummary.from_preferences(data)
        zetas = tuple(coefficient_of_consistence(circular_triads(M), data.t) for M in data.judges) if data.t >= 3 else ()
    else:
        scores, zetas = data, ()
    eq = test_of_equality(scores, alpha, df_override)
    R = multiple_comparison_threshold(scores.n, scores.t, alpha)
    g = group_scores(scores, R)
    return PairwiseReport(
        name, scores.labels, scores.n, scores.s, zetas, min(zetas) if zetas else None,
        eq.D, eq.df, eq.critical, eq.significant, alpha, R, g.ranking, g.groups,
    )


def rating_tests(ratings: Sequence[Mapping], group_a: str | None = None, group_b: str | None = None) -> dict:
    """Between-group Mann-Whitney U per stimulus and within-judge Wilcoxon per stimulus pair.

    ``ratings`` rows carry ``judge_id``, ``group``, ``stimulus``, ``rating``.
    """
    groups = sorted({r["group"] for r in ratings})
    stimuli = sorted({r["stimulus"] for r in ratings})
    if group_a is None and group_b is None and len(groups) == 2:
        group_a, group_b = groups
    out: dict = {"mann_whitney": [], "wilcoxon": []}
    if group_a is not None and group_b is not None:
        for s in stimuli:
            a = [r["rating"] for r in ratings if r["stimulus"] == s and r["group"] == group_a]
            b = [r["rating"] for r in ratings if r["stimulus"] == s and r["group"] == group_b]
            if a and b:
                res = mann_whitney_u(a, b)
                out["mann_whitney"].append({"stimulus": s, "group_a": group_a, "group_b": group_b,
                                            "U": res.statistic, "p": res.p_value, "exact": res.exact})
    by_judge: dict = {}
    for r in ratings:
        by_judge.setdefault(r["judge_id"], {})[r["stimulus"]] = r["rating"]
    for i, s1 in enumerate(stimuli):
        for s2 in stimuli[i + 1:]:
            pairs = [(v[s1], v[s2]) for v in by_judge.values() if s1 in v and s2 in v]
            entry = {"stimulus_a": s1, "stimulus_b": s2, "pairs": len(pairs)}
            if any(x != y for x, y in pairs):
                res = wilcoxon_signed_rank(pairs)
                entry.update(W=res.statistic, p=res.p_value, exact=res.exact)
            else:
                entry.update(W=None, p=None, exact=None)
            out["wilcoxon"].append(entry)
    return out


def _num(v: float) -> str:
    return f"{v:.2f}"


def format_table(reports: Sequence[PairwiseReport]) -> str:
    """Plain-text table: zeta, D and the ranking with its groupings."""
    lines = []
    header = f"{'':10} {'zeta':>5} {'D':>8}  ranking"
    lines.append(header)
    lines.append("-" * max(len(header), 60))
    for rep in reports:
        zeta = "-" if rep.zeta_group is None else f"{rep.zeta_group:g}"
        verdict = "*" if rep.D_significant else " "
        lines.append(f"{rep.name:10} {zeta:>5} {_num(rep.D):>7}{verdict}  " + "  ".join(rep.ranking))
        for grp in rep.groupings:
            lines.append(f"{'':27}[{' '.join(grp)}]")
    lines.append("")
    for rep in reports:
        lines.append(f"{rep.name}: D={_num(rep.D)} vs chi2({rep.D_df}, {rep.alpha:g})={rep.D_critical:.4f} "
                     f"-> {'significant' if rep.D_significant else 'not significant'}; R={rep.R}")
    return "\n".join(lines) + "\n"


def report_json(reports: Sequence[PairwiseReport], ratings: dict | None = None) -> str:
    doc = {"preferences": [r.to_dict() for r in reports]}
    if ratings is not None:
        doc["ratings"] = ratings
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"
