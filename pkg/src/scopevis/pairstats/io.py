"""CSV readers for preference and rating data."""
from __future__ import annotations

import csv
from typing import Sequence

import numpy as np

from ..errors import DataError
from .data import PreferenceData

PREFERENCE_COLUMNS = ("judge_id", "stimulus_a", "stimulus_b", "winner")
RATING_COLUMNS = ("judge_id", "group", "stimulus", "rating")


def _rows(path, required: Sequence[str]) -> list[dict]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise DataError(f"{path}: empty file")
        missing = [c for c in required if c not in reader.fieldnames]
        if missing:
            raise DataError(f"{path}: missing column(s) {', '.join(missing)}")
        return [dict(row, _line=k + 2) for k, row in enumerate(reader)]


def _natural(label: str):
    digits = "".join(ch for ch in label if ch.isdigit())
    return (label.rstrip("0123456789"), int(digits) if digits else -1, label)


def preferences_from_rows(rows: Sequence[dict], labels: Sequence[str] | None = None,
                          source: str = "preferences") -> dict[str | None, PreferenceData]:
    """Per-group preference data; the key is the optional ``group`` column (None if absent)."""
    if labels is None:
        labels = sorted({r["stimulus_a"] for r in rows} | {r["stimulus_b"] for r in rows}, key=_natural)
    index = {s: i for i, s in enumerate(labels)}
    t = len(labels)
    judges: dict[str, np.ndarray] = {}
    seen: dict[str, set] = {}
    group_of: dict[str, str | None] = {}
    for r in rows:
        line = r.get("_line", "?")
        a, b, w, j = r["stimulus_a"], r["stimulus_b"], r["winner"], r["judge_id"]
        if a not in index or b not in index:
            raise DataError(f"{source}:{line}: unknown stimulus in ({a}, {b})")
        if a == b:
            raise DataError(f"{source}:{line}: stimulus_a equals stimulus_b ({a})")
        if w not in (a, b):
            raise DataError(f"{source}:{line}: winner {w!r} is neither {a!r} nor {b!r}")
        g = r.get("group") or None
        if group_of.setdefault(j, g) != g:
            raise DataError(f"{source}:{line}: judge {j} appears in groups {group_of[j]} and {g}")
        key = frozenset((a, b))
        if key in seen.setdefault(j, set()):
            raise DataError(f"{source}:{line}: judge {j} compared ({a}, {b}) twice")
        seen[j].add(key)
        M = judges.setdefault(j, np.zeros((t, t), dtype=np.int64))
        loser = b if w == a else a
        M[index[w], index[loser]] = 1
    need = t * (t - 1) // 2
    for j, pairs in seen.items():
        if len(pairs) != need:
            raise DataError(f"{source}: judge {j} compared {len(pairs)} of {need} pairs")
    out: dict = {}
    for g in dict.fromkeys(group_of[j] for j in judges):
        ids = [j for j in judges if group_of[j] == g]
        out[g] = PreferenceData(tuple(labels), tuple(judges[j] for j in ids), tuple(ids))
    return out


def read_preferences(path, labels: Sequence[str] | None = None) -> dict[str | None, PreferenceData]:
    return preferences_from_rows(_rows(path, PREFERENCE_COLUMNS), labels, str(path))


def read_ratings(path) -> list[dict]:
    rows = _rows(path, RATING_COLUMNS)
    out = []
    for r in rows:
        try:
            rating = float(r["rating"])
        except ValueError:
            raise DataError(f"{path}:{r['_line']}: rating {r['rating']!r} is not a number") from None
        out.append({"judge_id": r["judge_id"], "group": r["group"], "stimulus": r["stimulus"], "rating": rating})
    return out


def write_preferences(path, groups: dict[str | None, PreferenceData]) -> None:
    """Inverse of :func:`read_preferences` (one row per judge and pair)."""
    with_group = any(g is not None for g in groups)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(PREFERENCE_COLUMNS + (("group",) if with_group else ()))
        for g, data in groups.items():
            for jid, M in zip(data.judge_ids, data.judges):
                for i in range(data.t):
                    for k in range(i + 1, data.t):
                        a, b = data.labels[i], data.labels[k]
                        row = [jid, a, b, a if M[i, k] else b]
                        w.writerow(row + ([g or ""] if with_group else []))
