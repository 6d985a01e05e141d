"""Preference matrices and score summaries for round-robin paired comparisons."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..errors import DataError


def check_matrix(M, labels: Sequence[str] | None = None) -> np.ndarray:
    """Validate one judge's matrix: ``M[i][j] + M[j][i] == 1`` for every pair.

    Diagonal entries are ignored (stored as 0).
    """
    m = np.array(M, dtype=object)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DataError(f"preference matrix must be square, got shape {m.shape}")
    t = m.shape[0]
    if t < 2:
        raise DataError(f"need at least 2 stimuli, got {t}")
    names = list(labels) if labels is not None else [str(i) for i in range(t)]
    out = np.zeros((t, t), dtype=np.int64)
    for i in range(t):
        for j in range(t):
            if i == j:
                continue
            v = m[i, j]
            if v is None or v not in (0, 1):
                raise DataError(f"pair ({names[i]}, {names[j]}): entry must be 0 or 1, got {v!r}")
            out[i, j] = int(v)
    for i in range(t):
        for j in range(i + 1, t):
            if out[i, j] + out[j, i] != 1:
                raise DataError(f"pair ({names[i]}, {names[j]}): exactly one of the two must be preferred")
    return out


@dataclass(frozen=True)
class PreferenceData:
    labels: tuple[str, ...]
    judges: tuple[np.ndarray, ...]
    judge_ids: tuple[str, ...] = ()

    def __post_init__(self):
        if len(set(self.labels)) != len(self.labels):
            raise DataError("stimulus labels must be unique")
        if not self.judges:
            raise DataError("no judges")
        checked = tuple(check_matrix(M, self.labels) for M in self.judges)
        for k, M in enumerate(checked):
            if M.shape[0] != len(self.labels):
                raise DataError(f"judge {k}: matrix has {M.shape[0]} stimuli, expected {len(self.labels)}")
        object.__setattr__(self, "judges", checked)
        if not self.judge_ids:
            object.__setattr__(self, "judge_ids", tuple(str(k + 1) for k in range(len(checked))))

    @property
    def t(self) -> int:
        return len(self.labels)

    @property
    def n(self) -> int:
        return len(self.judges)

    def counts(self) -> np.ndarray:
        """``C[i][j]``: number of judges preferring stimulus i over j."""
        return np.sum(self.judges, axis=0)

    def merge(self, other: "PreferenceData") -> "PreferenceData":
        if other.labels != self.labels:
            raise DataError("cannot merge preference sets with different stimuli")
        return PreferenceData(self.labels, self.judges + other.judges, self.judge_ids + other.judge_ids)


@dataclass(frozen=True)
class ScoreSummary:
    labels: tuple[str, ...]
    s: tuple[int, ...]
    n: int
    per_judge_a: tuple[tuple[int, ...], ...] = ()

    def __post_init__(self):
        t = len(self.labels)
        if len(self.s) != t:
            raise DataError(f"{len(self.s)} scores for {t} stimuli")
        if self.n < 1:
            raise DataError(f"judge count must be positive, got {self.n}")
        if sum(self.s) != self.n * t * (t - 1) // 2:
            raise DataError(f"scores sum to {sum(self.s)}, a complete round robin gives {self.n * t * (t - 1) // 2}")

    @property
    def t(self) -> int:
        return len(self.labels)

    @classmethod
    def from_preferences(cls, data: PreferenceData) -> "ScoreSummary":
        a = tuple(tuple(int(v) for v in M.sum(axis=1)) for M in data.judges)
        s = tuple(int(v) for v in np.sum(a, axis=0))
        return cls(data.labels, s, data.n, a)

    @classmethod
    def from_counts(cls, labels: Sequence[str], counts, n: int) -> "ScoreSummary":
        """Totals from an aggregate matrix ``counts[i][j]`` (judges preferring i over j)."""
        c = np.array(counts, dtype=object)
        t = len(labels)
        if c.shape != (t, t):
            raise DataError(f"count matrix must be {t}x{t}, got {c.shape}")
        for i in range(t):
            for j in range(i + 1, t):
                if c[i, j] is None or c[j, i] is None or c[i, j] < 0 or c[j, i] < 0 or c[i, j] + c[j, i] != n:
                    raise DataError(f"pair ({labels[i]}, {labels[j]}): counts must be non-negative and sum to {n}")
        s = tuple(int(sum(c[i, j] for j in range(t) if j != i)) for i in range(t))
        return cls(tuple(labels), s, n)
