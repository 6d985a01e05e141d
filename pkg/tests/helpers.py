"""Shared test utilities."""
from __future__ import annotations

import itertools

import numpy as np

LABELS = ("Vis1", "Vis2", "Vis3", "Vis4", "Vis5")

# Aggregate preferences from the two-group study: entry [i][j] counts judges preferring
# stimulus i over stimulus j (five judges per group).
NOVICE_COUNTS = (
    (0, 0, 0, 0, 0),
    (5, 0, 3, 2, 0),
    (5, 2, 0, 2, 0),
    (5, 3, 3, 0, 0),
    (5, 5, 5, 5, 0),
)
EXPERT_COUNTS = (
    (0, 0, 1, 0, 0),
    (5, 0, 3, 2, 2),
    (4, 2, 0, 1, 1),
    (5, 3, 4, 0, 0),
    (5, 3, 4, 5, 0),
)


def ranking_matrix(order, t=None) -> np.ndarray:
    """Preference matrix of a judge whose ranking (best first) is ``order``."""
    t = len(order) if t is None else t
    M = np.zeros((t, t), dtype=np.int64)
    for a, i in enumerate(order):
        for j in order[a + 1:]:
            M[i, j] = 1
    return M


def decompose_counts(counts, n):
    """Find ``n`` transitive judges whose pairwise preferences sum to ``counts``.

    Depth-first search over rankings with pruning on the remaining counts;
    returns a list of rankings (best first) or None.
    """
    C = np.array(counts, dtype=np.int64)
    t = C.shape[0]
    perms = [ranking_matrix(p) for p in itertools.permutations(range(t))]
    orders = list(itertools.permutations(range(t)))

    def search(remaining, left, start):
        if left == 0:
            return [] if not remaining.any() else None
        for k in range(start, len(perms)):
            rest = remaining - perms[k]
            if (rest < 0).any():
                continue
            # the other left-1 judges contribute at most left-1 per ordered pair
            if (rest > left - 1).any():
                continue
            found = search(rest, left - 1, k)
            if found is not None:
                return [orders[k]] + found
        return None

    return search(C, n, 0)


def brute_force_triads(M) -> int:
    """Count intransitive triples directly."""
    M = np.asarray(M)
    t = M.shape[0]
    d = 0
    for i, j, k in itertools.combinations(range(t), 3):
        if (M[i, j] and M[j, k] and M[k, i]) or (M[j, i] and M[k, j] and M[i, k]):
            d += 1
    return d


def brute_force_ncc(image: np.ndarray, templ: np.ndarray) -> np.ndarray:
    """Score map by direct evaluation of the normalized cross-correlation."""
    H, W = image.shape
    h, w = templ.shape
    T = templ.astype(np.float64)
    tz = T - T.mean()
    tn = np.sqrt((tz * tz).sum())
    out = np.zeros((H - h + 1, W - w + 1))
    for v in range(H - h + 1):
        for u in range(W - w + 1):
            P = image[v:v + h, u:u + w].astype(np.float64)
            pz = P - P.mean()
            pn = np.sqrt((pz * pz).sum())
            if tn == 0 or pn == 0:
                out[v, u] = 0.0
            else:
                out[v, u] = float((tz * pz).sum() / (tn * pn))
    return out


def enumerate_mwu_p(a, b) -> float:
    """Two-sided p of U by enumerating every split of the pooled sample."""
    from scopevis.pairstats import midranks

    pooled = list(a) + list(b)
    ranks = midranks(pooled)
    na, N = len(a), len(pooled)
    mean = na * len(b) / 2.0
    u_obs = sum(ranks[:na]) - na * (na + 1) / 2.0
    hits = total = 0
    for idx in itertools.combinations(range(N), na):
        u = sum(ranks[i] for i in idx) - na * (na + 1) / 2.0
        total += 1
        if abs(u - mean) >= abs(u_obs - mean) - 1e-9:
            hits += 1
    return hits / total


def enumerate_wilcoxon_p(diffs) -> float:
    """Two-sided p of min(W+, W-) by enumerating all sign patterns."""
    from scopevis.pairstats import midranks

    d = [v for v in diffs if v != 0]
    ranks = midranks([abs(v) for v in d])
    w_obs = min(sum(r for r, v in zip(ranks, d) if v > 0), sum(r for r, v in zip(ranks, d) if v < 0))
    hits = 0
    for signs in itertools.product((1, -1), repeat=len(d)):
        wp = sum(r for r, s in zip(ranks, signs) if s > 0)
        wm = sum(r for r, s in zip(ranks, signs) if s < 0)
        if min(wp, wm) <= w_obs + 1e-9:
            hits += 1
    return hits / 2 ** len(d)
