"""Sentence-level METEOR with exact unigram matching.

score = Fmean * (1 - penalty), with
Fmean = P*R / (alpha*P + (1-alpha)*R) (alpha = 0.9, i.e. 10PR / (R + 9P)),
penalty = gamma * (chunks / matches) ** beta (gamma = 0.5, beta = 3).

Matching is exact on lowercased alphanumeric tokens; no stemming or
synonym stages. The alignment maximizes matches and, among those, minimizes
the number of chunks (runs of matches contiguous in both strings).
"""

from __future__ import annotations

from collections import Counter

from ..retrieval.analysis import analyze

ALPHA = 0.9
BETA = 3.0
GAMMA = 0.5
# search nodes before settling for the best alignment found so far
_SEARCH_BUDGET = 200_000


def count_chunks(pairs):
    """Number of chunks in an alignment given as (hyp_idx, ref_idx) pairs."""
    pairs = sorted(pairs)
    chunks = 0
    prev = None
    for h, r in pairs:
        if prev is None or not (h == prev[0] + 1 and r == prev[1] + 1):
            chunks += 1
        prev = (h, r)
    return chunks


def _greedy_alignment(hyp, ref):
    need = Counter(hyp) & Counter(ref)
    free = {}
    for j, t in enumerate(ref):
        free.setdefault(t, []).append(j)
    used = set()
    pairs = []
    prev_j = None
    for i, t in enumerate(hyp):
        if need.get(t, 0) == 0:
            prev_j = None
            continue
        cand = [j for j in free[t] if j not in used]
        j = prev_j + 1 if prev_j is not None and prev_j + 1 in cand else cand[0]
        used.add(j)
        need[t] -= 1
        pairs.append((i, j))
        prev_j = j
    return pairs


def align(hyp, ref, budget=_SEARCH_BUDGET):
    """Maximum-match, minimum-chunk alignment between two token lists.

    Depth-first search over hypothesis positions with a links-based bound,
    seeded by a greedy alignment. Inputs without repeated tokens have a
    single maximum alignment and are solved in linear time.
    """
    need0 = Counter(hyp) & Counter(ref)
    total = sum(need0.values())
    if total == 0:
        return []
    best = _greedy_alignment(hyp, ref)
    best_links = total - count_chunks(best)
    if best_links == total - 1:
        return best

    ref_pos = {}
    for j, t in enumerate(ref):
        ref_pos.setdefault(t, []).append(j)
    remaining_hyp = Counter(t for t in hyp if t in need0)
    need = Counter(need0)
    used = set()
    path = []
    nodes = 0

    def dfs(i, prev_j, links, left):
        nonlocal best, best_links, nodes
        nodes += 1
        if links + left <= best_links or nodes > budget:
            return
        if left == 0 or i == len(hyp):
            if left == 0 and links > best_links:
                best, best_links = list(path), links
            return
        t = hyp[i]
        if t not in need0:
            dfs(i + 1, None, links, left)
            return
        remaining_hyp[t] -= 1
        if need[t] > 0:
            options = [j for j in ref_pos[t] if j not in used]
            if prev_j is not None and prev_j + 1 in options:
                options.remove(prev_j + 1)
                options.insert(0, prev_j + 1)
            for j in options:
                used.add(j)
                need[t] -= 1
                path.append((i, j))
                gain = 1 if prev_j is not None and j == prev_j + 1 else 0
                dfs(i + 1, j, links + gain, left - 1)
                path.pop()
                need[t] += 1
                used.discard(j)
        if remaining_hyp[t] >= need[t]:
            dfs(i + 1, None, links, left)
        remaining_hyp[t] += 1

    dfs(0, None, 0, total)
    return sorted(best)


def meteor_from_tokens(hyp, ref, alpha=ALPHA, beta=BETA, gamma=GAMMA):
    if not hyp or not ref:
        return 0.0
    pairs = align(hyp, ref)
    m = len(pairs)
    if m == 0:
        return 0.0
    precision = m / len(hyp)
    recall = m / len(ref)
    fmean = precision * recall / (alpha * precision + (1 - alpha) * recall)
    penalty = gamma * (count_chunks(pairs) / m) ** beta
    return fmean * (1 - penalty)


def meteor(candidate, reference):
    """METEOR of ``candidate`` against ``reference`` in [0, 1)."""
    return meteor_from_tokens(analyze(candidate), analyze(reference))
