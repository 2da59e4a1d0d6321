"""Reciprocal Rank Fusion."""

from __future__ import annotations

import math

from .._validation import check_positive_int
from .types import FusionParams, RankedList

RETRIEVER_ID = "rrf"


def fuse_rrf(lists, params=None, top_k=None):
    """Fuse rankings: score(d) = sum over lists of 1 / (k_rrf + rank(d)).

    Lists not containing ``d`` contribute nothing. Contributions are summed
    with ``math.fsum`` so the result does not depend on list order.
    """
    params = params or FusionParams()
    lists = list(lists)
    if not lists:
        raise ValueError("fuse_rrf needs at least one ranked list")
    if top_k is not None:
        top_k = check_positive_int(top_k, "top_k")
    parts = {}
    for ranked in lists:
        for rank, (cid, _) in enumerate(ranked.entries, start=1):
            parts.setdefault(cid, []).append(1.0 / (params.k_rrf + rank))
    scores = {cid: math.fsum(v) for cid, v in parts.items()}
    return RankedList.from_scores(RETRIEVER_ID, scores, top_k)
