"""BM25 inverted index over chunks."""

from __future__ import annotations

import logging
import math
from collections import Counter
from dataclasses import dataclass

from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .._validation import check_positive_int
from .analysis import analyze
from .types import RankedList, SparseParams

logger = logging.getLogger(__name__)

RETRIEVER_ID = "bm25"


@dataclass(frozen=True)
class SparseIndex:
    postings: dict[str, tuple[tuple[str, int], ...]]
    doc_lengths: dict[str, int]
    avgdl: float
    n_docs: int
    params: SparseParams

    def doc_freq(self, term):
        return len(self.postings.get(term, ()))

    def idf(self, term):
        """ln(1 + (N - n + 0.5) / (n + 0.5)); non-negative for every n."""
        n = self.doc_freq(term)
        return math.log1p((self.n_docs - n + 0.5) / (n + 0.5))


def build_sparse_index(chunks, params=None):
    params = params or SparseParams()
    chunks = list(chunks)
    if not chunks:
        raise ValueError("cannot build a sparse index over an empty chunk set")
    postings = {}
    doc_lengths = {}
    for chunk in sorted(chunks, key=lambda c: c.chunk_id):
        if chunk.chunk_id in doc_lengths:
            raise ValueError(f"duplicate chunk id {chunk.chunk_id!r}")
        terms = analyze(chunk.text)
        doc_lengths[chunk.chunk_id] = len(terms)
        for term, tf in Counter(terms).items():
            postings.setdefault(term, []).append((chunk.chunk_id, tf))
    avgdl = sum(doc_lengths.values()) / len(doc_lengths)
    return SparseIndex(
        postings={t: tuple(p) for t, p in postings.items()},
        doc_lengths=doc_lengths,
        avgdl=avgdl,
        n_docs=len(doc_lengths),
        params=params,
    )


def score_sparse(index, query, top_k):
    """Rank chunks by BM25 against ``query``; chunks sharing no term are omitted.

    Every query term occurrence contributes, so a repeated query term
    counts repeatedly.
    """
    top_k = check_positive_int(top_k, "top_k")
    terms = analyze(query)
    if not terms:
        logger.warning("query %r is empty after analysis", query)
        return RankedList(RETRIEVER_ID)
    k1, b = index.params.k1, index.params.b
    # all-zero-length corpus: the length term degenerates to 1
    avgdl = index.avgdl or 1.0
    scores = {}
    for term in terms:
        plist = index.postings.get(term)
        if not plist:
            continue
        idf = index.idf(term)
        for cid, tf in plist:
            norm = k1 * (1.0 - b + b * index.doc_lengths[cid] / avgdl)
            scores[cid] = scores.get(cid, 0.0) + idf * tf * (k1 + 1.0) / (tf + norm)
    return RankedList.from_scores(RETRIEVER_ID, scores, top_k)


class BM25Retriever(BaseEstimator):
    """Sparse lexical retriever.

    Parameters
    ----------
    k1 : float, default=1.2
        Term-frequency saturation.
    b : float, default=0.75
        Document-length normalization, in [0, 1].
    """

    def __init__(self, k1=1.2, b=0.75):
        self.k1 = k1
        self.b = b

    def fit(self, chunks, y=None):
        self.index_ = build_sparse_index(chunks, SparseParams(self.k1, self.b))
        return self

    def rank(self, query, top_k):
        check_is_fitted(self, "index_")
        return score_sparse(self.index_, query, top_k)
