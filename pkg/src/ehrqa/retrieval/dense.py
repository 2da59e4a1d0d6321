"""Cosine-similarity retrieval over sentence embeddings."""

from __future__ import annotations

import logging

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .._validation import check_positive_int
from ..errors import DimensionMismatchError
from .types import RankedList

logger = logging.getLogger(__name__)

RETRIEVER_ID = "dense"


def score_dense(query_vec, chunk_vecs, top_k):
    """Rank ``chunk_vecs`` (mapping chunk_id -> Embedding) by cosine to ``query_vec``.

    Zero-norm chunk vectors are skipped with a warning; a zero-norm query
    yields an empty ranking.
    """
    top_k = check_positive_int(top_k, "top_k")
    if query_vec.norm == 0:
        logger.warning("zero-norm query embedding; dense ranking is empty")
        return RankedList(RETRIEVER_ID)
    scores = {}
    for cid, emb in chunk_vecs.items():
        if emb.dim != query_vec.dim:
            raise DimensionMismatchError(
                f"chunk {cid!r} has dimension {emb.dim}, query has {query_vec.dim}"
            )
        if emb.norm == 0:
            logger.warning("zero-norm embedding for chunk %s; excluded", cid)
            continue
        scores[cid] = float(np.dot(query_vec.vector, emb.vector) / (query_vec.norm * emb.norm))
    return RankedList.from_scores(RETRIEVER_ID, scores, top_k)


class DenseRetriever(BaseEstimator):
    """Dense retriever; ``embedder`` must expose ``embed(texts, kind)``."""

    def __init__(self, embedder=None):
        self.embedder = embedder

    def fit(self, chunks, y=None):
        from .services import embed

        chunks = sorted(chunks, key=lambda c: c.chunk_id)
        vecs = embed([c.text for c in chunks], "document", self.embedder)
        self.vectors_ = dict(zip((c.chunk_id for c in chunks), vecs))
        return self

    def rank(self, query, top_k):
        from .services import embed

        check_is_fitted(self, "vectors_")
        (qv,) = embed([query], "query", self.embedder)
        return score_dense(qv, self.vectors_, top_k)
