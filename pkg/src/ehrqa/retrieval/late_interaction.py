"""Late-interaction (MaxSim) reranking over per-token embeddings."""

from __future__ import annotations

import logging

import numpy as np
from sklearn.base import BaseEstimator

from .._validation import check_positive_int
from ..errors import DimensionMismatchError
from .types import RankedList

logger = logging.getLogger(__name__)

RETRIEVER_ID = "maxsim"


def maxsim_score(query_rows, doc_rows):
    """Sum over query tokens of the best inner product with any document token."""
    sims = query_rows @ doc_rows.T
    return float(sims.max(axis=1).sum())


def rerank_maxsim(query_tokens, candidates, top_k):
    """Rerank ``candidates`` [(chunk_id, TokenEmbeddingMatrix), ...] by MaxSim."""
    top_k = check_positive_int(top_k, "top_k")
    candidates = list(candidates)
    if not candidates:
        raise ValueError("rerank_maxsim needs at least one candidate")
    if query_tokens.n_tokens == 0:
        logger.warning("empty query token matrix; nothing to rerank")
        return RankedList(RETRIEVER_ID)
    q = query_tokens.rows
    scores = {}
    for cid, mat in candidates:
        if mat.n_tokens == 0:
            logger.warning("empty token matrix for chunk %s; excluded", cid)
            continue
        if mat.dim != query_tokens.dim:
            raise DimensionMismatchError(f"chunk {cid!r} token dim {mat.dim} != query dim {query_tokens.dim}")
        scores[cid] = maxsim_score(q, mat.rows)
    return RankedList.from_scores(RETRIEVER_ID, scores, top_k)


class MaxSimReranker(BaseEstimator):
    """Reranker; ``token_embedder`` must expose ``embed_tokens(texts)``.

    Document token matrices are memoized per chunk id, so reranking the
    same chunk for several cut-offs embeds it once.
    """

    def __init__(self, token_embedder=None):
        self.token_embedder = token_embedder

    def fit(self, chunks, y=None):
        self.chunks_ = {c.chunk_id: c for c in chunks}
        self._memo = {}
        return self

    def _matrices(self, chunk_ids):
        from .services import embed_tokens

        missing = [cid for cid in chunk_ids if cid not in self._memo]
        if missing:
            mats = embed_tokens([self.chunks_[cid].text for cid in missing], self.token_embedder)
            self._memo.update(zip(missing, mats))
        return [(cid, self._memo[cid]) for cid in chunk_ids]

    def rerank(self, query, chunk_ids, top_k):
        from .services import embed_tokens

        (qm,) = embed_tokens([query], self.token_embedder)
        return rerank_maxsim(qm, self._matrices(list(chunk_ids)), top_k)
