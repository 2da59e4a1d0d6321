"""Sparse + dense candidate generation, RRF fusion, MaxSim reranking."""

from __future__ import annotations

from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .._validation import check_positive_int
from .dense import DenseRetriever
from .fusion import fuse_rrf
from .late_interaction import MaxSimReranker
from .sparse import BM25Retriever
from .types import FusionParams, RankedList


class HybridRetriever(BaseEstimator):
    """Three-stage retriever over one patient's scenario chunks.

    Each first-stage retriever returns ``candidate_multiplier * final_k``
    chunks; their RRF fusion (same cut-off) is reranked by MaxSim and the
    top ``final_k`` are kept. If the fused pool is smaller than the
    cut-off, unranked chunks are added in chunk-id order so the result
    always holds ``min(final_k, n_chunks)`` entries.

    Parameters
    ----------
    embedder : sentence embedding service
    token_embedder : token embedding service for MaxSim
    k1, b : BM25 parameters
    k_rrf : RRF smoothing constant
    candidate_multiplier : first-stage depth relative to ``final_k``
    """

    def __init__(self, embedder=None, token_embedder=None, k1=1.2, b=0.75, k_rrf=60,
                 candidate_multiplier=2):
        self.embedder = embedder
        self.token_embedder = token_embedder
        self.k1 = k1
        self.b = b
        self.k_rrf = k_rrf
        self.candidate_multiplier = candidate_multiplier

    def fit(self, chunks, y=None):
        chunks = list(chunks)
        self.fusion_ = FusionParams(self.k_rrf, self.candidate_multiplier)
        self.chunk_ids_ = sorted(c.chunk_id for c in chunks)
        if chunks:
            self.sparse_ = BM25Retriever(self.k1, self.b).fit(chunks)
            self.dense_ = DenseRetriever(self.embedder).fit(chunks)
            self.reranker_ = MaxSimReranker(self.token_embedder).fit(chunks)
        return self

    def candidates(self, question, final_k):
        """Stage-one lists and the fused pool for ``final_k``."""
        check_is_fitted(self, "fusion_")
        depth = self.fusion_.candidate_multiplier * final_k
        sparse = self.sparse_.rank(question, depth)
        dense = self.dense_.rank(question, depth)
        fused = fuse_rrf([sparse, dense], self.fusion_, depth)
        return sparse, dense, fused

    def rank(self, question, final_k):
        final_k = check_positive_int(final_k, "final_k")
        check_is_fitted(self, "fusion_")
        if not self.chunk_ids_:
            return RankedList("maxsim")
        _, _, fused = self.candidates(question, final_k)
        pool = fused.chunk_ids
        depth = self.fusion_.candidate_multiplier * final_k
        if len(pool) < depth:
            seen = set(pool)
            pool += [cid for cid in self.chunk_ids_ if cid not in seen][: depth - len(pool)]
        return self.reranker_.rerank(question, pool, final_k)


def retrieve(question, patient_chunks, final_k, params=None, embedder=None, token_embedder=None,
             k1=1.2, b=0.75):
    """One-shot convenience wrapper around :class:`HybridRetriever`."""
    params = params or FusionParams()
    retriever = HybridRetriever(
        embedder, token_embedder, k1=k1, b=b, k_rrf=params.k_rrf,
        candidate_multiplier=params.candidate_multiplier,
    ).fit(patient_chunks)
    return retriever.rank(question, final_k)
