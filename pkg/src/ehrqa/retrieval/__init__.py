from .analysis import analyze
from .dense import DenseRetriever, score_dense
from .fusion import fuse_rrf
from .hybrid import HybridRetriever, retrieve
from .late_interaction import MaxSimReranker, maxsim_score, rerank_maxsim
from .services import (
    CachedEmbeddingService,
    CachedTokenEmbeddingService,
    HttpEmbeddingService,
    HttpTokenEmbeddingService,
    OneHotSentenceEmbedder,
    OneHotTokenEmbedder,
    embed,
    embed_tokens,
)
from .sparse import BM25Retriever, SparseIndex, build_sparse_index, score_sparse
from .types import Embedding, FusionParams, RankedList, SparseParams, TokenEmbeddingMatrix

__all__ = [
    "BM25Retriever",
    "CachedEmbeddingService",
    "CachedTokenEmbeddingService",
    "DenseRetriever",
    "Embedding",
    "FusionParams",
    "HttpEmbeddingService",
    "HttpTokenEmbeddingService",
    "HybridRetriever",
    "MaxSimReranker",
    "OneHotSentenceEmbedder",
    "OneHotTokenEmbedder",
    "RankedList",
    "SparseIndex",
    "SparseParams",
    "TokenEmbeddingMatrix",
    "analyze",
    "build_sparse_index",
    "embed",
    "embed_tokens",
    "fuse_rrf",
    "maxsim_score",
    "rerank_maxsim",
    "retrieve",
    "score_dense",
    "score_sparse",
]
