"""Value types shared by the retrievers."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .._validation import check_positive_int, check_real


def _order(scores):
    # descending score, ascending chunk_id on ties
    return sorted(scores.items(), key=lambda kv: (-kv[1], kv[0]))


@dataclass(frozen=True)
class RankedList:
    retriever_id: str
    entries: tuple[tuple[str, float], ...] = ()

    def __post_init__(self):
        ids = [cid for cid, _ in self.entries]
        if len(set(ids)) != len(ids):
            raise ValueError(f"duplicate chunk ids in {self.retriever_id} ranking")
        keys = [(-s, cid) for cid, s in self.entries]
        if keys != sorted(keys):
            raise ValueError(f"{self.retriever_id} ranking is not ordered by (-score, chunk_id)")

    @classmethod
    def from_scores(cls, retriever_id, scores, top_k=None):
        ranked = _order(scores)
        if top_k is not None:
            ranked = ranked[:top_k]
        return cls(retriever_id, tuple((cid, float(s)) for cid, s in ranked))

    @property
    def chunk_ids(self):
        return [cid for cid, _ in self.entries]

    @property
    def scores(self):
        return dict(self.entries)

    def rank(self, chunk_id):
        """1-based position of ``chunk_id``, or ``None`` if absent."""
        for i, (cid, _) in enumerate(self.entries, start=1):
            if cid == chunk_id:
                return i
        return None

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)


@dataclass(frozen=True)
class FusionParams:
    k_rrf: float = 60
    candidate_multiplier: int = 2

    def __post_init__(self):
        check_real(self.k_rrf, "k_rrf", low=0, low_inclusive=False)
        check_positive_int(self.candidate_multiplier, "candidate_multiplier")


@dataclass(frozen=True)
class SparseParams:
    k1: float = 1.2
    b: float = 0.75

    def __post_init__(self):
        check_real(self.k1, "k1", low=0, low_inclusive=False)
        check_real(self.b, "b", low=0, high=1)


@dataclass(frozen=True, eq=False)
class Embedding:
    vector: np.ndarray
    model_id: str
    norm: float = field(default=None)

    def __post_init__(self):
        vec = np.asarray(self.vector, dtype=np.float64)
        object.__setattr__(self, "vector", vec)
        if self.norm is None:
            object.__setattr__(self, "norm", float(np.linalg.norm(vec)))

    @property
    def dim(self):
        return self.vector.shape[0]


@dataclass(frozen=True, eq=False)
class TokenEmbeddingMatrix:
    rows: np.ndarray
    model_id: str

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=np.float64)
        if rows.ndim == 1 and rows.size == 0:
            rows = rows.reshape(0, 0)
        if rows.ndim != 2:
            raise ValueError(f"token matrix must be 2-D, got shape {rows.shape}")
        object.__setattr__(self, "rows", rows)

    @property
    def n_tokens(self):
        return self.rows.shape[0]

    @property
    def dim(self):
        return self.rows.shape[1]
