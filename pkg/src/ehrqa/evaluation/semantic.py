"""Greedy token-matching semantic similarity (BERTScore-style, unweighted)."""

from __future__ import annotations

import logging
from typing import NamedTuple

import numpy as np

logger = logging.getLogger(__name__)


class SemanticF1(NamedTuple):
    precision: float
    recall: float
    f1: float


def _unit_rows(mat):
    mat = np.asarray(mat, dtype=np.float64)
    norms = np.linalg.norm(mat, axis=1, keepdims=True)
    return np.divide(mat, norms, out=np.zeros_like(mat), where=norms > 0)


def greedy_match(cand_rows, ref_rows):
    """Precision/recall/F1 from two token-embedding matrices."""
    c, r = _unit_rows(cand_rows), _unit_rows(ref_rows)
    sims = c @ r.T
    precision = float(np.clip(sims.max(axis=1).mean(), 0.0, 1.0))
    recall = float(np.clip(sims.max(axis=0).mean(), 0.0, 1.0))
    f1 = 0.0 if precision + recall == 0 else 2 * precision * recall / (precision + recall)
    return SemanticF1(precision, recall, f1)


def semantic_f1(candidate, reference, embedder):
    """Score ``candidate`` against ``reference`` with a token embedder.

    ``embedder.embed_tokens(texts)`` returns one (n_tokens, dim) matrix per
    text. An empty side yields all zeros.
    """
    cand_rows, ref_rows = embedder.embed_tokens([candidate, reference])
    if len(cand_rows) == 0 or len(ref_rows) == 0:
        logger.debug("empty text in semantic_f1; scoring 0")
        return SemanticF1(0.0, 0.0, 0.0)
    return greedy_match(cand_rows, ref_rows)
