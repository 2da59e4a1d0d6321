"""NLI-based factual consistency and precision.

The reference answer is the premise and the candidate the hypothesis.
Services expose ``classify(premise, hypothesis) -> {entail, neutral, contradict}``;
over the wire this is POST ``/nli`` with ``{premise, hypothesis}``.
"""

from __future__ import annotations

import logging
import math
from typing import NamedTuple

from .._http import JSONServiceClient
from ..retrieval.analysis import analyze
from ..store import digest

logger = logging.getLogger(__name__)

LABELS = ("entail", "neutral", "contradict")
SUM_TOLERANCE = 1e-6


class NLIScores(NamedTuple):
    entailment: float | None
    non_contradiction: float | None


def check_distribution(dist):
    if not isinstance(dist, dict) or any(k not in dist for k in LABELS):
        return False
    try:
        probs = [float(dist[k]) for k in LABELS]
    except (TypeError, ValueError):
        return False
    if any(not math.isfinite(p) or p < -SUM_TOLERANCE or p > 1 + SUM_TOLERANCE for p in probs):
        return False
    return abs(sum(probs) - 1.0) <= SUM_TOLERANCE


def nli_scores(reference, candidate, nli_service):
    """Return ``(P(entail), 1 - P(contradict))``; ``(None, None)`` if the service misbehaves."""
    dist = nli_service.classify(reference, candidate)
    if not check_distribution(dist):
        logger.warning("malformed NLI distribution %r", dist)
        return NLIScores(None, None)
    entail = min(1.0, max(0.0, float(dist["entail"])))
    contra = min(1.0, max(0.0, float(dist["contradict"])))
    return NLIScores(entail, 1.0 - contra)


class FixedNLIService:
    def __init__(self, entail, neutral, contradict):
        self.dist = {"entail": entail, "neutral": neutral, "contradict": contradict}

    def classify(self, premise, hypothesis):
        return dict(self.dist)


class OverlapNLIService:
    """Deterministic stub: entailment is the share of hypothesis tokens found in the premise.

    Never predicts contradiction.
    """

    def classify(self, premise, hypothesis):
        hyp = analyze(hypothesis)
        if not hyp:
            return {"entail": 0.0, "neutral": 1.0, "contradict": 0.0}
        prem = set(analyze(premise))
        e = sum(t in prem for t in hyp) / len(hyp)
        return {"entail": e, "neutral": 1.0 - e, "contradict": 0.0}


class HttpNLIService:
    def __init__(self, base_url, client=None, **client_kw):
        self.client = client or JSONServiceClient(base_url, **client_kw)

    def classify(self, premise, hypothesis):
        return self.client.post("/nli", {"premise": premise, "hypothesis": hypothesis})


class CachedNLIService:
    def __init__(self, service, store, model_id="nli"):
        self.service = service
        self.store = store
        self.model_id = model_id

    def classify(self, premise, hypothesis):
        key = digest(self.model_id, premise, hypothesis)
        hit = self.store.get_json("nli", key)
        if hit is not None:
            return hit
        dist = self.service.classify(premise, hypothesis)
        if check_distribution(dist):
            self.store.put_json("nli", key, dist)
        return dist
