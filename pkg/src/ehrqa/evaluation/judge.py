"""LLM-as-a-judge rubric scoring over the generation protocol."""

from __future__ import annotations

import json
import logging
import re
from functools import lru_cache
from importlib import resources
from string import Template
from typing import NamedTuple

from ..retrieval.analysis import analyze
from ..store import canonical_json, digest

logger = logging.getLogger(__name__)

ASPECTS = ("correctness", "completeness", "faithfulness")
TEMPLATE_ID = "judge.v1"
REASK_SUFFIX = (
    "\n\nYour previous reply could not be parsed. Reply with exactly three lines of the form "
    "'Aspect: N' where N is an integer from 1 to 5."
)
_LINE = re.compile(r"(?im)^\W*(correctness|completeness|faithfulness)\W*\s*[:=]\s*\**\s*([1-5])\b")


class JudgeScores(NamedTuple):
    correctness: float | None
    completeness: float | None
    faithfulness: float | None
    parse_failed: bool = False


@lru_cache(maxsize=None)
def _template():
    return resources.files(__package__).joinpath("templates", f"{TEMPLATE_ID}.txt").read_text(encoding="utf-8")


def render_judge_prompt(question, reference, candidate):
    return Template(_template()).substitute(question=question, reference=reference, candidate=candidate)


def to_percent(score):
    """Map a 1-5 rubric score linearly onto 0-100."""
    return (score - 1) / 4 * 100


def parse_judge_response(text):
    """Extract the three 1-5 scores, or ``None`` when any is missing."""
    text = text or ""
    try:
        obj = json.loads(text[text.find("{"): text.rfind("}") + 1]) if "{" in text else None
    except ValueError:
        obj = None
    if isinstance(obj, dict):
        lowered = {str(k).lower(): v for k, v in obj.items()}
        vals = [lowered.get(a) for a in ASPECTS]
        if all(isinstance(v, int) and not isinstance(v, bool) and 1 <= v <= 5 for v in vals):
            return tuple(vals)
    found = {}
    for m in _LINE.finditer(text):
        found.setdefault(m.group(1).lower(), int(m.group(2)))
    if all(a in found for a in ASPECTS):
        return tuple(found[a] for a in ASPECTS)
    return None


def judge_scores(question, reference, candidate, judge_service, model_id="judge", max_tokens=64):
    """Score a candidate with the rubric; one re-ask on an unparseable reply."""
    prompt = render_judge_prompt(question, reference, candidate)
    request = {
        "model_id": model_id,
        "system_text": "You are a careful clinical answer evaluator.",
        "user_text": prompt,
        "temperature": 0.0,
        "max_tokens": max_tokens,
        "metadata": {"question": question, "reference": reference, "candidate": candidate},
    }
    for attempt in range(2):
        resp = judge_service.complete(request)
        parsed = parse_judge_response(resp.get("text", ""))
        if parsed is not None:
            return JudgeScores(*(to_percent(s) for s in parsed))
        logger.warning("unparseable judge reply (attempt %d): %r", attempt + 1, resp.get("text", "")[:120])
        request = dict(request, user_text=prompt + REASK_SUFFIX)
    return JudgeScores(None, None, None, parse_failed=True)


def _reply(c, m, f):
    return f"Correctness: {c}\nCompleteness: {m}\nFaithfulness: {f}"


class FixedJudgeService:
    def __init__(self, correctness=5, completeness=5, faithfulness=5):
        self.text = _reply(correctness, completeness, faithfulness)

    def complete(self, request):
        return {"text": self.text, "usage": {}}


class GarbledJudgeService:
    def __init__(self, text="I think the answer is pretty good overall."):
        self.text = text
        self.calls = 0

    def complete(self, request):
        self.calls += 1
        return {"text": self.text, "usage": {}}


class OverlapJudgeService:
    """Deterministic stub scoring from token overlap carried in request metadata."""

    def complete(self, request):
        meta = request.get("metadata") or {}
        ref, cand = set(analyze(meta.get("reference", ""))), set(analyze(meta.get("candidate", "")))
        if not ref or not cand:
            return {"text": _reply(1, 1, 1), "usage": {}}
        inter = len(ref & cand)
        recall, precision = inter / len(ref), inter / len(cand)
        f1 = 0.0 if inter == 0 else 2 * precision * recall / (precision + recall)

        def scale(x):
            return 1 + round(4 * x)

        return {"text": _reply(scale(f1), scale(recall), scale(precision)), "usage": {}}


class CachedJudgeService:
    """Caches judge replies by request digest (wire fields only)."""

    def __init__(self, service, store):
        self.service = service
        self.store = store

    def complete(self, request):
        wire = {k: request[k] for k in ("model_id", "system_text", "user_text", "temperature", "max_tokens")}
        key = digest(canonical_json(wire))
        hit = self.store.get_json("judge", key)
        if hit is not None:
            return hit
        resp = self.service.complete(request)
        self.store.put_json("judge", key, {"text": resp.get("text", ""), "usage": resp.get("usage") or {}})
        return resp
