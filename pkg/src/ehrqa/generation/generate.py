"""Running one prompt against a generation service."""

from __future__ import annotations

import logging
import time
from dataclasses import asdict, dataclass, field

from .._http import with_retries
from ..chunking import DEFAULT_SCHEME, get_counter
from ..corpus.types import Task
from ..errors import RetryableServiceError, ServiceError
from .parsing import extract_answer_field, extract_option, strip_thinking

logger = logging.getLogger(__name__)

OK = "ok"
FAILED = "failed"
OVERFLOW = "overflow"


@dataclass
class GenerationRecord:
    item_id: str
    model_id: str
    strategy: str = ""
    scenario: str = ""
    raw_output: str = ""
    parsed_answer: str = ""
    parsed_option: str | None = None
    latency: float = 0.0
    usage: dict = field(default_factory=dict)
    overflow: bool = False
    status: str = OK
    attempts: int = 0
    error: str | None = None

    def to_record(self, include_latency=True):
        rec = asdict(self)
        if not include_latency:
            rec.pop("latency")
        return rec


def prompt_tokens(bundle, scheme=DEFAULT_SCHEME):
    counter = get_counter(scheme)
    return counter.count(bundle.system_text) + counter.count(bundle.user_text)


def parse_output(raw, task, options=(), delimiters=("<think>", "</think>")):
    """Return ``(parsed_answer, parsed_option)`` for a raw completion."""
    answer = extract_answer_field(strip_thinking(raw, delimiters))
    option = None
    if Task(task) is Task.MULTIPLE_CHOICE and options:
        option = extract_option(answer, options)
    return answer, option


def generate(bundle, profile, service, options=(), strategy="", scenario="", scheme=DEFAULT_SCHEME,
             sleep=time.sleep, check_window=True):
    """Send ``bundle`` to ``service`` and parse the completion.

    Transient failures are retried up to ``profile.max_attempts`` with
    exponential backoff; when they are exhausted the record is marked
    ``failed`` instead of raising. A prompt that cannot fit the model's
    context window is recorded as ``overflow`` without calling the service.
    """
    rec = GenerationRecord(bundle.item_id, profile.model_id, strategy=str(strategy), scenario=str(scenario))
    if check_window:
        needed = prompt_tokens(bundle, scheme) + bundle.decoding.max_tokens
        if needed > profile.context_window:
            rec.status, rec.overflow = OVERFLOW, True
            rec.error = f"prompt needs {needed} tokens, window is {profile.context_window}"
            return rec

    request = {
        "model_id": profile.model_id,
        "system_text": bundle.system_text,
        "user_text": bundle.user_text,
        "temperature": bundle.decoding.temperature,
        "max_tokens": bundle.decoding.max_tokens,
        "metadata": {"item_id": bundle.item_id, "strategy": str(strategy), "scenario": str(scenario)},
    }
    start = time.perf_counter()
    try:
        resp, attempts = with_retries(
            lambda _n: service.complete(request),
            max_attempts=profile.max_attempts,
            backoff=profile.backoff,
            what=f"generate {profile.model_id}/{bundle.item_id}",
            sleep=sleep,
        )
    except (RetryableServiceError, ServiceError) as exc:
        rec.latency = time.perf_counter() - start
        rec.status = FAILED
        rec.attempts = getattr(exc, "attempts", None) or 1
        rec.error = str(exc)
        logger.error("generation failed for %s: %s", bundle.item_id, exc)
        return rec
    rec.latency = time.perf_counter() - start
    rec.attempts = attempts
    rec.raw_output = resp["text"]
    rec.usage = dict(resp.get("usage") or {})
    rec.parsed_answer, rec.parsed_option = parse_output(
        rec.raw_output, bundle.task, options, profile.think_delimiters
    )
    return rec
