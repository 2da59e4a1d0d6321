"""Generation services.

Wire protocol: POST ``/generate`` with
``{model_id, system_text, user_text, temperature, max_tokens}`` returning
``{text, usage}``. Requests may carry a ``metadata`` dict for in-process
stubs; it is never sent over the wire.
"""

from __future__ import annotations

import itertools
import threading

from .._http import JSONServiceClient
from ..errors import RetryableServiceError, ServiceError

WIRE_FIELDS = ("model_id", "system_text", "user_text", "temperature", "max_tokens")


class HttpGenerationService:
    """Single-attempt HTTP client; :func:`generate` owns the retry loop."""

    def __init__(self, base_url, timeout=600.0, max_in_flight=8, transport=None):
        self.client = JSONServiceClient(
            base_url, timeout=timeout, max_attempts=1, backoff=0, max_in_flight=max_in_flight,
            transport=transport,
        )

    def complete(self, request):
        payload = {k: request[k] for k in WIRE_FIELDS}
        try:
            resp = self.client.post("/generate", payload)
        except RetryableServiceError as exc:
            # strip the client's "failed after 1 attempts" wrapper
            raise RetryableServiceError(str(exc)) from exc
        if not isinstance(resp, dict) or not isinstance(resp.get("text"), str):
            raise ServiceError("malformed /generate response: missing 'text'")
        return {"text": resp["text"], "usage": resp.get("usage") or {}}


def _usage(request, text):
    return {"prompt_chars": len(request["system_text"]) + len(request["user_text"]),
            "completion_chars": len(text)}


class EchoGoldService:
    """Returns the gold answer for the request's item verbatim."""

    def __init__(self, answers):
        self.answers = dict(answers)

    @classmethod
    def from_items(cls, items):
        return cls({it.item_id: it.gold_answer for it in items})

    def complete(self, request):
        item_id = (request.get("metadata") or {}).get("item_id")
        if item_id not in self.answers:
            raise ServiceError(f"echo stub has no answer for item {item_id!r}")
        text = self.answers[item_id]
        return {"text": text, "usage": _usage(request, text)}


class FixedStringService:
    def __init__(self, text):
        self.text = text

    def complete(self, request):
        return {"text": self.text, "usage": _usage(request, self.text)}


class ScriptedService:
    """Replays a sequence of outputs; exception instances in it are raised.

    After the script runs out the last entry repeats.
    """

    def __init__(self, script):
        self.script = list(script)
        if not self.script:
            raise ValueError("script must not be empty")
        self._it = itertools.chain(self.script, itertools.repeat(self.script[-1]))
        self._lock = threading.Lock()
        self.calls = 0

    def complete(self, request):
        with self._lock:
            step = next(self._it)
            self.calls += 1
        if isinstance(step, BaseException):
            raise step
        return {"text": step, "usage": _usage(request, step)}


class ThinkingWrapper:
    """Prefixes another service's output with a delimited thinking segment."""

    def __init__(self, inner, delimiters=("<think>", "</think>"), thought="Let me review the record."):
        self.inner = inner
        self.delimiters = delimiters
        self.thought = thought

    def complete(self, request):
        resp = self.inner.complete(request)
        open_tag, close_tag = self.delimiters
        text = f"{open_tag}{self.thought}{close_tag}{resp['text']}"
        return {"text": text, "usage": resp.get("usage", {})}
