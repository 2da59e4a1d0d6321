"""JSON request/response client with bounded retries and an in-flight cap."""

from __future__ import annotations

import logging
import threading
import time

import httpx

from .errors import RetryableServiceError, ServiceError

logger = logging.getLogger(__name__)

_RETRY_STATUS = {408, 425, 429, 500, 502, 503, 504}


def with_retries(fn, max_attempts=3, backoff=0.5, what="request", sleep=time.sleep):
    """Call ``fn(attempt)`` until it returns, retrying on :class:`RetryableServiceError`.

    Returns ``(result, attempts_used)``. Waits ``backoff * 2**(attempt-1)``
    seconds between attempts.
    """
    last = None
    for attempt in range(1, max_attempts + 1):
        try:
            return fn(attempt), attempt
        except RetryableServiceError as exc:
            last = exc
            logger.warning("%s failed (attempt %d/%d): %s", what, attempt, max_attempts, exc)
            if attempt < max_attempts and backoff > 0:
                sleep(backoff * 2 ** (attempt - 1))
    raise RetryableServiceError(f"{what} failed after {max_attempts} attempts: {last}", attempts=max_attempts)


class JSONServiceClient:
    """POST JSON payloads to ``base_url + path``.

    Thread-safe; at most ``max_in_flight`` requests are outstanding at once.
    """

    def __init__(self, base_url, timeout=60.0, max_attempts=3, backoff=0.5, max_in_flight=8, transport=None):
        self.base_url = base_url.rstrip("/")
        self.timeout = timeout
        self.max_attempts = max_attempts
        self.backoff = backoff
        self._sem = threading.BoundedSemaphore(max_in_flight)
        self._client = httpx.Client(base_url=self.base_url, timeout=timeout, transport=transport)

    def _once(self, path, payload):
        with self._sem:
            try:
                resp = self._client.post(path, json=payload)
            except (httpx.TimeoutException, httpx.TransportError) as exc:
                raise RetryableServiceError(f"{type(exc).__name__}: {exc}") from exc
        if resp.status_code in _RETRY_STATUS:
            raise RetryableServiceError(f"HTTP {resp.status_code} from {path}")
        if resp.status_code >= 400:
            raise ServiceError(f"HTTP {resp.status_code} from {path}: {resp.text[:200]}")
        try:
            return resp.json()
        except ValueError as exc:
            raise ServiceError(f"non-JSON response from {path}") from exc

    def post(self, path, payload):
        return self.post_with_attempts(path, payload)[0]

    def post_with_attempts(self, path, payload):
        return with_retries(
            lambda _attempt: self._once(path, payload),
            max_attempts=self.max_attempts,
            backoff=self.backoff,
            what=f"POST {self.base_url}{path}",
        )

    def close(self):
        self._client.close()
