"""Embedding services: HTTP clients, deterministic in-process stubs, disk cache.

Wire protocol (POST, JSON):

* ``/embed``        ``{model_id, kind, texts}`` -> ``{vectors: [[float]]}``
* ``/token_embed``  ``{model_id, texts}``       -> ``{token_vectors: [[[float]]]}``

Sentence services expose ``embed(texts, kind) -> ndarray (n, dim)``;
token services expose ``embed_tokens(texts) -> list[ndarray (n_i, dim)]``.
Both carry ``model_id`` and ``dim``.
"""

from __future__ import annotations

import hashlib
import threading
from functools import lru_cache

import numpy as np

from .._http import JSONServiceClient
from ..errors import DimensionMismatchError, ServiceError
from ..store import digest
from .analysis import analyze
from .types import Embedding, TokenEmbeddingMatrix

KINDS = ("query", "document")


@lru_cache(maxsize=65536)
def hashed_index(token, dim):
    h = hashlib.blake2b(token.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(h, "little") % dim


class OneHotSentenceEmbedder:
    """Order-free stub: one-hot per distinct token, summed, L2-normalized.

    Tokens are hashed into ``dim`` buckets; distinct tokens sharing a bucket
    collide, so pick ``dim`` well above the vocabulary in play.
    """

    def __init__(self, dim=4096, model_id="stub-onehot-sentence"):
        self.dim = dim
        self.model_id = model_id

    def embed(self, texts, kind="document"):
        out = np.zeros((len(texts), self.dim))
        for i, text in enumerate(texts):
            idx = sorted({hashed_index(t, self.dim) for t in analyze(text)})
            if idx:
                out[i, idx] = 1.0
                out[i] /= np.linalg.norm(out[i])
        return out


class OneHotTokenEmbedder:
    """Per-token one-hot stub: row r is the unit basis vector of token r's bucket."""

    def __init__(self, dim=1024, model_id="stub-onehot-token"):
        self.dim = dim
        self.model_id = model_id

    def embed_tokens(self, texts):
        out = []
        for text in texts:
            toks = analyze(text)
            mat = np.zeros((len(toks), self.dim))
            if toks:
                mat[np.arange(len(toks)), [hashed_index(t, self.dim) for t in toks]] = 1.0
            out.append(mat)
        return out


class HttpEmbeddingService:
    def __init__(self, base_url, model_id, dim=None, client=None, **client_kw):
        self.model_id = model_id
        self.dim = dim
        self.client = client or JSONServiceClient(base_url, **client_kw)

    def embed(self, texts, kind="document"):
        if not texts:
            return np.zeros((0, self.dim or 0))
        resp = self.client.post("/embed", {"model_id": self.model_id, "kind": kind, "texts": list(texts)})
        try:
            arr = np.asarray(resp["vectors"], dtype=np.float64)
        except (KeyError, TypeError, ValueError) as exc:
            raise ServiceError(f"malformed /embed response: {exc}") from exc
        if arr.ndim != 2 or arr.shape[0] != len(texts):
            raise ServiceError(f"/embed returned shape {arr.shape} for {len(texts)} texts")
        return arr


class HttpTokenEmbeddingService:
    def __init__(self, base_url, model_id, dim=None, client=None, **client_kw):
        self.model_id = model_id
        self.dim = dim
        self.client = client or JSONServiceClient(base_url, **client_kw)

    def embed_tokens(self, texts):
        if not texts:
            return []
        resp = self.client.post("/token_embed", {"model_id": self.model_id, "texts": list(texts)})
        try:
            mats = [np.asarray(m, dtype=np.float64) for m in resp["token_vectors"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise ServiceError(f"malformed /token_embed response: {exc}") from exc
        if len(mats) != len(texts):
            raise ServiceError(f"/token_embed returned {len(mats)} matrices for {len(texts)} texts")
        return [m.reshape(0, self.dim or 0) if m.size == 0 else m for m in mats]


class CachedEmbeddingService:
    """Wrap a sentence service with the content-addressed store.

    Key: ``(model_id, kind, sha256(text))``. Only misses reach the service.
    """

    def __init__(self, service, store):
        self.service = service
        self.store = store
        self.model_id = service.model_id
        self.dim = getattr(service, "dim", None)
        self.hits = 0
        self.misses = 0
        self._lock = threading.Lock()

    def embed(self, texts, kind="document"):
        ns = f"embed/{_safe(self.model_id)}/{kind}"
        keys = [digest(self.model_id, kind, t) for t in texts]
        found = [self.store.get_array(ns, k) for k in keys]
        todo = [i for i, v in enumerate(found) if v is None]
        with self._lock:
            self.hits += len(texts) - len(todo)
            self.misses += len(todo)
        if todo:
            fresh = self.service.embed([texts[i] for i in todo], kind)
            for i, vec in zip(todo, fresh):
                self.store.put_array(ns, keys[i], vec)
                found[i] = np.asarray(vec, dtype=np.float64)
        if not texts:
            return np.zeros((0, self.dim or 0))
        return np.vstack(found)


class CachedTokenEmbeddingService:
    def __init__(self, service, store):
        self.service = service
        self.store = store
        self.model_id = service.model_id
        self.dim = getattr(service, "dim", None)

    def embed_tokens(self, texts):
        ns = f"token_embed/{_safe(self.model_id)}"
        keys = [digest(self.model_id, "token", t) for t in texts]
        found = [self.store.get_array(ns, k) for k in keys]
        todo = [i for i, v in enumerate(found) if v is None]
        if todo:
            fresh = self.service.embed_tokens([texts[i] for i in todo])
            for i, mat in zip(todo, fresh):
                self.store.put_array(ns, keys[i], mat)
                found[i] = np.asarray(mat, dtype=np.float64)
        return found


def _safe(model_id):
    return "".join(ch if ch.isalnum() or ch in "-_." else "_" for ch in model_id)


def embed(texts, kind, service):
    """Embed ``texts`` as ``kind`` ("query" or "document") into :class:`Embedding` objects."""
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}, got {kind!r}")
    texts = list(texts)
    if not texts:
        return []
    arr = np.asarray(service.embed(texts, kind), dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] != len(texts):
        raise ServiceError(f"embedder returned shape {arr.shape} for {len(texts)} texts")
    dim = getattr(service, "dim", None)
    if dim is not None and arr.shape[1] != dim:
        raise DimensionMismatchError(f"embedder returned dimension {arr.shape[1]}, configured {dim}")
    return [Embedding(row, service.model_id) for row in arr]


def embed_tokens(texts, service):
    texts = list(texts)
    if not texts:
        return []
    mats = service.embed_tokens(texts)
    dim = getattr(service, "dim", None)
    out = []
    for m in mats:
        m = np.asarray(m, dtype=np.float64)
        if m.size and dim is not None and m.shape[1] != dim:
            raise DimensionMismatchError(f"token embedder returned dimension {m.shape[1]}, configured {dim}")
        out.append(TokenEmbeddingMatrix(m if m.size else np.zeros((0, dim or 0)), service.model_id))
    return out
