"""Instantiate the configured model services (HTTP clients or stubs)."""

from __future__ import annotations

from dataclasses import dataclass

from .._http import JSONServiceClient
from ..errors import ConfigurationError
from ..evaluation.judge import CachedJudgeService, FixedJudgeService, OverlapJudgeService
from ..evaluation.nli import CachedNLIService, FixedNLIService, HttpNLIService, OverlapNLIService
from ..generation.services import (
    EchoGoldService,
    FixedStringService,
    HttpGenerationService,
    ScriptedService,
    ThinkingWrapper,
)
from ..retrieval.services import (
    CachedEmbeddingService,
    CachedTokenEmbeddingService,
    HttpEmbeddingService,
    HttpTokenEmbeddingService,
    OneHotSentenceEmbedder,
    OneHotTokenEmbedder,
)
from ..store import ContentStore


@dataclass
class ServiceBundle:
    embedder: object
    token_embedder: object
    semantic_embedder: object
    nli: object
    judge: object
    judge_model_id: str
    generators: dict

    def model_ids(self):
        return {
            "embedding": self.embedder.model_id,
            "reranker": self.token_embedder.model_id,
            "semantic": self.semantic_embedder.model_id,
            "judge": self.judge_model_id,
        }


def _client(cfg, scfg):
    return JSONServiceClient(scfg.base_url, timeout=cfg.timeout, max_attempts=cfg.max_attempts,
                             backoff=cfg.backoff, max_in_flight=cfg.max_in_flight)


def _sentence(cfg, scfg, store):
    if scfg.kind == "stub":
        return OneHotSentenceEmbedder(dim=scfg.dim or 4096, model_id=scfg.model_id or "stub-onehot-sentence")
    if scfg.kind == "http":
        svc = HttpEmbeddingService(scfg.base_url, scfg.model_id or "embedding", dim=scfg.dim,
                                   client=_client(cfg, scfg))
        return CachedEmbeddingService(svc, store)
    raise ConfigurationError(f"embedding service kind {scfg.kind!r} not supported")


def _token(cfg, scfg, store, default_id):
    if scfg.kind == "stub":
        return OneHotTokenEmbedder(dim=scfg.dim or 1024, model_id=scfg.model_id or default_id)
    if scfg.kind == "http":
        svc = HttpTokenEmbeddingService(scfg.base_url, scfg.model_id or default_id, dim=scfg.dim,
                                        client=_client(cfg, scfg))
        return CachedTokenEmbeddingService(svc, store)
    raise ConfigurationError(f"token embedding service kind {scfg.kind!r} not supported")


def _nli(cfg, scfg, store):
    if scfg.kind == "overlap":
        return OverlapNLIService()
    if scfg.kind == "fixed":
        if not scfg.distribution or len(scfg.distribution) != 3:
            raise ConfigurationError("fixed NLI stub needs distribution: [entail, neutral, contradict]")
        return FixedNLIService(*scfg.distribution)
    if scfg.kind == "http":
        return CachedNLIService(HttpNLIService(scfg.base_url, client=_client(cfg, scfg)), store,
                                model_id=scfg.model_id or "nli")
    raise ConfigurationError(f"NLI service kind {scfg.kind!r} not supported")


def _judge(cfg, scfg, store):
    if scfg.kind == "overlap":
        return OverlapJudgeService()
    if scfg.kind == "fixed":
        scores = scfg.scores or [5, 5, 5]
        if len(scores) != 3:
            raise ConfigurationError("fixed judge stub needs three scores")
        return FixedJudgeService(*scores)
    if scfg.kind == "http":
        svc = HttpGenerationService(scfg.base_url, timeout=cfg.timeout, max_in_flight=cfg.max_in_flight)
        return CachedJudgeService(svc, store)
    raise ConfigurationError(f"judge service kind {scfg.kind!r} not supported")


def _generator(cfg, mcfg, profile, items):
    scfg = mcfg.service
    if scfg.kind == "echo_gold":
        return EchoGoldService.from_items(items)
    if scfg.kind == "echo_gold_thinking":
        return ThinkingWrapper(EchoGoldService.from_items(items), delimiters=profile.think_delimiters)
    if scfg.kind == "fixed":
        return FixedStringService(scfg.text or "")
    if scfg.kind == "scripted":
        return ScriptedService(scfg.script or [""])
    if scfg.kind == "http":
        return HttpGenerationService(scfg.base_url, timeout=profile.timeout, max_in_flight=cfg.max_in_flight)
    raise ConfigurationError(f"generation service kind {scfg.kind!r} not supported")


def build_services(config, items, overrides=None):
    """Build every service the config names; ``overrides`` replaces generators by model id."""
    cfg = config.services
    store = ContentStore(config.cache_dir)
    gens = {}
    for mcfg, profile in zip(config.models, config.profiles):
        gens[profile.model_id] = _generator(cfg, mcfg, profile, items)
    gens.update(overrides or {})
    return ServiceBundle(
        embedder=_sentence(cfg, cfg.embedding, store),
        token_embedder=_token(cfg, cfg.reranker, store, "stub-onehot-token"),
        semantic_embedder=_token(cfg, cfg.semantic, store, "stub-onehot-token"),
        nli=_nli(cfg, cfg.nli, store),
        judge=_judge(cfg, cfg.judge, store),
        judge_model_id=cfg.judge.model_id or "judge",
        generators=gens,
    )
