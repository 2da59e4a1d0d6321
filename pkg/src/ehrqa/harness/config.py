"""Experiment configuration: YAML file -> validated :class:`ExperimentConfig`."""

from __future__ import annotations

import copy
import hashlib
import os
from pathlib import Path
from typing import Literal

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from ..assembly import Strategy
from ..chunking import DEFAULT_CHUNK_SIZE, DEFAULT_SCHEME, available_schemes
from ..corpus.types import Scenario
from ..errors import ConfigurationError
from ..generation.profiles import DEFAULT_MAX_OUTPUT_TOKENS, PRESETS, ModelProfile
from ..store import canonical_json

ALL_SCENARIOS = [s.value for s in Scenario]
PAPER_STRATEGIES = [
    "full_context",
    "rag_chunks(5)",
    "rag_chunks(10)",
    "rag_chunks(15)",
    "rag_hierarchical(3)",
    "rag_hierarchical(5)",
    "rag_hierarchical(7)",
]
ALL_METRICS = ["meteor", "semantic_f1", "nli", "judge", "mc_accuracy"]

# env var -> service whose base_url it overrides
ENV_SERVICE_URLS = {
    "EHRQA_EMBEDDING_URL": "embedding",
    "EHRQA_RERANKER_URL": "reranker",
    "EHRQA_SEMANTIC_URL": "semantic",
    "EHRQA_NLI_URL": "nli",
    "EHRQA_JUDGE_URL": "judge",
}
ENV_GENERATION_URL = "EHRQA_GENERATION_URL"
ENV_CACHE_DIR = "EHRQA_CACHE_DIR"


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class CorpusConfig(_Strict):
    notes: str
    qa: str
    min_context_tokens: int = Field(0, ge=0)


class ChunkingConfig(_Strict):
    chunk_size: int = Field(DEFAULT_CHUNK_SIZE, ge=1)
    token_scheme: str = DEFAULT_SCHEME

    @field_validator("token_scheme")
    @classmethod
    def _known(cls, v):
        if v not in available_schemes():
            raise ValueError(f"unknown token scheme {v!r}")
        return v


class RetrievalConfig(_Strict):
    k1: float = Field(1.2, gt=0)
    b: float = Field(0.75, ge=0, le=1)
    k_rrf: float = Field(60, gt=0)
    candidate_multiplier: int = Field(2, ge=1)


class ServiceConfig(_Strict):
    kind: Literal["stub", "http", "fixed", "overlap", "echo_gold", "echo_gold_thinking", "scripted"] = "stub"
    model_id: str | None = None
    base_url: str | None = None
    dim: int | None = Field(None, ge=1)
    # fixed-output stubs
    text: str | None = None
    scores: list[int] | None = None
    distribution: list[float] | None = None
    script: list[str] | None = None

    @model_validator(mode="after")
    def _http_needs_url(self):
        if self.kind == "http" and not self.base_url:
            raise ValueError("http services need base_url")
        return self


class ServicesConfig(_Strict):
    embedding: ServiceConfig = ServiceConfig(kind="stub", model_id="stub-onehot-sentence", dim=4096)
    reranker: ServiceConfig = ServiceConfig(kind="stub", model_id="stub-onehot-token", dim=1024)
    semantic: ServiceConfig = ServiceConfig(kind="stub", model_id="stub-onehot-token", dim=4096)
    nli: ServiceConfig = ServiceConfig(kind="overlap", model_id="stub-overlap-nli")
    judge: ServiceConfig = ServiceConfig(kind="overlap", model_id="stub-overlap-judge")
    timeout: float = Field(60.0, gt=0)
    max_attempts: int = Field(3, ge=1)
    backoff: float = Field(0.5, ge=0)
    max_in_flight: int = Field(8, ge=1)


class ModelConfig(_Strict):
    model_id: str
    preset: str | None = None
    family: Literal["instruct", "reasoning"] | None = None
    context_window: int | None = Field(None, ge=1)
    temperature: float | None = Field(None, ge=0)
    think_token_budget: int | None = Field(None, ge=1)
    max_output_tokens: int | None = Field(None, ge=1)
    think_delimiters: tuple[str, str] | None = None
    max_attempts: int | None = Field(None, ge=1)
    backoff: float | None = Field(None, ge=0)
    service: ServiceConfig = ServiceConfig(kind="echo_gold")

    @field_validator("preset")
    @classmethod
    def _known_preset(cls, v):
        if v is not None and v not in PRESETS:
            raise ValueError(f"unknown preset {v!r}; available: {sorted(PRESETS)}")
        return v

    def to_profile(self):
        base = PRESETS[self.preset] if self.preset else None
        kw = {
            "family": self.family or (base.family if base else "instruct"),
            "context_window": self.context_window or (base.context_window if base else 32_000),
            "temperature": self.temperature,
            "think_token_budget": self.think_token_budget if self.think_token_budget is not None
            else (base.think_token_budget if base else None),
            "endpoint": self.service.base_url,
            "max_output_tokens": self.max_output_tokens or DEFAULT_MAX_OUTPUT_TOKENS,
        }
        if self.think_delimiters:
            kw["think_delimiters"] = self.think_delimiters
        if self.max_attempts:
            kw["max_attempts"] = self.max_attempts
        if self.backoff is not None:
            kw["backoff"] = self.backoff
        return ModelProfile(self.model_id, **kw)


class ExperimentConfig(_Strict):
    corpus: CorpusConfig
    scenarios: list[str] = Field(default_factory=lambda: list(ALL_SCENARIOS))
    strategies: list[str] = Field(default_factory=lambda: list(PAPER_STRATEGIES))
    models: list[ModelConfig]
    chunking: ChunkingConfig = ChunkingConfig()
    retrieval: RetrievalConfig = RetrievalConfig()
    services: ServicesConfig = ServicesConfig()
    metrics: list[str] = Field(default_factory=lambda: list(ALL_METRICS))
    cache_dir: str = ".ehrqa-cache"
    output_dir: str = "runs"
    seed: int = 0
    max_workers: int = Field(4, ge=1)

    @field_validator("scenarios")
    @classmethod
    def _scenarios(cls, v):
        if not v:
            raise ValueError("at least one scenario is required")
        bad = [s for s in v if s not in ALL_SCENARIOS]
        if bad:
            raise ValueError(f"unknown scenarios {bad}")
        if len(set(v)) != len(v):
            raise ValueError("duplicate scenarios")
        return v

    @field_validator("strategies")
    @classmethod
    def _strategies(cls, v):
        if not v:
            raise ValueError("at least one strategy is required")
        try:
            parsed = [Strategy.parse(s).name for s in v]
        except ConfigurationError as exc:
            raise ValueError(str(exc)) from None
        if len(set(parsed)) != len(parsed):
            raise ValueError("duplicate strategies")
        return parsed

    @field_validator("models")
    @classmethod
    def _models(cls, v):
        if not v:
            raise ValueError("at least one model is required")
        ids = [m.model_id for m in v]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate model ids")
        for m in v:
            try:
                m.to_profile()
            except ConfigurationError as exc:
                raise ValueError(str(exc)) from None
        return v

    @field_validator("metrics")
    @classmethod
    def _metrics(cls, v):
        if not v:
            raise ValueError("at least one metric is required")
        bad = [m for m in v if m not in ALL_METRICS]
        if bad:
            raise ValueError(f"unknown metrics {bad}")
        return v

    @property
    def strategy_objects(self):
        return [Strategy.parse(s) for s in self.strategies]

    @property
    def profiles(self):
        return [m.to_profile() for m in self.models]

    def digest(self):
        """Hash of everything that affects results (locations and worker count excluded)."""
        payload = self.model_dump(mode="json", exclude={"output_dir", "cache_dir", "max_workers"})
        return hashlib.sha256(canonical_json(payload).encode("utf-8")).hexdigest()


def _resolve_paths(raw, base):
    corpus = raw.get("corpus")
    if isinstance(corpus, dict):
        for key in ("notes", "qa"):
            if isinstance(corpus.get(key), str):
                corpus[key] = str((base / corpus[key]).resolve()) if not os.path.isabs(corpus[key]) else corpus[key]
    for key in ("cache_dir", "output_dir"):
        if isinstance(raw.get(key), str) and not os.path.isabs(raw[key]):
            raw[key] = str((base / raw[key]).resolve())
    return raw


def apply_env_overrides(raw, env=None):
    env = os.environ if env is None else env
    if env.get(ENV_CACHE_DIR):
        raw["cache_dir"] = env[ENV_CACHE_DIR]
    services = raw.setdefault("services", {})
    for var, name in ENV_SERVICE_URLS.items():
        svc = services.get(name)
        if env.get(var) and isinstance(svc, dict) and svc.get("kind") == "http":
            svc["base_url"] = env[var]
    if env.get(ENV_GENERATION_URL):
        for model in raw.get("models") or []:
            svc = model.get("service") if isinstance(model, dict) else None
            if isinstance(svc, dict) and svc.get("kind") == "http":
                svc["base_url"] = env[ENV_GENERATION_URL]
    return raw


def parse_config(raw, base_dir=".", env=None):
    """Validate a raw mapping; raises :class:`ConfigurationError` with all problems listed."""
    if not isinstance(raw, dict):
        raise ConfigurationError("config must be a mapping")
    raw = apply_env_overrides(_resolve_paths(copy.deepcopy(raw), Path(base_dir)), env)
    try:
        return ExperimentConfig.model_validate(raw)
    except ValidationError as exc:
        lines = [f"{'.'.join(str(p) for p in e['loc'])}: {e['msg']}" for e in exc.errors()]
        raise ConfigurationError("invalid config:\n  " + "\n  ".join(lines)) from None


def load_config(path, env=None):
    path = Path(path)
    try:
        raw = yaml.safe_load(path.read_text(encoding="utf-8"))
    except (OSError, yaml.YAMLError) as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}") from None
    return parse_config(raw, base_dir=path.parent, env=env)
