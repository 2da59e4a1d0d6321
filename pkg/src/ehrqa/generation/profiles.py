"""Model profiles and the presets used in the experiments."""

from __future__ import annotations

from dataclasses import dataclass, field

from .._validation import check_positive_int
from ..errors import ConfigurationError

INSTRUCT = "instruct"
REASONING = "reasoning"
FAMILY_TEMPERATURE = {INSTRUCT: 0.0, REASONING: 1.0}
DEFAULT_MAX_OUTPUT_TOKENS = 512
DEFAULT_THINK_DELIMITERS = ("<think>", "</think>")


@dataclass(frozen=True)
class ModelProfile:
    model_id: str
    family: str = INSTRUCT
    context_window: int = 32_000
    temperature: float | None = None
    think_token_budget: int | None = None
    endpoint: str | None = None
    max_output_tokens: int = DEFAULT_MAX_OUTPUT_TOKENS
    think_delimiters: tuple[str, str] = field(default=DEFAULT_THINK_DELIMITERS)
    max_attempts: int = 3
    backoff: float = 1.0
    timeout: float = 600.0

    def __post_init__(self):
        if self.family not in FAMILY_TEMPERATURE:
            raise ConfigurationError(f"family must be one of {sorted(FAMILY_TEMPERATURE)}, got {self.family!r}")
        if self.temperature is None:
            object.__setattr__(self, "temperature", FAMILY_TEMPERATURE[self.family])
        if self.think_token_budget is not None:
            if self.family != REASONING:
                raise ConfigurationError(f"{self.model_id}: think_token_budget only applies to reasoning models")
            check_positive_int(self.think_token_budget, "think_token_budget")
        check_positive_int(self.context_window, "context_window")
        check_positive_int(self.max_output_tokens, "max_output_tokens")
        check_positive_int(self.max_attempts, "max_attempts")
        object.__setattr__(self, "think_delimiters", tuple(self.think_delimiters))

    @property
    def generation_budget(self):
        return self.max_output_tokens + (self.think_token_budget or 0)


PRESETS = {
    "qwen2.5-7b-instruct": ModelProfile("qwen2.5-7b-instruct", INSTRUCT, context_window=1_000_000),
    "huatuogpt-o1-7b": ModelProfile("huatuogpt-o1-7b", REASONING, context_window=128_000,
                                    think_token_budget=8_000),
    "qwen2.5-32b-instruct-128k": ModelProfile("qwen2.5-32b-instruct-128k", INSTRUCT, context_window=128_000),
    "qwq-32b": ModelProfile("qwq-32b", REASONING, context_window=128_000, think_token_budget=20_000),
}
