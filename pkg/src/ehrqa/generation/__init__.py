from .generate import FAILED, OK, OVERFLOW, GenerationRecord, generate, parse_output, prompt_tokens
from .parsing import extract_answer_field, extract_option, strip_thinking
from .profiles import INSTRUCT, PRESETS, REASONING, ModelProfile
from .services import (
    EchoGoldService,
    FixedStringService,
    HttpGenerationService,
    ScriptedService,
    ThinkingWrapper,
)

__all__ = [
    "EchoGoldService",
    "FAILED",
    "FixedStringService",
    "GenerationRecord",
    "HttpGenerationService",
    "INSTRUCT",
    "ModelProfile",
    "OK",
    "OVERFLOW",
    "PRESETS",
    "REASONING",
    "ScriptedService",
    "ThinkingWrapper",
    "extract_answer_field",
    "extract_option",
    "generate",
    "parse_output",
    "prompt_tokens",
    "strip_thinking",
]
