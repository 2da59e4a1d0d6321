from .context import (
    FULL_CONTEXT,
    RAG_CHUNKS,
    RAG_HIERARCHICAL,
    AssembledContext,
    Segment,
    Strategy,
    assemble,
)
from .prompts import EMPTY_RECORD, Decoding, PromptBundle, render_prompt, render_record, template_id

__all__ = [
    "AssembledContext",
    "Decoding",
    "EMPTY_RECORD",
    "FULL_CONTEXT",
    "PromptBundle",
    "RAG_CHUNKS",
    "RAG_HIERARCHICAL",
    "Segment",
    "Strategy",
    "assemble",
    "render_prompt",
    "render_record",
    "template_id",
]
