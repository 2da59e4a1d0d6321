from .chunker import DEFAULT_CHUNK_SIZE, Chunk, NoteChunker, chunk_note, make_chunk_id
from .tokenizers import DEFAULT_SCHEME, TokenCounter, available_schemes, count_tokens, get_counter

__all__ = [
    "Chunk",
    "DEFAULT_CHUNK_SIZE",
    "DEFAULT_SCHEME",
    "NoteChunker",
    "TokenCounter",
    "available_schemes",
    "chunk_note",
    "count_tokens",
    "get_counter",
    "make_chunk_id",
]
