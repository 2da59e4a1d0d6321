"""Fixed-size, non-overlapping token chunking of clinical notes."""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime

from sklearn.base import BaseEstimator, TransformerMixin

from .._validation import check_positive_int
from .tokenizers import DEFAULT_SCHEME, get_counter

DEFAULT_CHUNK_SIZE = 512


@dataclass(frozen=True)
class Chunk:
    chunk_id: str
    parent_note_id: str
    patient_id: str
    seq_index: int
    timestamp: datetime
    text: str
    token_count: int
    # half-open token range within the parent note
    token_start: int = 0

    @property
    def sort_key(self):
        return (self.timestamp, self.parent_note_id, self.seq_index)


def make_chunk_id(parent_note_id, seq_index):
    return f"{parent_note_id}#{seq_index:04d}"


def chunk_note(note, size=DEFAULT_CHUNK_SIZE, scheme=DEFAULT_SCHEME):
    """Split ``note`` into consecutive windows of ``size`` tokens.

    Chunk texts partition the note text exactly: each chunk runs from the
    start of its first token to the start of the next chunk's first token
    (the first chunk starts at offset 0, the last ends at the end of the
    text). No token is ever split.
    """
    size = check_positive_int(size, "chunk size")
    text = note.text
    spans = get_counter(scheme).spans(text) if text else []
    if not spans:
        return []

    starts = list(range(0, len(spans), size))
    chunks = []
    for seq, tok_start in enumerate(starts):
        tok_end = min(tok_start + size, len(spans))
        char_start = 0 if seq == 0 else spans[tok_start][0]
        char_end = spans[tok_end][0] if tok_end < len(spans) else len(text)
        chunks.append(
            Chunk(
                chunk_id=make_chunk_id(note.note_id, seq),
                parent_note_id=note.note_id,
                patient_id=note.patient_id,
                seq_index=seq,
                timestamp=note.timestamp,
                text=text[char_start:char_end],
                token_count=tok_end - tok_start,
                token_start=tok_start,
            )
        )
    return chunks


class NoteChunker(TransformerMixin, BaseEstimator):
    """Transformer turning an iterable of notes into a flat chunk list.

    Parameters
    ----------
    chunk_size : int, default=512
        Tokens per chunk; only the last chunk of a note may be shorter.
    token_scheme : str, default="charpiece4-v1"
        Counting scheme id, or ``"whitespace"``.
    """

    def __init__(self, chunk_size=DEFAULT_CHUNK_SIZE, token_scheme=DEFAULT_SCHEME):
        self.chunk_size = chunk_size
        self.token_scheme = token_scheme

    def fit(self, notes=None, y=None):
        check_positive_int(self.chunk_size, "chunk_size")
        self.counter_ = get_counter(self.token_scheme)
        return self

    def transform(self, notes):
        if not hasattr(self, "counter_"):
            self.fit()
        out = []
        for note in notes:
            out.extend(chunk_note(note, self.chunk_size, self.token_scheme))
        return out
