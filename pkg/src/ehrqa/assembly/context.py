"""Order-preserving context assembly from a ranked chunk list."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from datetime import datetime

from .._validation import check_positive_int
from ..chunking import DEFAULT_SCHEME, get_counter
from ..corpus.scenarios import assign_bin
from ..corpus.types import ContextBin
from ..errors import ConfigurationError, IntegrityError

FULL_CONTEXT = "full_context"
RAG_CHUNKS = "rag_chunks"
RAG_HIERARCHICAL = "rag_hierarchical"

_STRATEGY_RE = re.compile(r"^(rag_chunks|rag_hierarchical)\((\d+)\)$")


@dataclass(frozen=True, order=True)
class Strategy:
    kind: str
    k: int | None = None

    def __post_init__(self):
        if self.kind == FULL_CONTEXT:
            if self.k is not None:
                raise ConfigurationError("full_context takes no k")
        elif self.kind in (RAG_CHUNKS, RAG_HIERARCHICAL):
            check_positive_int(self.k, f"{self.kind} k")
        else:
            raise ConfigurationError(f"unknown strategy {self.kind!r}")

    @classmethod
    def parse(cls, value):
        if isinstance(value, Strategy):
            return value
        s = str(value).strip()
        if s == FULL_CONTEXT:
            return cls(FULL_CONTEXT)
        m = _STRATEGY_RE.match(s)
        if not m:
            raise ConfigurationError(
                f"bad strategy {value!r}; expected full_context, rag_chunks(k) or rag_hierarchical(k)"
            )
        return cls(m.group(1), int(m.group(2)))

    @property
    def name(self):
        return FULL_CONTEXT if self.kind == FULL_CONTEXT else f"{self.kind}({self.k})"

    @property
    def label(self):
        if self.kind == FULL_CONTEXT:
            return "FC"
        return f"RAG {self.k}" if self.kind == RAG_CHUNKS else f"RAG HIR {self.k}"

    @property
    def is_rag(self):
        return self.kind != FULL_CONTEXT

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Segment:
    text: str
    parent_note_id: str
    timestamp: datetime
    seq_index: int
    note_type: str
    token_count: int

    @property
    def sort_key(self):
        return (self.timestamp, self.parent_note_id, self.seq_index)


@dataclass(frozen=True)
class AssembledContext:
    item_id: str
    strategy: Strategy
    segments: tuple[Segment, ...]
    token_count: int
    bin: ContextBin
    overflow: bool = False
    dropped_note_ids: tuple[str, ...] = field(default=())


def _note_segment(note, counter):
    return Segment(note.text, note.note_id, note.timestamp, 0, note.note_type.value, counter.count(note.text))


def assemble(ranked, chunks, strategy, notes=(), item_id="", max_tokens=None, scheme=DEFAULT_SCHEME):
    """Build the prompt context for ``strategy``.

    Parameters
    ----------
    ranked : RankedList or None
        Retrieval output; ignored for ``full_context``.
    chunks : mapping chunk_id -> Chunk
    notes : iterable of ClinicalNote
        Scenario notes; required for ``full_context`` and ``rag_hierarchical``.
    max_tokens : int, optional
        Context budget. When exceeded the context is flagged as overflowing;
        ``rag_hierarchical`` additionally drops whole parent notes, lowest
        ranked first, until it fits.
    """
    strategy = Strategy.parse(strategy)
    counter = get_counter(scheme)
    notes_by_id = {n.note_id: n for n in notes}
    dropped = []

    if strategy.kind == FULL_CONTEXT:
        segs = [_note_segment(n, counter) for n in notes_by_id.values()]
    else:
        top = ranked.chunk_ids[: strategy.k] if ranked is not None else []
        missing = [cid for cid in top if cid not in chunks]
        if missing:
            raise IntegrityError(f"ranked chunk ids not in chunk store: {missing}")
        if strategy.kind == RAG_CHUNKS:
            segs = [
                Segment(c.text, c.parent_note_id, c.timestamp, c.seq_index,
                        notes_by_id[c.parent_note_id].note_type.value if c.parent_note_id in notes_by_id else "",
                        c.token_count)
                for c in (chunks[cid] for cid in top)
            ]
        else:
            parents = []
            for cid in top:
                pid = chunks[cid].parent_note_id
                if pid not in parents:
                    parents.append(pid)
            unknown = [p for p in parents if p not in notes_by_id]
            if unknown:
                raise IntegrityError(f"parent notes not in scenario: {unknown}")
            segs = [_note_segment(notes_by_id[p], counter) for p in parents]
            if max_tokens is not None:
                # parents are in rank order here; drop from the tail
                while segs and sum(s.token_count for s in segs) > max_tokens:
                    dropped.append(segs.pop().parent_note_id)

    segs.sort(key=lambda s: s.sort_key)
    total = sum(s.token_count for s in segs)
    overflow = bool(dropped) or (max_tokens is not None and total > max_tokens)
    return AssembledContext(
        item_id=item_id,
        strategy=strategy,
        segments=tuple(segs),
        token_count=total,
        bin=assign_bin(total),
        overflow=overflow,
        dropped_note_ids=tuple(dropped),
    )
