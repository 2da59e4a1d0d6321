"""Note cleaning: UTC timestamps, per-patient de-duplication, chronological order."""

from __future__ import annotations

import logging
import re
from dataclasses import replace

from .types import parse_timestamp

logger = logging.getLogger(__name__)

_WS = re.compile(r"\s+")


def dedup_key(text):
    return _WS.sub(" ", text).strip()


def normalize_with_aliases(raw_notes):
    """Normalize notes and report which dropped duplicates map to which survivor.

    Returns ``(notes, aliases)`` where ``aliases[dropped_id] = kept_id``.
    Among duplicates the earliest note by ``(timestamp, note_id)`` survives.
    """
    staged = []
    for note in raw_notes:
        ts = parse_timestamp(note.timestamp, record_id=note.note_id)
        if not dedup_key(note.text):
            logger.warning("dropping note %s: empty text", note.note_id)
            continue
        staged.append(replace(note, timestamp=ts))
    staged.sort(key=lambda n: n.sort_key)

    kept = []
    aliases = {}
    first_by_text = {}
    for note in staged:
        key = (note.patient_id, dedup_key(note.text))
        survivor = first_by_text.get(key)
        if survivor is not None:
            aliases[note.note_id] = survivor
            continue
        first_by_text[key] = note.note_id
        kept.append(note)
    if aliases:
        logger.info("removed %d duplicate notes", len(aliases))
    return kept, aliases


def normalize_notes(raw_notes):
    """Return notes with UTC timestamps, duplicates removed, sorted by (timestamp, note_id)."""
    return normalize_with_aliases(raw_notes)[0]
