"""Reading and writing record-per-line (JSONL) corpus files."""

from __future__ import annotations

import json
import logging
from pathlib import Path

from ..errors import DanglingReferenceError, IntegrityError, MalformedRecordError
from .types import OPTION_LABELS, ClinicalNote, Corpus, NoteType, Option, QAItem, Task, parse_timestamp

logger = logging.getLogger(__name__)

NOTE_FIELDS = ("note_id", "patient_id", "stay_id", "note_type", "timestamp", "text")
QA_FIELDS = (
    "item_id",
    "patient_id",
    "question",
    "task",
    "gold_answer",
    "options",
    "correct_option",
    "relevant_note_ids",
    "related_note_types",
)


def _iter_records(path):
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise MalformedRecordError(f"invalid JSON: {exc.msg}", line=lineno) from None
            if not isinstance(rec, dict):
                raise MalformedRecordError("record is not an object", line=lineno)
            yield lineno, rec


def _require_str(rec, key, lineno, nullable=False):
    val = rec.get(key)
    if val is None and nullable:
        return None
    if not isinstance(val, str) or (not nullable and not val):
        raise MalformedRecordError(f"field {key!r} must be a non-empty string", line=lineno,
                                   record_id=rec.get("note_id") or rec.get("item_id"))
    return val


def _enum(cls, value, key, lineno, rid):
    try:
        return cls(value)
    except ValueError:
        allowed = ", ".join(m.value for m in cls)
        raise MalformedRecordError(f"{key} {value!r} not in {{{allowed}}}", line=lineno, record_id=rid) from None


def parse_note(rec, lineno=None):
    missing = [k for k in NOTE_FIELDS if k not in rec and k != "stay_id"]
    if missing:
        raise MalformedRecordError(f"missing fields {missing}", line=lineno, record_id=rec.get("note_id"))
    note_id = _require_str(rec, "note_id", lineno)
    text = rec.get("text")
    if not isinstance(text, str) or not text.strip():
        raise MalformedRecordError("text is empty", line=lineno, record_id=note_id)
    stay = rec.get("stay_id")
    try:
        ts = parse_timestamp(rec["timestamp"], record_id=note_id)
    except MalformedRecordError as exc:
        raise MalformedRecordError(str(exc), line=lineno, record_id=note_id) from None
    return ClinicalNote(
        note_id=note_id,
        patient_id=_require_str(rec, "patient_id", lineno),
        stay_id=None if stay is None else str(stay),
        note_type=_enum(NoteType, rec["note_type"], "note_type", lineno, note_id),
        timestamp=ts,
        text=text,
    )


def parse_item(rec, lineno=None):
    rid = rec.get("item_id")
    for k in ("item_id", "patient_id", "question", "task"):
        if k not in rec:
            raise MalformedRecordError(f"missing field {k!r}", line=lineno, record_id=rid)
    item_id = _require_str(rec, "item_id", lineno)
    task = _enum(Task, rec["task"], "task", lineno, item_id)
    raw_opts = rec.get("options") or []
    options = []
    for o in raw_opts:
        if not isinstance(o, dict) or o.get("label") not in OPTION_LABELS or not isinstance(o.get("text"), str):
            raise MalformedRecordError(f"bad option {o!r}", line=lineno, record_id=item_id)
        options.append(Option(o["label"], o["text"]))
    if len({o.label for o in options}) != len(options):
        raise MalformedRecordError("duplicate option labels", line=lineno, record_id=item_id)
    rel = rec.get("relevant_note_ids") or []
    types = rec.get("related_note_types") or []
    if not isinstance(rel, list) or not isinstance(types, list):
        raise MalformedRecordError("relevance fields must be arrays", line=lineno, record_id=item_id)
    gold = rec.get("gold_answer") or ""
    if task is Task.MULTIPLE_CHOICE and not gold:
        gold = next((o.text for o in options if o.label == rec.get("correct_option")), "")
    try:
        return QAItem(
            item_id=item_id,
            patient_id=_require_str(rec, "patient_id", lineno),
            question=_require_str(rec, "question", lineno),
            task=task,
            gold_answer=gold,
            options=tuple(options),
            correct_option=rec.get("correct_option"),
            relevant_note_ids=frozenset(str(x) for x in rel),
            related_note_types=frozenset(_enum(NoteType, t, "related_note_types", lineno, item_id) for t in types),
        )
    except MalformedRecordError as exc:
        raise MalformedRecordError(str(exc), line=lineno, record_id=item_id) from None


def read_notes(path):
    notes = []
    seen = {}
    for lineno, rec in _iter_records(path):
        note = parse_note(rec, lineno)
        if note.note_id in seen:
            raise IntegrityError(
                f"duplicate note_id {note.note_id!r} at line {lineno} (first seen at line {seen[note.note_id]})"
            )
        seen[note.note_id] = lineno
        notes.append(note)
    return notes


def read_items(path):
    items = []
    seen = set()
    for lineno, rec in _iter_records(path):
        item = parse_item(rec, lineno)
        if item.item_id in seen:
            raise IntegrityError(f"duplicate item_id {item.item_id!r} at line {lineno}")
        seen.add(item.item_id)
        items.append(item)
    return items


def validate_references(notes, items):
    by_id = {n.note_id: n for n in notes}
    for item in items:
        for nid in sorted(item.relevant_note_ids):
            note = by_id.get(nid)
            if note is None:
                raise DanglingReferenceError(item.item_id, nid)
            if note.patient_id != item.patient_id:
                raise IntegrityError(
                    f"QA item {item.item_id!r} references note {nid!r} of another patient"
                )


def ingest_corpus(notes_file, qa_file):
    """Parse both files and validate cross references.

    Returns ``(notes, items)`` as lists in file order.
    """
    notes = read_notes(notes_file)
    items = read_items(qa_file)
    validate_references(notes, items)
    return notes, items


def load_corpus(notes_file, qa_file, min_context_tokens=0, scheme=None):
    """Ingest, normalize and wrap into a :class:`Corpus`."""
    from .normalize import normalize_with_aliases

    notes, items = ingest_corpus(notes_file, qa_file)
    normalized, aliases = normalize_with_aliases(notes)
    if aliases:
        items = [remap_item(it, aliases) for it in items]
    corpus = Corpus(normalized, items)
    if min_context_tokens > 0:
        from ..chunking import DEFAULT_SCHEME, get_counter

        counter = get_counter(scheme or DEFAULT_SCHEME)
        kept = []
        for it in corpus.items:
            total = sum(counter.count(n.text) for n in corpus.patient_notes(it.patient_id))
            if total >= min_context_tokens:
                kept.append(it)
        logger.info("min_context_tokens=%d kept %d/%d items", min_context_tokens, len(kept), len(corpus.items))
        corpus = Corpus(corpus.notes, kept)
    return corpus


def remap_item(item, aliases):
    from dataclasses import replace

    rel = frozenset(aliases.get(n, n) for n in item.relevant_note_ids)
    return item if rel == item.relevant_note_ids else replace(item, relevant_note_ids=rel)


def write_jsonl(path, records):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec, ensure_ascii=False, sort_keys=True) + "\n")


def write_corpus(notes, items, notes_file, qa_file):
    write_jsonl(notes_file, (n.to_record() for n in notes))
    write_jsonl(qa_file, (i.to_record() for i in items))
