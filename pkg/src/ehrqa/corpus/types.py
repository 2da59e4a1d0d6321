"""Corpus domain types."""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from datetime import datetime, timezone

from ..errors import MalformedRecordError


class NoteType(str, enum.Enum):
    DISCHARGE_SUMMARY = "discharge_summary"
    CLINICAL_NOTE = "clinical_note"
    RADIOLOGY_REPORT = "radiology_report"
    OTHER = "other"


class Task(str, enum.Enum):
    EXTRACTIVE = "extractive"
    MULTIPLE_CHOICE = "multiple_choice"
    OPEN_ENDED = "open_ended"


class Scenario(str, enum.Enum):
    EXCLUDE_ALL = "exclude_all"
    EXCLUDE_RELEVANT = "exclude_relevant"
    INCLUDE_ALL = "include_all"
    INCLUDE_RELATED = "include_related"


class ContextBin(str, enum.Enum):
    SHORT = "short"
    MEDIUM = "medium"
    LARGE = "large"
    EXTENDED = "extended"


OPTION_LABELS = ("A", "B", "C", "D", "E")

_DATE_ONLY = re.compile(r"^\d{4}-\d{2}-\d{2}$")


def parse_timestamp(value, record_id=None):
    """Parse an ISO-8601 string (or datetime) into an aware UTC datetime.

    Naive values are taken to be UTC; date-only values map to midnight.
    """
    if isinstance(value, datetime):
        dt = value
    elif isinstance(value, str):
        s = value.strip()
        if _DATE_ONLY.match(s):
            s += "T00:00:00"
        if s.endswith(("Z", "z")):
            s = s[:-1] + "+00:00"
        try:
            dt = datetime.fromisoformat(s)
        except ValueError:
            raise MalformedRecordError(f"unparseable timestamp {value!r}", record_id=record_id) from None
    else:
        raise MalformedRecordError(f"unparseable timestamp {value!r}", record_id=record_id)
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc)


def format_timestamp(dt):
    return dt.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


@dataclass(frozen=True)
class ClinicalNote:
    note_id: str
    patient_id: str
    note_type: NoteType
    timestamp: datetime
    text: str
    stay_id: str | None = None

    @property
    def sort_key(self):
        return (self.timestamp, self.note_id)

    def to_record(self):
        return {
            "note_id": self.note_id,
            "patient_id": self.patient_id,
            "stay_id": self.stay_id,
            "note_type": self.note_type.value,
            "timestamp": format_timestamp(self.timestamp),
            "text": self.text,
        }


@dataclass(frozen=True)
class Option:
    label: str
    text: str


@dataclass(frozen=True)
class QAItem:
    item_id: str
    patient_id: str
    question: str
    task: Task
    gold_answer: str
    options: tuple[Option, ...] = ()
    correct_option: str | None = None
    relevant_note_ids: frozenset[str] = frozenset()
    related_note_types: frozenset[NoteType] = frozenset()

    def __post_init__(self):
        labels = {o.label for o in self.options}
        if self.task is Task.MULTIPLE_CHOICE:
            if not self.options or self.correct_option not in labels:
                raise MalformedRecordError(
                    "multiple_choice items need options and a correct_option among their labels",
                    record_id=self.item_id,
                )
        elif self.options or self.correct_option is not None:
            raise MalformedRecordError(
                "only multiple_choice items may carry options", record_id=self.item_id
            )
        if self.task is not Task.MULTIPLE_CHOICE and not self.gold_answer.strip():
            raise MalformedRecordError("gold_answer is empty", record_id=self.item_id)

    @property
    def correct_option_text(self):
        for o in self.options:
            if o.label == self.correct_option:
                return o.text
        return None

    def to_record(self):
        return {
            "item_id": self.item_id,
            "patient_id": self.patient_id,
            "question": self.question,
            "task": self.task.value,
            "gold_answer": self.gold_answer,
            "options": [{"label": o.label, "text": o.text} for o in self.options] or None,
            "correct_option": self.correct_option,
            "relevant_note_ids": sorted(self.relevant_note_ids),
            "related_note_types": sorted(t.value for t in self.related_note_types),
        }


@dataclass(frozen=True)
class ScenarioContext:
    item_id: str
    scenario: Scenario
    notes: tuple[ClinicalNote, ...]
    token_count: int
    bin: ContextBin
    # token_count exceeds the 128K study cap; kept and binned as extended
    over_cap: bool = False

    @property
    def note_ids(self):
        return [n.note_id for n in self.notes]


@dataclass
class Corpus:
    """Normalized notes and QA items, indexed by patient."""

    notes: list[ClinicalNote]
    items: list[QAItem]
    by_patient: dict[str, list[ClinicalNote]] = field(init=False, repr=False)

    def __post_init__(self):
        self.by_patient = {}
        for n in sorted(self.notes, key=lambda n: n.sort_key):
            self.by_patient.setdefault(n.patient_id, []).append(n)

    def patient_notes(self, patient_id):
        return list(self.by_patient.get(patient_id, ()))
