from __future__ import annotations

from datetime import datetime, timedelta, timezone

import pytest

from ehrqa.corpus import ClinicalNote, NoteType, Option, QAItem, Task, generate_fixture, write_corpus

T0 = datetime(2113, 9, 30, 8, 0, tzinfo=timezone.utc)


def make_note(note_id, text="note text", patient_id="P1", note_type=NoteType.CLINICAL_NOTE, hours=0, stay_id=None):
    return ClinicalNote(note_id, patient_id, NoteType(note_type), T0 + timedelta(hours=hours), text, stay_id)


def make_item(item_id="Q1", patient_id="P1", task=Task.EXTRACTIVE, gold="answer", question="What happened?",
              options=(), correct=None, relevant=(), related=()):
    return QAItem(
        item_id=item_id,
        patient_id=patient_id,
        question=question,
        task=Task(task),
        gold_answer=gold,
        options=tuple(Option(lbl, txt) for lbl, txt in options),
        correct_option=correct,
        relevant_note_ids=frozenset(relevant),
        related_note_types=frozenset(NoteType(t) for t in related),
    )


@pytest.fixture(scope="session")
def fixture_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("fixture")
    notes, items = generate_fixture()
    write_corpus(notes, items, out / "notes.jsonl", out / "qa.jsonl")
    return out
