"""Multiple-choice accuracy."""

from __future__ import annotations

from ..corpus.types import Task
from ..generation.generate import OK


def mc_accuracy(records, items):
    """Share of successful records whose parsed option is the correct one.

    ``items`` maps item_id to QAItem (or is an iterable of QAItems). Null
    parses count as wrong; failed generations are left out of the
    denominator. Returns ``None`` when nothing is left to score.
    """
    if not isinstance(items, dict):
        items = {it.item_id: it for it in items}
    scored = correct = 0
    for rec in records:
        item = items[rec.item_id]
        if item.task is not Task.MULTIPLE_CHOICE:
            raise ValueError(f"record for {rec.item_id!r} is not a multiple_choice item")
        if rec.status != OK:
            continue
        scored += 1
        correct += rec.parsed_option is not None and rec.parsed_option == item.correct_option
    return None if scored == 0 else correct / scored


def failure_rate(records):
    records = list(records)
    if not records:
        return None
    return sum(r.status != OK for r in records) / len(records)
