"""Turning raw completions into answers and option labels."""

from __future__ import annotations

import re

from .profiles import DEFAULT_THINK_DELIMITERS

_ANSWER_FIELD = "[[ ## answer ## ]]"
_FIELD_MARK = re.compile(r"\[\[ ## \w+ ## \]\]")


def strip_thinking(text, delimiters=DEFAULT_THINK_DELIMITERS):
    """Drop a delimited thinking segment.

    Everything up to the last closing delimiter is removed. An opening
    delimiter without a closing one means the model never left its
    thinking phase, so nothing after it counts as an answer.
    """
    open_tag, close_tag = delimiters
    if close_tag in text:
        return text.rsplit(close_tag, 1)[1].strip()
    if open_tag in text:
        return text.split(open_tag, 1)[0].strip()
    return text.strip()


def extract_answer_field(text):
    """Return the ``answer`` field of a structured completion, or the text itself."""
    if _ANSWER_FIELD not in text:
        return text.strip()
    after = text.split(_ANSWER_FIELD, 1)[1]
    m = _FIELD_MARK.search(after)
    return (after[: m.start()] if m else after).strip()


def _label_pattern(labels):
    alt = "|".join(re.escape(lab) for lab in labels)
    # a bare capital letter, optionally in parentheses or followed by '.' or ')'
    return re.compile(rf"(?<![A-Za-z0-9])\(?({alt})(?:\)|\.|:)?(?![A-Za-z0-9])")


def _norm(text):
    return re.sub(r"\s+", " ", text).strip().strip(".").strip().casefold()


def extract_option(raw_output, options):
    """Map a completion to one of ``options`` [(label, text), ...].

    Rules in order: standalone label tokens ("B", "(B)", "B."), then a
    case-insensitive exact match against an option text. Several distinct
    labels make the output ambiguous and yield ``None``.
    """
    options = [(o.label, o.text) if hasattr(o, "label") else tuple(o) for o in options]
    if not options:
        raise ValueError("extract_option needs at least one option")
    labels = [lab for lab, _ in options]
    text = raw_output or ""
    found = []
    for m in _label_pattern(labels).finditer(text):
        if m.group(1) not in found:
            found.append(m.group(1))
    if len(found) == 1:
        return found[0]
    if len(found) > 1:
        return None
    target = _norm(text)
    matches = [lab for lab, opt in options if _norm(opt) == target]
    return matches[0] if len(matches) == 1 else None
