from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ehrqa.chunking import NoteChunker, TokenCounter, chunk_note, count_tokens, get_counter, make_chunk_id
from ehrqa.errors import ConfigurationError

from .conftest import make_note

PARAGRAPH = (
    "Pt is a 67 y/o M w/ hx of CHF (EF 35%), admitted 2113-09-30 for dyspnea; "
    "BNP 1,240 pg/mL. Started furosemide 40mg IV BID."
)
# reference counts from an independent character-walk counter
PARAGRAPH_CHARPIECE = 58
PARAGRAPH_WHITESPACE = 24

text_st = st.text(alphabet=st.sampled_from(list("abcdefgXYZ 0129.,;-_\n\té")), max_size=400)


def test_empty_text_counts_zero():
    assert count_tokens("") == 0
    assert count_tokens("", "whitespace") == 0


def test_whitespace_scheme():
    assert count_tokens("a b c", "whitespace") == 3


def test_paragraph_reference_counts():
    assert count_tokens(PARAGRAPH) == PARAGRAPH_CHARPIECE
    assert count_tokens(PARAGRAPH, "whitespace") == PARAGRAPH_WHITESPACE


def test_charpiece_pieces():
    spans = get_counter().spans("furosemide 40")
    assert [("furosemide 40")[a:b] for a, b in spans] == ["furo", "semi", "de", "4", "0"]


def test_unknown_scheme():
    with pytest.raises(ConfigurationError):
        TokenCounter("gpt-17")


@given(text_st, text_st, st.sampled_from(["charpiece4-v1", "whitespace"]))
def test_count_monotone_under_concatenation(a, b, scheme):
    whole = count_tokens(a + b, scheme)
    assert whole >= max(count_tokens(a, scheme), count_tokens(b, scheme))


def _words(n):
    # each "ab" is exactly one charpiece token
    return " ".join(["ab"] * n)


@pytest.mark.parametrize("n,expected", [(512, [512]), (1300, [512, 512, 276]), (1, [1]), (1024, [512, 512])])
def test_chunk_sizes(n, expected):
    chunks = chunk_note(make_note("n1", _words(n)))
    assert [c.token_count for c in chunks] == expected


def test_empty_note_has_no_chunks():
    assert chunk_note(make_note("n1", "")) == []
    assert chunk_note(make_note("n1", "   \n")) == []


@pytest.mark.parametrize("size", [0, -3])
def test_bad_size(size):
    with pytest.raises(ConfigurationError):
        chunk_note(make_note("n1", "x"), size=size)


def test_chunk_metadata():
    note = make_note("n9", _words(600), patient_id="P7", hours=3)
    chunks = chunk_note(note)
    assert [c.chunk_id for c in chunks] == [make_chunk_id("n9", 0), make_chunk_id("n9", 1)]
    assert all(c.parent_note_id == "n9" and c.patient_id == "P7" and c.timestamp == note.timestamp for c in chunks)
    assert [c.seq_index for c in chunks] == [0, 1]
    assert chunks[1].token_start == 512


@settings(max_examples=300)
@given(text_st, st.integers(1, 40), st.sampled_from(["charpiece4-v1", "whitespace"]))
def test_partition_is_lossless(text, size, scheme):
    note = make_note("n1", text)
    chunks = chunk_note(note, size, scheme)
    counter = get_counter(scheme)
    assert "".join(c.text for c in chunks) == (text if chunks else "")
    assert sum(c.token_count for c in chunks) == count_tokens(text, scheme)
    assert all(c.token_count == size for c in chunks[:-1])
    # token sequence of the chunks equals the note's token sequence
    toks = [text[a:b] for a, b in counter.spans(text)]
    assert [t for c in chunks for t in (c.text[a:b] for a, b in counter.spans(c.text))] == toks
    assert chunk_note(note, size, scheme) == chunks


def test_note_chunker_estimator():
    notes = [make_note("a", _words(700)), make_note("b", _words(10), hours=1)]
    est = NoteChunker(chunk_size=256)
    out = est.fit(notes).transform(notes)
    assert [c.chunk_id for c in out] == ["a#0000", "a#0001", "a#0002", "b#0000"]
    assert est.get_params() == {"chunk_size": 256, "token_scheme": "charpiece4-v1"}
    with pytest.raises(ConfigurationError):
        NoteChunker(chunk_size=0).fit()
