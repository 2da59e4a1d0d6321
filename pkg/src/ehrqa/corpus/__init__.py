from .fixtures import generate_fixture
from .io import ingest_corpus, load_corpus, read_items, read_notes, write_corpus, write_jsonl
from .normalize import normalize_notes
from .scenarios import BIN_EDGES, CONTEXT_CAP, ScenarioBuilder, assign_bin, build_scenario, exceeds_cap
from .types import (
    OPTION_LABELS,
    ClinicalNote,
    ContextBin,
    Corpus,
    NoteType,
    Option,
    QAItem,
    Scenario,
    ScenarioContext,
    Task,
    format_timestamp,
    parse_timestamp,
)

__all__ = [
    "BIN_EDGES",
    "CONTEXT_CAP",
    "ClinicalNote",
    "ContextBin",
    "Corpus",
    "NoteType",
    "OPTION_LABELS",
    "Option",
    "QAItem",
    "Scenario",
    "ScenarioBuilder",
    "ScenarioContext",
    "Task",
    "assign_bin",
    "build_scenario",
    "exceeds_cap",
    "format_timestamp",
    "generate_fixture",
    "ingest_corpus",
    "load_corpus",
    "normalize_notes",
    "parse_timestamp",
    "read_items",
    "read_notes",
    "write_corpus",
    "write_jsonl",
]
