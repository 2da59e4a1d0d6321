"""The four context-inclusion scenarios and context-length binning."""

from __future__ import annotations

import logging

from sklearn.base import BaseEstimator, TransformerMixin

from ..chunking import DEFAULT_SCHEME, get_counter
from ..errors import ConfigurationError
from .types import ContextBin, Scenario, ScenarioContext

logger = logging.getLogger(__name__)

# lower edges, half-open [lo, next_lo); K = 1000 tokens
BIN_EDGES = (
    (0, ContextBin.SHORT),
    (8_000, ContextBin.MEDIUM),
    (16_000, ContextBin.LARGE),
    (32_000, ContextBin.EXTENDED),
)
CONTEXT_CAP = 128_000


def assign_bin(token_count):
    """Map a token count to its context bin (boundary values go to the upper bin)."""
    if token_count < 0:
        raise ValueError(f"token_count must be >= 0, got {token_count}")
    chosen = BIN_EDGES[0][1]
    for lo, name in BIN_EDGES:
        if token_count >= lo:
            chosen = name
    return chosen


def exceeds_cap(token_count):
    return token_count > CONTEXT_CAP


def select_notes(item, notes, scenario):
    scenario = Scenario(scenario)
    if scenario is Scenario.EXCLUDE_ALL:
        return []
    if scenario is Scenario.INCLUDE_ALL:
        return list(notes)
    if scenario is Scenario.EXCLUDE_RELEVANT:
        return [n for n in notes if n.note_id not in item.relevant_note_ids]
    if not item.related_note_types:
        raise ConfigurationError(
            f"include_related requested for item {item.item_id!r} without related_note_types"
        )
    return [n for n in notes if n.note_type in item.related_note_types]


def build_scenario(item, notes, scenario, scheme=DEFAULT_SCHEME):
    """Select the scenario's notes for ``item`` and bin the resulting context."""
    foreign = [n.note_id for n in notes if n.patient_id != item.patient_id]
    if foreign:
        raise ConfigurationError(f"notes {foreign[:3]} do not belong to patient {item.patient_id!r}")
    chosen = sorted(select_notes(item, notes, scenario), key=lambda n: n.sort_key)
    counter = get_counter(scheme)
    total = sum(counter.count(n.text) for n in chosen)
    over = exceeds_cap(total)
    if over:
        logger.warning("item %s/%s context has %d tokens (> %d)", item.item_id, scenario, total, CONTEXT_CAP)
    return ScenarioContext(
        item_id=item.item_id,
        scenario=Scenario(scenario),
        notes=tuple(chosen),
        token_count=total,
        bin=assign_bin(total),
        over_cap=over,
    )


class ScenarioBuilder(TransformerMixin, BaseEstimator):
    """Transform QA items into :class:`ScenarioContext` objects.

    ``fit`` takes the normalized corpus (anything with ``patient_notes``).
    """

    def __init__(self, scenario=Scenario.INCLUDE_ALL, token_scheme=DEFAULT_SCHEME):
        self.scenario = scenario
        self.token_scheme = token_scheme

    def fit(self, corpus, y=None):
        Scenario(self.scenario)
        self.corpus_ = corpus
        return self

    def transform(self, items):
        from sklearn.utils.validation import check_is_fitted

        check_is_fitted(self, "corpus_")
        return [
            build_scenario(it, self.corpus_.patient_notes(it.patient_id), self.scenario, self.token_scheme)
            for it in items
        ]
