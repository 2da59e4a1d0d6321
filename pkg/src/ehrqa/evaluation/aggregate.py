"""Per-unit metric reports, grouped means, min-max normalization, correlations."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

METRICS = (
    "meteor",
    "semantic_f1",
    "nli_entailment",
    "nli_non_contradiction",
    "judge_correctness",
    "judge_completeness",
    "judge_faithfulness",
    "mc_accuracy",
)
GROUP_KEYS = ("model_id", "scenario", "strategy", "bin")
_BOUNDS = {m: (0.0, 1.0) for m in METRICS}
_BOUNDS.update({m: (0.0, 100.0) for m in ("judge_correctness", "judge_completeness", "judge_faithfulness")})


@dataclass
class MetricReport:
    item_id: str
    model_id: str = ""
    scenario: str = ""
    strategy: str = ""
    bin: str = ""
    meteor: float | None = None
    semantic_precision: float | None = None
    semantic_recall: float | None = None
    semantic_f1: float | None = None
    nli_entailment: float | None = None
    nli_non_contradiction: float | None = None
    judge_correctness: float | None = None
    judge_completeness: float | None = None
    judge_faithfulness: float | None = None
    mc_correct: bool | None = None
    flags: list[str] = field(default_factory=list)

    def __post_init__(self):
        for name, (lo, hi) in _BOUNDS.items():
            v = getattr(self, name, None)
            if v is not None and not (lo - 1e-12 <= v <= hi + 1e-12):
                raise ValueError(f"{name}={v} outside [{lo}, {hi}]")

    @property
    def mc_accuracy(self):
        return None if self.mc_correct is None else float(self.mc_correct)

    def value(self, metric):
        return getattr(self, metric)

    def key(self, keys=GROUP_KEYS):
        return tuple(getattr(self, k) for k in keys)

    def to_record(self):
        return asdict(self)


@dataclass
class GroupStats:
    key: tuple
    means: dict
    counts: dict
    normalized: dict = field(default_factory=dict)
    degenerate: dict = field(default_factory=dict)
    n_items: int = 0


@dataclass
class AggregateReport:
    keys: tuple
    groups: list
    correlations: dict
    overall_correlation: dict


def pearson(xs, ys):
    """Pearson correlation over pairs where both values are present."""
    pairs = [(x, y) for x, y in zip(xs, ys) if x is not None and y is not None]
    if len(pairs) < 2:
        return None
    a = np.array(pairs, dtype=np.float64)
    dx, dy = a[:, 0] - a[:, 0].mean(), a[:, 1] - a[:, 1].mean()
    denom = math.sqrt(float(dx @ dx) * float(dy @ dy))
    if denom == 0:
        return None
    return float(np.clip((dx @ dy) / denom, -1.0, 1.0))


def correlation_matrix(reports, metrics=METRICS):
    """Symmetric pairwise-complete correlation matrix as nested dicts.

    The diagonal is 1.0 whenever the metric has at least two values.
    """
    cols = {m: [r.value(m) for r in reports] for m in metrics}
    out = {m: {} for m in metrics}
    for i, a in enumerate(metrics):
        for b in metrics[i:]:
            if a == b:
                n = sum(v is not None for v in cols[a])
                val = 1.0 if n >= 2 else None
            else:
                val = pearson(cols[a], cols[b])
            out[a][b] = out[b][a] = val
    return out


def _mean(values):
    vals = [float(v) for v in values if v is not None]
    return (math.fsum(vals) / len(vals) if vals else None), len(vals)


def min_max_normalize(values):
    """Map present values to [0, 1]; all-equal inputs map to 0 and are flagged.

    Returns ``(normalized, degenerate)``.
    """
    present = [v for v in values if v is not None]
    if not present:
        return [None] * len(values), True
    lo, hi = min(present), max(present)
    if hi == lo:
        return [None if v is None else 0.0 for v in values], True
    return [None if v is None else (v - lo) / (hi - lo) for v in values], False


def aggregate(reports, keys=GROUP_KEYS, metrics=METRICS):
    """Group reports by ``keys`` and summarize every metric."""
    keys = tuple(keys)
    reports = list(reports)
    grouped = {}
    for r in reports:
        grouped.setdefault(r.key(keys), []).append(r)
    order = sorted(grouped)
    groups = []
    for k in order:
        members = grouped[k]
        means, counts = {}, {}
        for m in metrics:
            means[m], counts[m] = _mean(r.value(m) for r in members)
        groups.append(GroupStats(k, means, counts, n_items=len(members)))
    for m in metrics:
        normed, degenerate = min_max_normalize([g.means[m] for g in groups])
        for g, v in zip(groups, normed):
            g.normalized[m] = v
            g.degenerate[m] = degenerate
    correlations = {k: correlation_matrix(grouped[k], metrics) for k in order}
    return AggregateReport(keys, groups, correlations, correlation_matrix(reports, metrics))
