from .accuracy import failure_rate, mc_accuracy
from .aggregate import (
    GROUP_KEYS,
    METRICS,
    AggregateReport,
    GroupStats,
    MetricReport,
    aggregate,
    correlation_matrix,
    min_max_normalize,
    pearson,
)
from .judge import (
    CachedJudgeService,
    FixedJudgeService,
    GarbledJudgeService,
    JudgeScores,
    OverlapJudgeService,
    judge_scores,
    parse_judge_response,
    render_judge_prompt,
    to_percent,
)
from .meteor import align, count_chunks, meteor, meteor_from_tokens
from .nli import CachedNLIService, FixedNLIService, HttpNLIService, NLIScores, OverlapNLIService, nli_scores
from .semantic import SemanticF1, greedy_match, semantic_f1

__all__ = [
    "AggregateReport",
    "CachedJudgeService",
    "CachedNLIService",
    "FixedJudgeService",
    "FixedNLIService",
    "GROUP_KEYS",
    "GarbledJudgeService",
    "GroupStats",
    "HttpNLIService",
    "JudgeScores",
    "METRICS",
    "MetricReport",
    "NLIScores",
    "OverlapJudgeService",
    "OverlapNLIService",
    "SemanticF1",
    "aggregate",
    "align",
    "correlation_matrix",
    "count_chunks",
    "failure_rate",
    "greedy_match",
    "judge_scores",
    "mc_accuracy",
    "meteor",
    "meteor_from_tokens",
    "min_max_normalize",
    "nli_scores",
    "parse_judge_response",
    "pearson",
    "render_judge_prompt",
    "semantic_f1",
    "to_percent",
]
