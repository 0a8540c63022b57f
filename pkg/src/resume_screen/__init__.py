"""Multi-agent resume screening with retrieval-backed scoring.

An extractor agent structures raw resume text, an evaluator agent scores it
against the applied position using criteria retrieved from a knowledge store,
a summarizer panel (CEO, CTO, HR) writes consolidated feedback, and a
formatter normalizes scores into a fixed five-number array. An evaluation
harness measures agreement with HR ground truth via percentile-subset
correlations and mean absolute error.
"""

from __future__ import annotations

from .agents import (
    AgentTranscript,
    FeedbackReport,
    ScreeningFailure,
    ScreeningPipeline,
    ScreeningResult,
    format_scores,
    screen_batch,
)
from .errors import ResumeScreenError
from .gateway import (
    ChatRequest,
    EmbeddingVector,
    HttpGateway,
    MockGateway,
    ProviderConfig,
    make_gateway,
    mock_embed,
    prompt_digest,
)
from .metrics import (
    EvaluationRecord,
    MetricsReport,
    evaluate_run,
    mae,
    make_record,
    pearson,
    percentile_subset,
    spearman,
)
from .models import (
    CATEGORY_BOUNDS,
    SCORE_CATEGORIES,
    EducationEntry,
    ExtractedResume,
    FinalScore,
    JobLevel,
    JobPosition,
    Resume,
    ScoreVector,
    ScoringWeights,
    WorkEntry,
    final_score,
    serialize_scores,
    validate_score_vector,
)
from .prompts import TemplateSet, build_evaluation_prompt, render_profile
from .store import (
    KnowledgeChunk,
    KnowledgeStore,
    RetrievalConfig,
    RetrievalResult,
    SourceDocument,
    cosine_similarity,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "AgentTranscript",
    "CATEGORY_BOUNDS",
    "ChatRequest",
    "EducationEntry",
    "EmbeddingVector",
    "EvaluationRecord",
    "ExtractedResume",
    "FeedbackReport",
    "FinalScore",
    "HttpGateway",
    "JobLevel",
    "JobPosition",
    "KnowledgeChunk",
    "KnowledgeStore",
    "MetricsReport",
    "MockGateway",
    "ProviderConfig",
    "Resume",
    "ResumeScreenError",
    "RetrievalConfig",
    "RetrievalResult",
    "SCORE_CATEGORIES",
    "ScoreVector",
    "ScoringWeights",
    "ScreeningFailure",
    "ScreeningPipeline",
    "ScreeningResult",
    "SourceDocument",
    "TemplateSet",
    "WorkEntry",
    "build_evaluation_prompt",
    "cosine_similarity",
    "evaluate_run",
    "final_score",
    "format_scores",
    "mae",
    "make_gateway",
    "make_record",
    "mock_embed",
    "pearson",
    "percentile_subset",
    "prompt_digest",
    "render_profile",
    "screen_batch",
    "serialize_scores",
    "spearman",
    "validate_score_vector",
]
