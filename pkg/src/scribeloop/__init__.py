"""Dictated-note transcript correction toolkit: WER/KMTER scoring, LLM
correction passes, and a per-sentence human review workflow."""
from ._version import __version__
from .alignment import AlignOp, Alignment, align, cost_matrix, edit_cost, use_numba
from .correction import (
    HttpProvider,
    MockProvider,
    PromptTemplate,
    ProviderAuthError,
    ProviderConfig,
    ProviderError,
    ProviderHTTPError,
    ProviderTimeoutError,
    RetriesExhaustedError,
    Suggestion,
    build_one_set_prompt,
    build_sentence_prompt,
    complete,
    correct_one_set,
    correct_sentences,
    parse_suggestion,
)
from .metrics import (
    KmterResult,
    MetricsReport,
    MetricsRow,
    TermList,
    TermVerdict,
    build_report,
    kmter,
    parse_report_csv,
    score_texts,
    wer,
)
from .review import (
    Decision,
    ReviewSession,
    create_session,
    finalize,
    load_session,
    record_decision,
    reference_guided_decisions,
    save_session,
)
from .textproc import (
    Sentence,
    Token,
    Transcript,
    normalize_token,
    reconstruct,
    segment_sentences,
    surfaces,
    tokenize,
)

__all__ = [
    "__version__",
    "AlignOp",
    "Alignment",
    "align",
    "cost_matrix",
    "edit_cost",
    "use_numba",
    "HttpProvider",
    "MockProvider",
    "PromptTemplate",
    "ProviderAuthError",
    "ProviderConfig",
    "ProviderError",
    "ProviderHTTPError",
    "ProviderTimeoutError",
    "RetriesExhaustedError",
    "Suggestion",
    "build_one_set_prompt",
    "build_sentence_prompt",
    "complete",
    "correct_one_set",
    "correct_sentences",
    "parse_suggestion",
    "KmterResult",
    "MetricsReport",
    "MetricsRow",
    "TermList",
    "TermVerdict",
    "build_report",
    "kmter",
    "parse_report_csv",
    "score_texts",
    "wer",
    "Decision",
    "ReviewSession",
    "create_session",
    "finalize",
    "load_session",
    "record_decision",
    "reference_guided_decisions",
    "save_session",
    "Sentence",
    "Token",
    "Transcript",
    "normalize_token",
    "reconstruct",
    "segment_sentences",
    "surfaces",
    "tokenize",
]
