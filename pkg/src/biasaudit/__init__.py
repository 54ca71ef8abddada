"""biasaudit: measure gender bias in caption corpora.

The pipeline stages are importable directly; the ``biasaudit`` console
script exposes them as subcommands.
"""

from .context import filter_context, prefilter_context
from .cooc import (
    CoocCounts,
    caption_mentions,
    cooc_counts,
    leakage,
    per_image_mean_to_m,
    per_object_bias,
)
from .core import (
    FILLABLE_CLASSES,
    MASK_TOKEN,
    CaptionRecord,
    ContextObject,
    GenderClass,
    GenderLexicon,
    VisualContext,
    fill_mask,
    label_caption_gender,
    tokenize,
    variant_key,
)
from .dataio import (
    dump_json,
    dump_jsonl,
    fmt2,
    load_captions,
    load_contexts,
    parallel_map,
    worker_count,
    write_contexts,
)
from .distance import (
    DistanceTable,
    GenderDistanceRow,
    aggregate_distance_table,
    bias_ratio_to_m,
    ratio_to_neutral,
    sentence_distance,
    word_distance,
)
from .errors import BiasAuditError, InputError, MissingKeyError, ParseError
from .estimate import (
    EstimationReport,
    GenderPrediction,
    decide,
    estimate_gender,
    estimation_report,
)
from .report import build_report, render_distance_csv
from .revision import (
    GenderScoreAggregate,
    LmStore,
    ScoredCaption,
    alpha,
    gender_score,
    hypothesis_probability,
    load_lm_sidecar,
    mean_prob_from_logprobs,
    revise,
    score_caption,
)
from .textscore import TextRecord, load_text_records, text_only_score
from .validate import ValidationReport, validate_inputs
from .vectors import (
    EmbeddingStore,
    cosine,
    load_sidecar_vectors,
    load_word_vectors,
    phrase_vector,
)

__version__ = "0.1.0"

__all__ = [
    "BiasAuditError",
    "CaptionRecord",
    "ContextObject",
    "CoocCounts",
    "DistanceTable",
    "EmbeddingStore",
    "EstimationReport",
    "FILLABLE_CLASSES",
    "GenderClass",
    "GenderDistanceRow",
    "GenderLexicon",
    "GenderPrediction",
    "GenderScoreAggregate",
    "InputError",
    "LmStore",
    "MASK_TOKEN",
    "MissingKeyError",
    "ParseError",
    "ScoredCaption",
    "TextRecord",
    "ValidationReport",
    "VisualContext",
    "aggregate_distance_table",
    "alpha",
    "bias_ratio_to_m",
    "build_report",
    "caption_mentions",
    "cooc_counts",
    "cosine",
    "decide",
    "dump_json",
    "dump_jsonl",
    "estimate_gender",
    "estimation_report",
    "fill_mask",
    "filter_context",
    "fmt2",
    "gender_score",
    "hypothesis_probability",
    "label_caption_gender",
    "leakage",
    "load_captions",
    "load_contexts",
    "load_lm_sidecar",
    "load_sidecar_vectors",
    "load_text_records",
    "load_word_vectors",
    "mean_prob_from_logprobs",
    "parallel_map",
    "per_image_mean_to_m",
    "per_object_bias",
    "phrase_vector",
    "prefilter_context",
    "ratio_to_neutral",
    "render_distance_csv",
    "revise",
    "score_caption",
    "sentence_distance",
    "text_only_score",
    "tokenize",
    "validate_inputs",
    "variant_key",
    "word_distance",
    "worker_count",
    "write_contexts",
]
