"""Produce the sidecar files the biasaudit toolkit consumes.

Two exporters, one per sidecar: sentence embeddings for captions, filled
mask variants, lexicon anchor phrases, and context object labels; and
causal-LM token probabilities for captions and filled variants. Both
write JSONL with a manifest header record pinning the model identity,
atomically (write-then-rename), records in canonical key order.
"""

from .contract import (
    FILL_SUFFIXES,
    MASK_TOKEN,
    embedding_texts,
    lm_texts,
    load_lexicon,
    read_captions,
    read_context_labels,
    variant_key,
)
from .embed import export_embeddings
from .errors import ExportError
from .lm import export_lm_probs

__version__ = "0.1.0"

__all__ = [
    "ExportError",
    "FILL_SUFFIXES",
    "MASK_TOKEN",
    "embedding_texts",
    "export_embeddings",
    "export_lm_probs",
    "lm_texts",
    "load_lexicon",
    "read_captions",
    "read_context_labels",
    "variant_key",
    "__version__",
]
