"""Visual-context filtering: confidence gate, duplicate voting, top-k cut.

Raw detections from several classifiers are reduced to at most k
high-confidence, semantically distinct objects:

1. drop candidates below the confidence threshold;
2. drop candidates whose label equals a lexicon term (the person
   category carries no object information here);
3. order canonically (confidence descending, then label, then
   classifier) and greedily absorb near-duplicates: a candidate whose
   label embedding has cosine >= vote_threshold against an already kept
   one is dropped;
4. keep the first k survivors.

The result is a subset of the input candidates in canonical order, so
filtering is idempotent and independent of input ordering.
"""

from __future__ import annotations

import logging

from .core import ContextObject, GenderLexicon, VisualContext
from .errors import InputError
from .vectors import EmbeddingStore, cosine, phrase_vector

log = logging.getLogger(__name__)


def filter_context(
    candidates,
    store: EmbeddingStore | None = None,
    *,
    lexicon: GenderLexicon,
    conf_threshold: float = 0.2,
    vote_threshold: float = 0.8,
    k: int = 3,
    image_id: str = "",
) -> VisualContext:
    """Reduce raw candidates to at most *k* distinct objects.

    *store* supplies label embeddings for duplicate voting; without it
    (or for out-of-vocabulary labels) only identical labels absorb each
    other, and the uncovered labels are reported once via a warning.
    """
    if not 0.0 <= conf_threshold <= 1.0:
        raise InputError(f"conf_threshold must be in [0, 1], got {conf_threshold!r}")
    if not 0.0 <= vote_threshold <= 1.0:
        raise InputError(f"vote_threshold must be in [0, 1], got {vote_threshold!r}")
    if k < 1:
        raise InputError(f"k must be at least 1, got {k!r}")

    survivors = [c for c in candidates if c.confidence >= conf_threshold]
    survivors = [c for c in survivors if c.label.lower() not in lexicon.all_terms]
    ordered = sorted(survivors, key=lambda c: (-c.confidence, c.label, c.classifier))

    kept: list[ContextObject] = []
    uncovered: set[str] = set()
    for cand in ordered:
        absorbed = False
        for keeper in kept:
            if _is_duplicate(cand, keeper, store, vote_threshold, uncovered):
                absorbed = True
                break
        if not absorbed:
            kept.append(cand)
    kept = kept[:k]

    if uncovered:
        log.warning(
            "no label embedding for %s; treated as distinct during voting",
            ", ".join(repr(u) for u in sorted(uncovered)),
        )
    return VisualContext(image_id=image_id, objects=tuple(kept))


def _is_duplicate(cand, keeper, store, vote_threshold, uncovered) -> bool:
    if cand.label.lower() == keeper.label.lower():
        return True
    if store is None:
        uncovered.update((cand.label, keeper.label))
        return False
    va = phrase_vector(cand.label, store)
    vb = phrase_vector(keeper.label, store)
    if va is None:
        uncovered.add(cand.label)
    if vb is None:
        uncovered.add(keeper.label)
    if va is None or vb is None:
        return False
    return cosine(va, vb) >= vote_threshold


def prefilter_context(
    context: VisualContext | None,
    *,
    lexicon: GenderLexicon,
    conf_threshold: float = 0.2,
    k: int = 3,
) -> VisualContext:
    """Vector-free part of the filter, applied by scoring consumers.

    Scoring commands receive contexts that should already be filtered;
    running the confidence gate, lexicon drop, identical-label dedup,
    and top-k cut again costs nothing on filtered input (the filter is
    idempotent) and protects against raw input. Cross-classifier voting
    needs label embeddings and stays in the dedicated filter step.
    """
    if context is None:
        return VisualContext(image_id="", objects=())
    survivors = [
        c
        for c in context.objects
        if c.confidence >= conf_threshold and c.label.lower() not in lexicon.all_terms
    ]
    ordered = sorted(survivors, key=lambda c: (-c.confidence, c.label, c.classifier))
    kept: list[ContextObject] = []
    for cand in ordered:
        if any(cand.label.lower() == kp.label.lower() for kp in kept):
            continue
        kept.append(cand)
    return VisualContext(image_id=context.image_id, objects=tuple(kept[:k]))
