"""Gender-object similarity and the bias-ratio table.

Similarity is cosine with negatives clamped to zero, taken either
between a gender term and an object label (word level) or between a
gender anchor phrase and a whole caption (sentence level). Two ratios
summarize a pair of per-gender scores:

* to-m ratio: s_m / (s_m + s_w), the share of the combined association
  that points at the man class;
* ratio to neutral: s_gender / s_person.

Out-of-vocabulary lookups return None (a skip signal, deliberately
distinct from a zero score) and are tallied as coverage misses.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

from .core import CaptionRecord, GenderClass, GenderLexicon, label_caption_gender
from .errors import InputError
from .vectors import EmbeddingStore, cosine, phrase_vector

log = logging.getLogger(__name__)

CORPUS_SUBJECT = "corpus"

_COLUMNS = (GenderClass.NEUTRAL, GenderClass.MAN, GenderClass.WOMAN)


def word_distance(
    object_label: str,
    cls: GenderClass,
    lexicon: GenderLexicon,
    store: EmbeddingStore,
) -> float | None:
    """Similarity of an object label to a gender class's canonical term.

    Returns None when either side is out of vocabulary. Multi-word
    labels use the mean of their in-vocabulary token vectors.
    """
    if cls is GenderClass.MIXED:
        raise InputError("word distance is undefined for the mixed class")
    term_vec = store.get(lexicon.canonical_term(cls))
    label_vec = phrase_vector(object_label, store)
    if term_vec is None or label_vec is None:
        return None
    return max(0.0, cosine(term_vec, label_vec))


def sentence_distance(
    caption_key: str,
    cls: GenderClass,
    sidecar: EmbeddingStore,
    lexicon: GenderLexicon,
) -> float | None:
    """Similarity of a caption embedding to a gender anchor phrase."""
    if cls is GenderClass.MIXED:
        raise InputError("sentence distance is undefined for the mixed class")
    anchor_vec = sidecar.get(lexicon.anchor(cls))
    caption_vec = sidecar.get(caption_key)
    if anchor_vec is None:
        log.warning("embedding sidecar has no anchor phrase %r", lexicon.anchor(cls))
        return None
    if caption_vec is None:
        log.warning("embedding sidecar has no caption key %r", caption_key)
        return None
    return max(0.0, cosine(anchor_vec, caption_vec))


def bias_ratio_to_m(s_m: float, s_w: float) -> float | None:
    """Share of the combined association pointing at the man class.

    None when both scores are zero (the ratio is undefined there and is
    reported as a null cell).
    """
    if s_m < 0 or s_w < 0:
        raise InputError("bias ratio needs non-negative scores")
    total = s_m + s_w
    if total == 0:
        return None
    return s_m / total


def ratio_to_neutral(s_gender: float, s_person: float) -> float | None:
    """Gendered association relative to the neutral one; None when undefined."""
    if s_gender < 0 or s_person < 0:
        raise InputError("ratio to neutral needs non-negative scores")
    if s_person == 0:
        return None
    return s_gender / s_person


@dataclass
class GenderDistanceRow:
    """Mean similarity per gender class for one subject (object or corpus)."""

    subject: str
    s_person: float | None = None
    s_man: float | None = None
    s_woman: float | None = None
    n_person: int = 0
    n_man: int = 0
    n_woman: int = 0

    def to_m(self) -> float | None:
        if self.s_man is None or self.s_woman is None:
            return None
        return bias_ratio_to_m(self.s_man, self.s_woman)

    def to_w(self) -> float | None:
        if self.s_man is None or self.s_woman is None:
            return None
        return bias_ratio_to_m(self.s_woman, self.s_man)

    def man_to_neutral(self) -> float | None:
        if self.s_man is None or self.s_person is None:
            return None
        return ratio_to_neutral(self.s_man, self.s_person)

    def woman_to_neutral(self) -> float | None:
        if self.s_woman is None or self.s_person is None:
            return None
        return ratio_to_neutral(self.s_woman, self.s_person)

    def to_dict(self) -> dict:
        return {
            "subject": self.subject,
            "s_person": self.s_person,
            "s_man": self.s_man,
            "s_woman": self.s_woman,
            "n_person": self.n_person,
            "n_man": self.n_man,
            "n_woman": self.n_woman,
            "to_m": self.to_m(),
            "to_w": self.to_w(),
            "man_to_neutral": self.man_to_neutral(),
            "woman_to_neutral": self.woman_to_neutral(),
        }


@dataclass
class DistanceTable:
    """Per-object rows plus the corpus row, with ranking and coverage."""

    level: str
    rows: list[GenderDistanceRow]
    corpus: GenderDistanceRow
    top_objects: dict[str, list[str]]
    pairs: int
    skipped: int

    def to_dict(self) -> dict:
        return {
            "level": self.level,
            "corpus": self.corpus.to_dict(),
            "rows": [row.to_dict() for row in self.rows],
            "top_objects": self.top_objects,
            "coverage": {"pairs": self.pairs, "skipped": self.skipped},
        }


class _MeanAcc:
    __slots__ = ("values",)

    def __init__(self):
        self.values: list[float] = []

    def add(self, value: float) -> None:
        self.values.append(value)

    def mean(self) -> float | None:
        if not self.values:
            return None
        return math.fsum(self.values) / len(self.values)

    def count(self) -> int:
        return len(self.values)


def aggregate_distance_table(
    records: list[CaptionRecord],
    contexts: dict,
    level: str,
    *,
    lexicon: GenderLexicon,
    word_store: EmbeddingStore | None = None,
    sidecar: EmbeddingStore | None = None,
    top_n: int = 5,
) -> DistanceTable:
    """Build the per-object and corpus similarity table over a dataset.

    Every (caption, context object) pair counts once. The person column
    averages over all pairs; the man and woman columns average only
    over pairs whose caption is labeled with that gender. An empty
    dataset yields an empty table, not an error.
    """
    if level == "word":
        if word_store is None:
            raise InputError("word-level distance needs a word-vector store")
        value_of = _word_value(word_store, lexicon)
    elif level == "sentence":
        if sidecar is None:
            raise InputError("sentence-level distance needs an embedding sidecar")
        value_of = _sentence_value(sidecar, lexicon)
    else:
        raise InputError(f"unknown distance level {level!r}; expected 'word' or 'sentence'")

    per_object: dict[str, dict[GenderClass, _MeanAcc]] = {}
    corpus = {col: _MeanAcc() for col in _COLUMNS}
    pairs = 0
    skipped = 0

    for record in records:
        ctx = contexts.get(record.image_id)
        if ctx is None or not ctx.objects:
            continue
        label_cls = label_caption_gender(record.text, lexicon)
        for obj in ctx.objects:
            pairs += 1
            accs = per_object.setdefault(
                obj.label, {col: _MeanAcc() for col in _COLUMNS}
            )
            for col in _COLUMNS:
                if col is not GenderClass.NEUTRAL and label_cls is not col:
                    continue
                value = value_of(record, obj, col)
                if value is None:
                    skipped += 1
                    continue
                accs[col].add(value)
                corpus[col].add(value)

    rows = []
    for label in sorted(per_object):
        accs = per_object[label]
        rows.append(_row_from(label, accs))
    corpus_row = _row_from(CORPUS_SUBJECT, corpus)

    top_objects: dict[str, list[str]] = {}
    for col, field in ((GenderClass.NEUTRAL, "s_person"),
                       (GenderClass.MAN, "s_man"),
                       (GenderClass.WOMAN, "s_woman")):
        scored = [
            (row.subject, getattr(row, field))
            for row in rows
            if getattr(row, field) is not None
        ]
        scored.sort(key=lambda item: (-item[1], item[0]))
        top_objects[col.value] = [subject for subject, _ in scored[:top_n]]

    return DistanceTable(
        level=level,
        rows=rows,
        corpus=corpus_row,
        top_objects=top_objects,
        pairs=pairs,
        skipped=skipped,
    )


def _row_from(subject: str, accs: dict) -> GenderDistanceRow:
    return GenderDistanceRow(
        subject=subject,
        s_person=accs[GenderClass.NEUTRAL].mean(),
        s_man=accs[GenderClass.MAN].mean(),
        s_woman=accs[GenderClass.WOMAN].mean(),
        n_person=accs[GenderClass.NEUTRAL].count(),
        n_man=accs[GenderClass.MAN].count(),
        n_woman=accs[GenderClass.WOMAN].count(),
    )


def _word_value(store: EmbeddingStore, lexicon: GenderLexicon):
    cache: dict[tuple[str, GenderClass], float | None] = {}

    def value(record, obj, col):
        key = (obj.label, col)
        if key not in cache:
            cache[key] = word_distance(obj.label, col, lexicon, store)
        return cache[key]

    return value


def _sentence_value(sidecar: EmbeddingStore, lexicon: GenderLexicon):
    cache: dict[tuple[str, GenderClass], float | None] = {}

    def value(record, obj, col):
        key = (record.id, col)
        if key not in cache:
            cache[key] = sentence_distance(record.id, col, sidecar, lexicon)
        return cache[key]

    return value
