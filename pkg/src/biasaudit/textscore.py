"""Text-only scoring for corpora without images.

Each record supplies its own context: a keyword standing in for the
detected object, with a pseudo-confidence. The default pseudo-confidence
is 0.5, deliberately not 1.0: a fully certain context disables revision
(alpha = 1), which would reduce the whole mode to the raw hypothesis.
Records without a keyword fall back to exactly that hypothesis.

Both gendered variants of every record are scored, so the sidecars must
carry ``<id>#man`` and ``<id>#woman`` keys.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

from .core import CaptionRecord, ContextObject, GenderClass, VisualContext, variant_key
from .distance import bias_ratio_to_m
from .errors import InputError, ParseError
from .revision import LmStore, score_caption
from .vectors import EmbeddingStore, iter_jsonl

DEFAULT_KEYWORD_CONFIDENCE = 0.5


@dataclass(frozen=True)
class TextRecord:
    """One text with an optional keyword context and ground-truth tag."""

    id: str
    text: str
    keyword: str | None = None
    keyword_confidence: float | None = None
    gt_confidence: float | None = None

    def __post_init__(self):
        if not self.id:
            raise InputError("text record has an empty id")
        if not self.text:
            raise InputError(f"text record {self.id!r} has empty text")
        if self.keyword_confidence is not None and not 0.0 <= self.keyword_confidence <= 1.0:
            raise InputError(
                f"text record {self.id!r} has keyword_confidence outside [0, 1]"
            )


def load_text_records(path: str | Path) -> list[TextRecord]:
    records: list[TextRecord] = []
    seen: set[str] = set()
    for lineno, raw in iter_jsonl(path):
        for field in ("id", "text"):
            if field not in raw:
                raise ParseError(f"{path}:{lineno}: text record lacks {field!r}")
        try:
            rec = TextRecord(
                id=str(raw["id"]),
                text=str(raw["text"]),
                keyword=str(raw["keyword"]) if raw.get("keyword") is not None else None,
                keyword_confidence=(
                    float(raw["keyword_confidence"])
                    if raw.get("keyword_confidence") is not None
                    else None
                ),
                gt_confidence=(
                    float(raw["gt_confidence"])
                    if raw.get("gt_confidence") is not None
                    else None
                ),
            )
        except (InputError, TypeError, ValueError) as exc:
            raise ParseError(f"{path}:{lineno}: {exc}") from exc
        if rec.id in seen:
            raise ParseError(f"{path}:{lineno}: duplicate text record id {rec.id!r}")
        seen.add(rec.id)
        records.append(rec)
    return records


def text_only_score(
    records,
    emb_store: EmbeddingStore,
    lm_store: LmStore,
    *,
    strategy: str = "max_sim",
    default_keyword_confidence: float = DEFAULT_KEYWORD_CONFIDENCE,
    mapper=map,
) -> tuple[list[dict], dict]:
    """Score both gendered variants of every record against its keyword.

    Returns per-record rows sorted by id and a corpus summary with the
    mean scores and their bias ratio.
    """
    if not 0.0 <= default_keyword_confidence <= 1.0:
        raise InputError(
            f"keyword confidence must be in [0, 1], got {default_keyword_confidence!r}"
        )

    def run(record: TextRecord) -> dict:
        if record.keyword is None:
            context = None
        else:
            confidence = record.keyword_confidence
            if confidence is None:
                confidence = default_keyword_confidence
            context = VisualContext(
                image_id="",
                objects=(
                    ContextObject(
                        label=record.keyword, confidence=confidence, classifier="keyword"
                    ),
                ),
            )
        carrier = CaptionRecord(
            id=record.id, image_id="", text=record.text, source="model"
        )
        row = {"id": record.id, "keyword": record.keyword}
        for gender in (GenderClass.MAN, GenderClass.WOMAN):
            scored = score_caption(
                carrier,
                gender,
                context,
                emb_store,
                lm_store,
                strategy,
                key=variant_key(record.id, gender),
            )
            row[f"score_{gender.value}"] = scored.score
        if record.gt_confidence is not None:
            row["gt_confidence"] = record.gt_confidence
        return row

    rows = sorted(mapper(run, records), key=lambda r: r["id"])
    count = len(rows)
    mean_man = math.fsum(r["score_man"] for r in rows) / count if count else None
    mean_woman = math.fsum(r["score_woman"] for r in rows) / count if count else None
    summary = {
        "count": count,
        "mean_man": mean_man,
        "mean_woman": mean_woman,
        "to_m": bias_ratio_to_m(mean_man, mean_woman) if count else None,
        "to_w": bias_ratio_to_m(mean_woman, mean_man) if count else None,
    }
    return rows, summary
