"""Masked-gender estimation: fill, score both genders, take the argmax.

Each record carries a single ``<MASK>`` slot. The man and woman fills
are scored through the belief-revision pipeline against the record's
visual context; the higher score wins, and scores within tie_epsilon of
each other are reported as Neutral rather than forcing a coin flip.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import CaptionRecord, GenderClass
from .distance import bias_ratio_to_m
from .errors import BiasAuditError, InputError
from .revision import LmStore, score_caption
from .vectors import EmbeddingStore

TIE_EPSILON = 1e-9


@dataclass(frozen=True)
class GenderPrediction:
    """Both variant scores and the predicted class for one masked caption."""

    caption_id: str
    score_man: float
    score_woman: float
    predicted: GenderClass
    margin: float
    score_person: float | None = None

    def to_dict(self) -> dict:
        row = {
            "caption_id": self.caption_id,
            "score_man": self.score_man,
            "score_woman": self.score_woman,
            "predicted": self.predicted.value,
            "margin": self.margin,
        }
        if self.score_person is not None:
            row["score_person"] = self.score_person
        return row


def decide(score_man: float, score_woman: float, tie_epsilon: float = TIE_EPSILON) -> GenderClass:
    """Argmax with a tie band: near-equal scores predict Neutral."""
    if tie_epsilon < 0:
        raise InputError(f"tie_epsilon must be non-negative, got {tie_epsilon!r}")
    if abs(score_man - score_woman) <= tie_epsilon:
        return GenderClass.NEUTRAL
    return GenderClass.MAN if score_man > score_woman else GenderClass.WOMAN


def estimate_gender(
    record: CaptionRecord,
    context,
    emb_store: EmbeddingStore,
    lm_store: LmStore,
    *,
    strategy: str = "max_sim",
    tie_epsilon: float = TIE_EPSILON,
    include_neutral: bool = False,
) -> GenderPrediction:
    """Predict the masked gender of one caption.

    include_neutral additionally scores the person fill for reporting;
    it never changes the prediction, which stays an argmax over the two
    gendered fills with the tie band mapping to Neutral.
    """
    if not record.mask_present:
        raise InputError(f"caption {record.id!r} has no mask to estimate")
    s_man = score_caption(record, GenderClass.MAN, context, emb_store, lm_store, strategy).score
    s_woman = score_caption(record, GenderClass.WOMAN, context, emb_store, lm_store, strategy).score
    s_person = None
    if include_neutral:
        s_person = score_caption(
            record, GenderClass.NEUTRAL, context, emb_store, lm_store, strategy
        ).score
    return GenderPrediction(
        caption_id=record.id,
        score_man=s_man,
        score_woman=s_woman,
        predicted=decide(s_man, s_woman, tie_epsilon),
        margin=abs(s_man - s_woman),
        score_person=s_person,
    )


@dataclass
class EstimationReport:
    """Prediction counts over a masked corpus plus the count bias ratio."""

    predictions: list[GenderPrediction]
    counts: dict[str, int]
    errors: list[dict]

    def to_m(self) -> float | None:
        return bias_ratio_to_m(self.counts["man"], self.counts["woman"])

    def to_w(self) -> float | None:
        return bias_ratio_to_m(self.counts["woman"], self.counts["man"])

    def summary(self) -> dict:
        return {
            "counts": dict(self.counts),
            "errors": len(self.errors),
            "error_records": self.errors,
            "to_m": self.to_m(),
            "to_w": self.to_w(),
        }


def estimation_report(
    records,
    contexts: dict,
    emb_store: EmbeddingStore,
    lm_store: LmStore,
    *,
    strategy: str = "max_sim",
    tie_epsilon: float = TIE_EPSILON,
    include_neutral: bool = False,
    mapper=map,
) -> EstimationReport:
    """Estimate every record; collect per-record failures instead of aborting.

    Failed records are excluded from the counts and surfaced in the
    report. The bias ratio runs over the two gendered counts only;
    Neutral predictions are tallied separately. *mapper* lets the CLI
    substitute a pooled map; results are reassembled in caption order
    either way.
    """

    def run(record):
        try:
            return estimate_gender(
                record,
                contexts.get(record.image_id),
                emb_store,
                lm_store,
                strategy=strategy,
                tie_epsilon=tie_epsilon,
                include_neutral=include_neutral,
            )
        except BiasAuditError as exc:
            return {"caption_id": record.id, "error": str(exc)}

    outcomes = list(mapper(run, records))
    predictions = sorted(
        (o for o in outcomes if isinstance(o, GenderPrediction)),
        key=lambda p: p.caption_id,
    )
    errors = sorted(
        (o for o in outcomes if isinstance(o, dict)), key=lambda e: e["caption_id"]
    )
    counts = {"man": 0, "woman": 0, "neutral": 0}
    for pred in predictions:
        counts[pred.predicted.value] += 1
    return EstimationReport(predictions=predictions, counts=counts, errors=errors)
