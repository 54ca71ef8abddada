"""Belief-revision gender scoring.

A caption's gender hypothesis starts at the language-model probability
of the caption (mean token probability) and is revised toward certainty
by visual evidence. The revision exponent

    alpha = ((1 - sim) / (1 + sim)) ** (1 - p_object)

shrinks as the caption-object similarity sim grows and as the detector
confidence p_object falls, and the revised score is

    score = p_hypothesis ** alpha,

computed in the log domain as exp(alpha * ln p). alpha = 1 leaves the
hypothesis untouched (no evidence: empty context, or a fully certain
object with sim handled by the exponent), alpha = 0 revises to 1.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

from .core import (
    CaptionRecord,
    GenderClass,
    GenderLexicon,
    VisualContext,
    label_caption_gender,
    variant_key,
)
from .errors import InputError, MissingKeyError, ParseError
from .vectors import EmbeddingStore, cosine, iter_jsonl

log = logging.getLogger(__name__)

PROB_FLOOR = 1e-12

STRATEGIES = ("max_sim", "mean_topk")


class LmStore:
    """Key to mean-token-probability lookup from a language-model sidecar."""

    __slots__ = ("manifest", "_probs")

    def __init__(self, probs: dict[str, float], manifest: dict | None = None):
        if not probs:
            raise InputError("language-model store needs at least one entry")
        for key, p in probs.items():
            if not (0.0 <= p <= 1.0) or not math.isfinite(p):
                raise InputError(f"probability for {key!r} out of range: {p!r}")
        self._probs = dict(probs)
        self.manifest = manifest

    def get(self, key: str) -> float | None:
        return self._probs.get(key)

    def __contains__(self, key: str) -> bool:
        return key in self._probs

    def __len__(self) -> int:
        return len(self._probs)

    def keys(self):
        return self._probs.keys()


def mean_prob_from_logprobs(logprobs: list[float]) -> float:
    """Arithmetic mean of per-token probabilities given their logs."""
    if not logprobs:
        raise InputError("empty token logprob list")
    return math.fsum(math.exp(lp) for lp in logprobs) / len(logprobs)


def load_lm_sidecar(path) -> LmStore:
    """Parse a language-model sidecar: JSONL of per-key probabilities.

    Each record carries ``mean_token_prob``, ``token_logprobs``, or
    both; when both appear the explicit mean wins. A leading
    ``{"_manifest": ...}`` record is kept on the store. Duplicate keys,
    empty token lists, and out-of-range probabilities are ParseErrors.
    """
    probs: dict[str, float] = {}
    manifest = None
    for lineno, record in iter_jsonl(path):
        if "_manifest" in record:
            if manifest is not None:
                raise ParseError(f"{path}:{lineno}: repeated _manifest record")
            manifest = record["_manifest"]
            continue
        key = record.get("key")
        if not isinstance(key, str) or not key:
            raise ParseError(f"{path}:{lineno}: record without a string 'key'")
        if key in probs:
            raise ParseError(f"{path}:{lineno}: duplicate key {key!r}")
        mean = record.get("mean_token_prob")
        logprobs = record.get("token_logprobs")
        if mean is None and logprobs is None:
            raise ParseError(
                f"{path}:{lineno}: key {key!r} has neither mean_token_prob nor token_logprobs"
            )
        if logprobs is not None:
            if not isinstance(logprobs, list) or not logprobs:
                raise ParseError(f"{path}:{lineno}: key {key!r} has an empty token_logprobs list")
            for lp in logprobs:
                if not isinstance(lp, (int, float)) or not math.isfinite(float(lp)) or lp > 0.0:
                    raise ParseError(
                        f"{path}:{lineno}: key {key!r} has an invalid token logprob {lp!r}"
                    )
        if mean is not None:
            if not isinstance(mean, (int, float)) or not math.isfinite(float(mean)) or not 0.0 <= float(mean) <= 1.0:
                raise ParseError(
                    f"{path}:{lineno}: key {key!r} has mean_token_prob {mean!r} outside [0, 1]"
                )
            probs[key] = float(mean)
        else:
            probs[key] = mean_prob_from_logprobs([float(lp) for lp in logprobs])
    if not probs:
        raise ParseError(f"{path}: sidecar holds no probability records")
    return LmStore(probs, manifest=manifest)


def hypothesis_probability(key: str, store: LmStore) -> float:
    """Initial gender-hypothesis probability for a sidecar key.

    The hypothesis is mandatory: a missing key is an error, never a
    default. The value is floored at PROB_FLOOR so the log-domain
    revision stays finite.
    """
    raw = store.get(key)
    if raw is None:
        raise MissingKeyError(key, where="language-model sidecar")
    return max(raw, PROB_FLOOR)


def alpha(sim: float, p_object: float) -> float:
    """Revision exponent from similarity and object confidence.

    Both arguments are clamped into [0, 1] before use. p_object = 1
    gives alpha = 1 even at sim = 1 (a fully expected object revises
    nothing); sim = 1 with p_object < 1 gives alpha = 0.
    """
    s = min(1.0, max(0.0, float(sim)))
    c = min(1.0, max(0.0, float(p_object)))
    exponent = 1.0 - c
    if exponent == 0.0:
        return 1.0
    base = (1.0 - s) / (1.0 + s)
    if base == 0.0:
        return 0.0
    return base**exponent


def revise(p_hypothesis: float, a: float) -> float:
    """Raise the hypothesis toward 1: exp(a * ln p).

    a = 1 returns p exactly and a = 0 returns 1.0 exactly; between the
    endpoints the computation runs in the log domain. p is clamped into
    [PROB_FLOOR, 1].
    """
    p = min(1.0, max(PROB_FLOOR, float(p_hypothesis)))
    if a <= 0.0:
        return 1.0
    if a >= 1.0:
        return p
    return math.exp(a * math.log(p))


@dataclass(frozen=True)
class ScoredCaption:
    """One caption scored under one gender.

    For the max_sim strategy the object fields identify the single
    revising object. For mean_topk the score is a mean over objects, so
    object_label and p_object are None, sim reports the strongest
    similarity, and alpha is the effective exponent backed out of the
    final score (score = p_hypothesis ** alpha still holds).
    """

    caption_id: str
    gender: GenderClass
    p_hypothesis: float
    object_label: str | None
    p_object: float | None
    sim: float
    alpha: float
    score: float

    def to_dict(self) -> dict:
        return {
            "caption_id": self.caption_id,
            "gender": self.gender.value,
            "p_hypothesis": self.p_hypothesis,
            "object_label": self.object_label,
            "p_object": self.p_object,
            "sim": self.sim,
            "alpha": self.alpha,
            "score": self.score,
        }


@dataclass(frozen=True)
class GenderScoreAggregate:
    """Corpus mean of revised scores for one gender class."""

    gender: GenderClass
    mean_score: float | None
    count: int

    def to_dict(self) -> dict:
        return {"gender": self.gender.value, "mean_score": self.mean_score, "count": self.count}


def score_caption(
    record: CaptionRecord,
    gender: GenderClass,
    context: VisualContext | None,
    emb_store: EmbeddingStore,
    lm_store: LmStore,
    strategy: str = "max_sim",
    *,
    key: str | None = None,
) -> ScoredCaption:
    """Score one caption under one gender against its visual context.

    The sidecar key defaults to the caption id, or to the gendered
    variant key for masked captions; pass *key* to override. An empty
    or fully out-of-vocabulary context leaves the hypothesis unrevised
    (alpha = 1). A missing caption embedding while objects are present
    is an error naming the key.
    """
    if strategy not in STRATEGIES:
        raise InputError(f"unknown strategy {strategy!r}; expected one of {STRATEGIES}")
    if gender is GenderClass.MIXED:
        raise InputError("cannot score the mixed class")
    if key is None:
        key = variant_key(record.id, gender) if record.mask_present else record.id
    p_h = hypothesis_probability(key, lm_store)

    objects = context.objects if context is not None else ()
    if not objects:
        return ScoredCaption(record.id, gender, p_h, None, None, 0.0, 1.0, p_h)

    caption_vec = emb_store.get(key)
    if caption_vec is None:
        raise MissingKeyError(key, where="embedding sidecar")

    sims = []
    for obj in objects:
        obj_vec = emb_store.get(obj.label)
        if obj_vec is None:
            log.warning("embedding sidecar has no object label %r; skipped", obj.label)
            continue
        sims.append((max(0.0, cosine(caption_vec, obj_vec)), obj))
    if not sims:
        return ScoredCaption(record.id, gender, p_h, None, None, 0.0, 1.0, p_h)

    if strategy == "max_sim":
        best_sim, best_obj = max(sims, key=lambda item: item[0])
        a = alpha(best_sim, best_obj.confidence)
        return ScoredCaption(
            record.id, gender, p_h, best_obj.label, best_obj.confidence, best_sim, a,
            revise(p_h, a),
        )

    scores = [revise(p_h, alpha(s, obj.confidence)) for s, obj in sims]
    score = math.fsum(scores) / len(scores)
    max_sim = max(s for s, _ in sims)
    if score >= 1.0 or p_h >= 1.0:
        effective = 0.0 if score >= 1.0 else 1.0
    else:
        effective = math.log(score) / math.log(p_h)
        effective = min(1.0, max(0.0, effective))
    return ScoredCaption(record.id, gender, p_h, None, None, max_sim, effective, score)


def gender_score(
    records,
    gender: GenderClass,
    contexts: dict,
    emb_store: EmbeddingStore,
    lm_store: LmStore,
    *,
    lexicon: GenderLexicon,
    strategy: str = "max_sim",
) -> GenderScoreAggregate:
    """Corpus mean of revised scores over the captions of one gender.

    Unmasked captions belong to the class their text is labeled with;
    masked captions belong to every fillable class via their fill.
    Mixed captions never contribute. An empty class yields count 0 and
    a null mean.
    """
    if gender is GenderClass.MIXED:
        raise InputError("gender scores aggregate only fillable classes")
    scores = []
    for record in records:
        if record.mask_present:
            member = True
        else:
            member = label_caption_gender(record.text, lexicon) is gender
        if not member:
            continue
        ctx = contexts.get(record.image_id)
        scored = score_caption(record, gender, ctx, emb_store, lm_store, strategy)
        scores.append(scored.score)
    if not scores:
        return GenderScoreAggregate(gender, None, 0)
    return GenderScoreAggregate(gender, math.fsum(scores) / len(scores), len(scores))
