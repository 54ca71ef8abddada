"""Counting baselines: gender co-occurrence, per-object bias, leakage.

The counting view of bias ignores scores entirely: how many captions of
each gender class does a corpus contain, per object or overall, and how
does a model's gendered output compare against the human references for
the same images (leakage = model count / human count)?
"""

from __future__ import annotations

import logging
import math
import re
from dataclasses import dataclass
from functools import lru_cache

from .core import GenderClass, GenderLexicon, label_caption_gender
from .distance import bias_ratio_to_m
from .errors import InputError

log = logging.getLogger(__name__)


@lru_cache(maxsize=4096)
def _label_pattern(label: str) -> re.Pattern:
    return re.compile(r"\b" + re.escape(label.lower()) + r"\b")


def caption_mentions(text: str, label: str) -> bool:
    """Word-boundary match of a possibly multi-word label in caption text."""
    return _label_pattern(label).search(text.lower()) is not None


@dataclass(frozen=True)
class CoocCounts:
    """Caption counts per gender class, with the count bias ratio."""

    man: int = 0
    woman: int = 0
    neutral: int = 0
    mixed: int = 0

    def to_m(self) -> float | None:
        return bias_ratio_to_m(self.man, self.woman)

    def to_w(self) -> float | None:
        return bias_ratio_to_m(self.woman, self.man)

    def to_dict(self) -> dict:
        return {
            "counts": {
                "man": self.man,
                "woman": self.woman,
                "neutral": self.neutral,
                "mixed": self.mixed,
            },
            "to_m": self.to_m(),
            "to_w": self.to_w(),
        }


def cooc_counts(records, lexicon: GenderLexicon, object_filter: str | None = None) -> CoocCounts:
    """Count captions per gender class, optionally only those mentioning an object.

    Mixed captions are counted under their own bucket and stay out of
    the gendered counts, so the ratio is computed over man and woman
    only.
    """
    tally = {cls: 0 for cls in GenderClass}
    for record in records:
        if object_filter is not None and not caption_mentions(record.text, object_filter):
            continue
        tally[label_caption_gender(record.text, lexicon)] += 1
    return CoocCounts(
        man=tally[GenderClass.MAN],
        woman=tally[GenderClass.WOMAN],
        neutral=tally[GenderClass.NEUTRAL],
        mixed=tally[GenderClass.MIXED],
    )


def per_object_bias(
    records,
    lexicon: GenderLexicon,
    object_label: str,
    method: str = "cooc",
    scores: dict[str, float] | None = None,
) -> tuple[float | None, float | None]:
    """Bias ratio pair (to-m, to-w) for captions mentioning one object.

    method 'cooc' weights each gendered caption as 1; 'gender_score'
    weights it by its revised score from *scores* (caption id to
    score). No matching gendered caption on either side yields (None,
    None).
    """
    if method not in ("cooc", "gender_score"):
        raise InputError(f"unknown per-object method {method!r}")
    if method == "gender_score" and scores is None:
        raise InputError("per-object gender_score needs a caption id to score mapping")
    sum_m = []
    sum_w = []
    for record in records:
        if not caption_mentions(record.text, object_label):
            continue
        cls = label_caption_gender(record.text, lexicon)
        if cls not in (GenderClass.MAN, GenderClass.WOMAN):
            continue
        if method == "cooc":
            weight = 1.0
        else:
            weight = scores.get(record.id)
            if weight is None:
                log.warning("no score for caption %r; skipped in per-object bias", record.id)
                continue
        (sum_m if cls is GenderClass.MAN else sum_w).append(weight)
    total_m = math.fsum(sum_m)
    total_w = math.fsum(sum_w)
    return bias_ratio_to_m(total_m, total_w), bias_ratio_to_m(total_w, total_m)


def leakage(model_count: float, human_count: float) -> float | None:
    """How much more often the model genders captions than humans do.

    None when the human count is zero (the ratio is undefined).
    """
    if model_count < 0 or human_count < 0:
        raise InputError("leakage needs non-negative counts")
    if human_count == 0:
        return None
    return model_count / human_count


def per_image_mean_to_m(records, lexicon: GenderLexicon) -> tuple[float | None, int]:
    """Mean over images of the per-image count bias ratio.

    Reference corpora carry several captions per image; averaging the
    ratio per image first weights each image equally instead of each
    caption. Images without a gendered caption are skipped. Returns the
    mean and the number of images it covers.
    """
    per_image: dict[str, list[int]] = {}
    for record in records:
        counts = per_image.setdefault(record.image_id, [0, 0])
        cls = label_caption_gender(record.text, lexicon)
        if cls is GenderClass.MAN:
            counts[0] += 1
        elif cls is GenderClass.WOMAN:
            counts[1] += 1
    ratios = []
    for image_id in sorted(per_image):
        man, woman = per_image[image_id]
        if man + woman == 0:
            continue
        ratios.append(man / (man + woman))
    if not ratios:
        return None, 0
    return math.fsum(ratios) / len(ratios), len(ratios)
