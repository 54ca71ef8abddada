"""Domain types, the gender lexicon, and gender labeling of caption text.

A caption is assigned one of four classes by scanning its tokens against
configurable term sets: Man, Woman, Neutral (no gendered term), or Mixed
(terms from both gendered sets). Mixed captions are excluded from every
per-gender aggregate downstream.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from pathlib import Path

from .errors import InputError

MASK_TOKEN = "<MASK>"

_TOKEN_RE = re.compile(r"[a-z0-9]+")
_TERM_RE = re.compile(r"[a-z0-9]+")


def tokenize(text: str) -> list[str]:
    """Lowercase *text* and split it on non-alphanumeric boundaries."""
    return _TOKEN_RE.findall(text.lower())


class GenderClass(str, Enum):
    MAN = "man"
    WOMAN = "woman"
    NEUTRAL = "neutral"
    MIXED = "mixed"


# Classes a caption variant can be filled with; Mixed is a label, never a fill.
FILLABLE_CLASSES = (GenderClass.MAN, GenderClass.WOMAN, GenderClass.NEUTRAL)


@dataclass(frozen=True)
class GenderLexicon:
    """Term sets and anchor phrases that define the gender classes.

    Term order matters: the first term of each tuple is the canonical
    surface form used to fill ``<MASK>`` slots and to look up the class
    in a word-vector vocabulary. The three sets must be non-empty,
    lowercase single tokens, and pairwise disjoint.
    """

    man_terms: tuple[str, ...]
    woman_terms: tuple[str, ...]
    neutral_terms: tuple[str, ...]
    anchors: dict[GenderClass, str] = field(
        default_factory=lambda: {
            GenderClass.MAN: "a man",
            GenderClass.WOMAN: "a woman",
            GenderClass.NEUTRAL: "a person",
        }
    )

    def __post_init__(self):
        sets = {
            "man": self.man_terms,
            "woman": self.woman_terms,
            "neutral": self.neutral_terms,
        }
        for name, terms in sets.items():
            if not terms:
                raise InputError(f"lexicon class {name!r} has no terms")
            for term in terms:
                if not _TERM_RE.fullmatch(term):
                    raise InputError(
                        f"lexicon term {term!r} in class {name!r} must be a "
                        "lowercase alphanumeric token"
                    )
        names = list(sets)
        for i, a in enumerate(names):
            for b in names[i + 1 :]:
                shared = set(sets[a]) & set(sets[b])
                if shared:
                    raise InputError(
                        f"lexicon classes {a!r} and {b!r} share terms: "
                        f"{sorted(shared)}"
                    )
        for cls in FILLABLE_CLASSES:
            phrase = self.anchors.get(cls)
            if not phrase or not phrase.strip():
                raise InputError(f"lexicon is missing an anchor phrase for {cls.value!r}")
        object.__setattr__(self, "_sets", {
            GenderClass.MAN: frozenset(self.man_terms),
            GenderClass.WOMAN: frozenset(self.woman_terms),
            GenderClass.NEUTRAL: frozenset(self.neutral_terms),
        })

    def terms(self, cls: GenderClass) -> frozenset[str]:
        try:
            return self._sets[cls]
        except KeyError:
            raise InputError(f"no term set for class {cls.value!r}") from None

    @property
    def all_terms(self) -> frozenset[str]:
        return self._sets[GenderClass.MAN] | self._sets[GenderClass.WOMAN] | self._sets[GenderClass.NEUTRAL]

    def canonical_term(self, cls: GenderClass) -> str:
        """First term of the class, by convention man/woman/person."""
        if cls is GenderClass.MAN:
            return self.man_terms[0]
        if cls is GenderClass.WOMAN:
            return self.woman_terms[0]
        if cls is GenderClass.NEUTRAL:
            return self.neutral_terms[0]
        raise InputError("the mixed class has no canonical term")

    def anchor(self, cls: GenderClass) -> str:
        phrase = self.anchors.get(cls)
        if phrase is None:
            raise InputError(f"no anchor phrase for class {cls.value!r}")
        return phrase

    @classmethod
    def from_dict(cls, raw: dict) -> "GenderLexicon":
        for name in ("man", "woman", "neutral"):
            if name not in raw or not isinstance(raw[name], list):
                raise InputError(f"lexicon config must map {name!r} to a list of terms")
        anchors_raw = raw.get("anchors", {})
        if not isinstance(anchors_raw, dict):
            raise InputError("lexicon 'anchors' must be an object")
        anchors = {}
        for key, default in (("man", "a man"), ("woman", "a woman"), ("neutral", "a person")):
            phrase = anchors_raw.get(key, default)
            if not isinstance(phrase, str):
                raise InputError(f"anchor for {key!r} must be a string")
            anchors[GenderClass(key)] = phrase
        return cls(
            man_terms=tuple(raw["man"]),
            woman_terms=tuple(raw["woman"]),
            neutral_terms=tuple(raw["neutral"]),
            anchors=anchors,
        )

    @classmethod
    def from_file(cls, path: str | Path) -> "GenderLexicon":
        try:
            raw = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot load lexicon {path}: {exc}") from exc
        if not isinstance(raw, dict):
            raise InputError(f"lexicon {path} must contain a JSON object")
        return cls.from_dict(raw)

    @classmethod
    def default(cls) -> "GenderLexicon":
        """The lexicon shipped with the package (data/default_lexicon.json)."""
        text = resources.files("biasaudit").joinpath("data/default_lexicon.json").read_text("utf-8")
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class CaptionRecord:
    """One caption with its provenance.

    mask_present is derived from the text; a text with more than one
    ``<MASK>`` occurrence is rejected.
    """

    id: str
    image_id: str
    text: str
    source: str  # "model" or "human"
    mask_present: bool = field(init=False)

    def __post_init__(self):
        if not self.id:
            raise InputError("caption record has an empty id")
        if not self.text:
            raise InputError(f"caption {self.id!r} has empty text")
        if self.source not in ("model", "human"):
            raise InputError(
                f"caption {self.id!r} has source {self.source!r}; "
                "expected 'model' or 'human'"
            )
        n = self.text.count(MASK_TOKEN)
        if n > 1:
            raise InputError(f"caption {self.id!r} contains {n} {MASK_TOKEN} slots; at most one is allowed")
        object.__setattr__(self, "mask_present", n == 1)


@dataclass(frozen=True)
class ContextObject:
    """One detected object: label, classifier confidence, classifier name."""

    label: str
    confidence: float
    classifier: str = ""

    def __post_init__(self):
        if not self.label:
            raise InputError("context object has an empty label")
        c = self.confidence
        if not isinstance(c, (int, float)) or not (0.0 <= float(c) <= 1.0):
            raise InputError(
                f"context object {self.label!r} has confidence {c!r}; "
                "expected a real in [0, 1]"
            )


@dataclass(frozen=True)
class VisualContext:
    """The detected objects attached to one image."""

    image_id: str
    objects: tuple[ContextObject, ...] = ()


def label_caption_gender(text: str, lexicon: GenderLexicon) -> GenderClass:
    """Classify *text* by scanning its tokens against the lexicon.

    Man if at least one man-term and no woman-term appears; Woman
    symmetrically; Mixed if both appear; Neutral otherwise. Matching is
    on whole lowercase tokens, so substrings never match.
    """
    if not text:
        raise InputError("cannot label empty caption text")
    tokens = set(tokenize(text))
    has_man = not tokens.isdisjoint(lexicon.terms(GenderClass.MAN))
    has_woman = not tokens.isdisjoint(lexicon.terms(GenderClass.WOMAN))
    if has_man and has_woman:
        return GenderClass.MIXED
    if has_man:
        return GenderClass.MAN
    if has_woman:
        return GenderClass.WOMAN
    return GenderClass.NEUTRAL


def fill_mask(record: CaptionRecord, cls: GenderClass, lexicon: GenderLexicon) -> str:
    """Substitute the record's ``<MASK>`` slot with the class's canonical term."""
    if not record.mask_present:
        raise InputError(f"caption {record.id!r} has no {MASK_TOKEN} slot to fill")
    if cls is GenderClass.MIXED:
        raise InputError("cannot fill a mask with the mixed class")
    return record.text.replace(MASK_TOKEN, lexicon.canonical_term(cls))


_VARIANT_SUFFIX = {
    GenderClass.MAN: "man",
    GenderClass.WOMAN: "woman",
    GenderClass.NEUTRAL: "person",
}


def variant_key(caption_id: str, cls: GenderClass) -> str:
    """Sidecar key of a gendered fill: ``<id>#man``, ``<id>#woman``, ``<id>#person``.

    The suffixes are fixed by the sidecar convention and do not follow
    a custom lexicon's terms.
    """
    try:
        return f"{caption_id}#{_VARIANT_SUFFIX[cls]}"
    except KeyError:
        raise InputError("the mixed class has no sidecar variant") from None
