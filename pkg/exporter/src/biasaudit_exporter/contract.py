"""The sidecar file contract: which keys must exist and what text backs each.

This mirrors the audit toolkit's file formats without importing it — the
two packages share only the files. Keys are: every caption id (bare),
``<id>#man`` / ``<id>#woman`` / ``<id>#person`` for each masked caption's
filled variants (suffixes are fixed; the lexicon changes only the fill
words), each lexicon anchor phrase keyed by the phrase itself, and each
distinct context object label keyed by the label.
"""

from __future__ import annotations

import json
from pathlib import Path

from .errors import ExportError

MASK_TOKEN = "<MASK>"
FILL_SUFFIXES = ("man", "woman", "person")
SOURCES = ("model", "human")

DEFAULT_LEXICON = {
    "man": ["man", "men", "boy", "boys", "guy", "guys", "gentleman", "male"],
    "woman": ["woman", "women", "girl", "girls", "lady", "ladies", "female"],
    "neutral": ["person", "people", "human", "player", "child", "kid"],
    "anchors": {"man": "a man", "woman": "a woman", "neutral": "a person"},
}

# fill suffix -> lexicon class whose canonical (first) term fills the mask
_SUFFIX_CLASS = {"man": "man", "woman": "woman", "person": "neutral"}


def variant_key(caption_id: str, suffix: str) -> str:
    """Sidecar key of one filled variant of a masked caption."""
    if suffix not in FILL_SUFFIXES:
        raise ExportError(f"unknown variant suffix {suffix!r}; expected one of {FILL_SUFFIXES}")
    return f"{caption_id}#{suffix}"


def load_lexicon(path: str | Path | None) -> dict:
    """Load a lexicon JSON file, or the built-in default when *path* is None."""
    if path is None:
        return json.loads(json.dumps(DEFAULT_LEXICON))
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ExportError(f"cannot read lexicon {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ExportError(f"{path}: not valid JSON: {exc}") from None
    for cls in ("man", "woman", "neutral"):
        terms = data.get(cls)
        if not isinstance(terms, list) or not terms or not all(
            isinstance(t, str) and t for t in terms
        ):
            raise ExportError(f"{path}: lexicon class {cls!r} needs a non-empty list of terms")
    anchors = data.get("anchors")
    if not isinstance(anchors, dict) or any(
        not isinstance(anchors.get(cls), str) or not anchors.get(cls)
        for cls in ("man", "woman", "neutral")
    ):
        raise ExportError(f"{path}: lexicon needs an anchor phrase for man, woman, and neutral")
    return data


def read_captions(path: str | Path) -> list[dict]:
    """Read one captions JSONL file; schema errors name the offending line."""
    path = Path(path)
    records: list[dict] = []
    seen: set[str] = set()
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise ExportError(f"cannot read captions {path}: {exc}") from None
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ExportError(f"{path}:{lineno}: not valid JSON: {exc}") from None
        if not isinstance(record, dict):
            raise ExportError(f"{path}:{lineno}: expected an object record")
        cid = record.get("id")
        text = record.get("text")
        image_id = record.get("image_id")
        source = record.get("source")
        if not isinstance(cid, str) or not cid:
            raise ExportError(f"{path}:{lineno}: caption record needs a non-empty string 'id'")
        if cid in seen:
            raise ExportError(f"{path}:{lineno}: duplicate caption id {cid!r}")
        if not isinstance(image_id, str) or not image_id:
            raise ExportError(f"{path}:{lineno}: caption {cid!r} needs a non-empty 'image_id'")
        if not isinstance(text, str) or not text:
            raise ExportError(f"{path}:{lineno}: caption {cid!r} needs non-empty 'text'")
        if source not in SOURCES:
            raise ExportError(
                f"{path}:{lineno}: caption {cid!r} has source {source!r}; expected one of {SOURCES}"
            )
        masks = text.count(MASK_TOKEN)
        if masks > 1:
            raise ExportError(
                f"{path}:{lineno}: caption {cid!r} contains {masks} {MASK_TOKEN} slots; at most one"
            )
        seen.add(cid)
        records.append({"id": cid, "text": text, "masked": masks == 1})
    return records


def read_context_labels(path: str | Path) -> list[str]:
    """Distinct object labels from a visual-context JSONL file, sorted."""
    path = Path(path)
    labels: set[str] = set()
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise ExportError(f"cannot read contexts {path}: {exc}") from None
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ExportError(f"{path}:{lineno}: not valid JSON: {exc}") from None
        objects = record.get("objects") if isinstance(record, dict) else None
        if not isinstance(objects, list):
            raise ExportError(f"{path}:{lineno}: context record needs an 'objects' list")
        for obj in objects:
            label = obj.get("label") if isinstance(obj, dict) else None
            if not isinstance(label, str) or not label:
                raise ExportError(f"{path}:{lineno}: context object needs a non-empty 'label'")
            labels.add(label)
    return sorted(labels)


def _fills(lexicon: dict) -> dict[str, str]:
    return {suffix: lexicon[cls][0] for suffix, cls in _SUFFIX_CLASS.items()}


def lm_texts(captions: list[dict], lexicon: dict) -> dict[str, str]:
    """key -> text for the language-model sidecar: captions plus filled variants."""
    fills = _fills(lexicon)
    texts: dict[str, str] = {}
    for record in captions:
        _add(texts, record["id"], record["text"])
        if record["masked"]:
            for suffix in FILL_SUFFIXES:
                filled = record["text"].replace(MASK_TOKEN, fills[suffix])
                _add(texts, variant_key(record["id"], suffix), filled)
    return texts


def embedding_texts(captions: list[dict], lexicon: dict, labels: list[str]) -> dict[str, str]:
    """key -> text for the embedding sidecar: lm_texts plus anchors and labels."""
    texts = lm_texts(captions, lexicon)
    for cls in ("man", "woman", "neutral"):
        phrase = lexicon["anchors"][cls]
        _add(texts, phrase, phrase)
    for label in labels:
        _add(texts, label, label)
    return texts


def _add(texts: dict[str, str], key: str, text: str) -> None:
    if key in texts and texts[key] != text:
        raise ExportError(
            f"key {key!r} maps to two different texts ({texts[key]!r} vs {text!r}); "
            "rename the caption id so keys stay unambiguous"
        )
    texts[key] = text
