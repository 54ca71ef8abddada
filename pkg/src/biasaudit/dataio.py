"""Dataset file I/O, canonical serialization, and the worker pool.

All writers emit UTF-8 with LF newlines and a stable field order, so a
repeated run over the same inputs produces byte-identical files. Output
files never embed absolute paths or timestamps.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from decimal import ROUND_DOWN, Decimal
from pathlib import Path

from .core import CaptionRecord, ContextObject, VisualContext
from .errors import InputError, ParseError
from .vectors import iter_jsonl

THREADS_ENV = "BIASAUDIT_THREADS"


def load_captions(path: str | Path) -> list[CaptionRecord]:
    """Read a captions JSONL file; records keep file order."""
    records: list[CaptionRecord] = []
    seen: set[str] = set()
    for lineno, raw in iter_jsonl(path):
        for field in ("id", "image_id", "text", "source"):
            if field not in raw:
                raise ParseError(f"{path}:{lineno}: caption record lacks {field!r}")
        try:
            rec = CaptionRecord(
                id=str(raw["id"]),
                image_id=str(raw["image_id"]),
                text=str(raw["text"]),
                source=str(raw["source"]),
            )
        except InputError as exc:
            raise ParseError(f"{path}:{lineno}: {exc}") from exc
        if rec.id in seen:
            raise ParseError(f"{path}:{lineno}: duplicate caption id {rec.id!r}")
        seen.add(rec.id)
        records.append(rec)
    return records


def load_contexts(path: str | Path) -> dict[str, VisualContext]:
    """Read a visual-context JSONL file keyed by image id."""
    contexts: dict[str, VisualContext] = {}
    for lineno, raw in iter_jsonl(path):
        image_id = raw.get("image_id")
        if not isinstance(image_id, str) or not image_id:
            raise ParseError(f"{path}:{lineno}: context record lacks a string 'image_id'")
        if image_id in contexts:
            raise ParseError(f"{path}:{lineno}: duplicate image id {image_id!r}")
        objects_raw = raw.get("objects")
        if not isinstance(objects_raw, list):
            raise ParseError(f"{path}:{lineno}: context record lacks an 'objects' list")
        objects = []
        for obj in objects_raw:
            if not isinstance(obj, dict) or "label" not in obj or "confidence" not in obj:
                raise ParseError(
                    f"{path}:{lineno}: objects need 'label' and 'confidence' fields"
                )
            try:
                objects.append(
                    ContextObject(
                        label=str(obj["label"]),
                        confidence=float(obj["confidence"]),
                        classifier=str(obj.get("classifier", "")),
                    )
                )
            except (InputError, TypeError, ValueError) as exc:
                raise ParseError(f"{path}:{lineno}: {exc}") from exc
        contexts[image_id] = VisualContext(image_id=image_id, objects=tuple(objects))
    return contexts


def write_contexts(contexts: dict[str, VisualContext], path: str | Path) -> None:
    """Write contexts in the same schema load_contexts reads, sorted by image id."""
    rows = []
    for image_id in sorted(contexts):
        ctx = contexts[image_id]
        rows.append(
            {
                "image_id": image_id,
                "objects": [
                    {"label": o.label, "confidence": o.confidence, "classifier": o.classifier}
                    for o in ctx.objects
                ],
            }
        )
    dump_jsonl(rows, path)


def dump_jsonl(rows, path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8", newline="\n") as fh:
        for row in rows:
            fh.write(json.dumps(row, ensure_ascii=False, separators=(",", ":")))
            fh.write("\n")


def dump_json(obj, path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8", newline="\n") as fh:
        json.dump(obj, fh, ensure_ascii=False, indent=2)
        fh.write("\n")


def fmt2(value) -> str:
    """Format a real for CSV cells: two decimals, truncated toward zero.

    Published audit tables truncate rather than round (0.7395 prints as
    0.73), so the CSV writers do the same. None becomes an empty cell,
    ints stay ints.
    """
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, int):
        return str(value)
    v = float(value)
    if not math.isfinite(v):
        raise InputError(f"cannot format non-finite value {v!r}")
    return str(Decimal(repr(v)).quantize(Decimal("0.01"), rounding=ROUND_DOWN))


def worker_count() -> int:
    """Worker cap from the BIASAUDIT_THREADS environment variable."""
    raw = os.environ.get(THREADS_ENV)
    if raw is None or not raw.strip():
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise InputError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise InputError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return n


def parallel_map(fn, items):
    """Order-preserving map over *items*, threaded when workers > 1.

    Results arrive in input order regardless of scheduling, so callers
    stay deterministic. fn must not raise for per-item failures the
    caller wants to collect; wrap and return them instead.
    """
    items = list(items)
    n = worker_count()
    if n <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))
