"""Embedding storage, vector-file parsing, and cosine similarity.

Two on-disk formats feed the same in-memory store:

* whitespace-separated word vectors, one ``token v1 ... vd`` per line,
  dimensionality fixed by the first line;
* JSONL sidecars of ``{"key": ..., "vector": [...]}`` records, optionally
  led by a ``{"_manifest": {...}}`` header line describing the producer.

Lookups never impute a vector: a missing key is reported to the caller,
who decides between skip-and-count and hard error.
"""

from __future__ import annotations

import json
import logging
from pathlib import Path

import numpy as np

from .core import tokenize
from .errors import InputError, ParseError

log = logging.getLogger(__name__)


class EmbeddingStore:
    """Immutable key to vector lookup with a single dimensionality."""

    __slots__ = ("dim", "manifest", "_entries")

    def __init__(self, entries: dict[str, np.ndarray], manifest: dict | None = None):
        if not entries:
            raise InputError("embedding store needs at least one entry")
        self._entries: dict[str, np.ndarray] = {}
        self.dim = -1
        self.manifest = manifest
        for key, raw in entries.items():
            vec = np.asarray(raw, dtype=np.float64)
            if vec.ndim != 1:
                raise InputError(f"vector for {key!r} is not one-dimensional")
            if self.dim < 0:
                self.dim = int(vec.shape[0])
            if vec.shape[0] != self.dim:
                raise InputError(
                    f"vector for {key!r} has dim {vec.shape[0]}, expected {self.dim}"
                )
            if not np.all(np.isfinite(vec)):
                raise InputError(f"vector for {key!r} has non-finite components")
            vec = vec.copy()
            vec.flags.writeable = False
            self._entries[key] = vec

    def get(self, key: str) -> np.ndarray | None:
        return self._entries.get(key)

    def __contains__(self, key: str) -> bool:
        return key in self._entries

    def __len__(self) -> int:
        return len(self._entries)

    def keys(self):
        return self._entries.keys()


def load_word_vectors(path: str | Path) -> EmbeddingStore:
    """Parse a text word-vector file into an EmbeddingStore.

    The first line fixes the dimensionality. A line with a deviating
    component count, a non-numeric or non-finite component, or an empty
    file raises ParseError naming the offending line. Duplicate tokens
    keep the first occurrence and log a warning.
    """
    path = Path(path)
    entries: dict[str, np.ndarray] = {}
    dim = -1
    try:
        fh = path.open(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot open word vectors {path}: {exc}") from exc
    with fh:
        for lineno, line in enumerate(fh, start=1):
            parts = line.split()
            if not parts:
                continue
            token, comps = parts[0], parts[1:]
            if dim < 0:
                if not comps:
                    raise ParseError(f"{path}:{lineno}: no vector components on first line")
                dim = len(comps)
            if len(comps) != dim:
                raise ParseError(
                    f"{path}:{lineno}: expected {dim} components, found {len(comps)}"
                )
            try:
                vec = np.array([float(c) for c in comps], dtype=np.float64)
            except ValueError:
                raise ParseError(f"{path}:{lineno}: non-numeric vector component") from None
            if not np.all(np.isfinite(vec)):
                raise ParseError(f"{path}:{lineno}: non-finite vector component")
            if token in entries:
                log.warning("duplicate token %r at %s:%d; keeping the first occurrence",
                            token, path, lineno)
                continue
            entries[token] = vec
    if not entries:
        raise ParseError(f"{path}: empty word-vector file")
    return EmbeddingStore(entries)


def iter_jsonl(path: str | Path):
    """Yield (lineno, record) for each non-blank line of a JSONL file."""
    path = Path(path)
    try:
        fh = path.open(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot open {path}: {exc}") from exc
    with fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"{path}:{lineno}: invalid JSON: {exc.msg}") from exc
            if not isinstance(record, dict):
                raise ParseError(f"{path}:{lineno}: expected a JSON object")
            yield lineno, record


def load_sidecar_vectors(path: str | Path) -> EmbeddingStore:
    """Parse a JSONL embedding sidecar into an EmbeddingStore.

    Records are ``{"key": str, "vector": [real, ...]}``. A leading
    ``{"_manifest": ...}`` record is kept on the store instead of being
    treated as an entry. Duplicate keys, non-finite components, and
    dimensionality drift are ParseErrors.
    """
    path = Path(path)
    entries: dict[str, np.ndarray] = {}
    manifest = None
    dim = -1
    for lineno, record in iter_jsonl(path):
        if "_manifest" in record:
            if manifest is not None:
                raise ParseError(f"{path}:{lineno}: repeated _manifest record")
            manifest = record["_manifest"]
            continue
        key = record.get("key")
        vector = record.get("vector")
        if not isinstance(key, str) or not key:
            raise ParseError(f"{path}:{lineno}: record without a string 'key'")
        if not isinstance(vector, list) or not vector:
            raise ParseError(f"{path}:{lineno}: key {key!r} without a non-empty 'vector'")
        try:
            vec = np.array([float(v) for v in vector], dtype=np.float64)
        except (TypeError, ValueError):
            raise ParseError(f"{path}:{lineno}: key {key!r} has a non-numeric component") from None
        if dim < 0:
            dim = vec.shape[0]
        if vec.shape[0] != dim:
            raise ParseError(
                f"{path}:{lineno}: key {key!r} has dim {vec.shape[0]}, expected {dim}"
            )
        if not np.all(np.isfinite(vec)):
            raise ParseError(f"{path}:{lineno}: key {key!r} has a non-finite component")
        if key in entries:
            raise ParseError(f"{path}:{lineno}: duplicate key {key!r}")
        entries[key] = vec
    if not entries:
        raise ParseError(f"{path}: sidecar holds no vector records")
    return EmbeddingStore(entries, manifest=manifest)


def cosine(a, b) -> float:
    """Cosine similarity in double precision, clamped to [-1, 1].

    Raises InputError on length mismatch or a zero-norm operand.
    """
    va = np.asarray(a, dtype=np.float64)
    vb = np.asarray(b, dtype=np.float64)
    if va.shape != vb.shape:
        raise InputError(f"cosine on vectors of different length: {va.shape[0]} vs {vb.shape[0]}")
    na = float(np.linalg.norm(va))
    nb = float(np.linalg.norm(vb))
    if na == 0.0 or nb == 0.0:
        raise InputError("cosine is undefined for a zero vector")
    value = float(np.dot(va, vb)) / (na * nb)
    return min(1.0, max(-1.0, value))


def phrase_vector(label: str, store: EmbeddingStore) -> np.ndarray | None:
    """Vector for a possibly multi-word label from a word-vector store.

    An exact key wins; otherwise the mean of the in-vocabulary token
    vectors is used. Returns None when nothing is in vocabulary.
    """
    exact = store.get(label)
    if exact is not None:
        return exact
    hits = [store.get(tok) for tok in tokenize(label)]
    hits = [h for h in hits if h is not None]
    if not hits:
        return None
    return np.mean(np.stack(hits), axis=0)
