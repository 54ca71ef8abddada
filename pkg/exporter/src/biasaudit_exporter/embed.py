"""Sentence-embedding export: one vector per required sidecar key.

All texts are collected first and encoded in one pass with a fixed batch
size and canonical (sorted-key) order, so re-exporting identical input
yields a byte-identical file.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

from .contract import embedding_texts, load_lexicon, read_captions, read_context_labels
from .errors import ExportError
from .sidecar import write_sidecar

BATCH_SIZE = 32


def export_embeddings(
    captions_paths: Sequence[str | Path],
    contexts_path: str | Path,
    out_path: str | Path,
    *,
    lexicon_path: str | Path | None = None,
    model: str = "sentence-transformers/all-MiniLM-L6-v2",
    revision: str | None = None,
) -> Path:
    """Write the embedding sidecar covering captions, variants, anchors, labels."""
    lexicon = load_lexicon(lexicon_path)
    captions = []
    for path in captions_paths:
        captions.extend(read_captions(path))
    labels = read_context_labels(contexts_path)
    texts = embedding_texts(captions, lexicon, labels)
    if not texts:
        raise ExportError("no texts to embed")

    from sentence_transformers import SentenceTransformer

    try:
        encoder = SentenceTransformer(str(model), device="cpu")
    except Exception as exc:
        raise ExportError(f"cannot load sentence encoder {model!r}: {exc}") from None

    keys = sorted(texts)
    vectors = encoder.encode(
        [texts[key] for key in keys],
        batch_size=BATCH_SIZE,
        convert_to_numpy=True,
        normalize_embeddings=False,
        show_progress_bar=False,
    )
    if vectors.ndim != 2 or vectors.shape[0] != len(keys):
        raise ExportError(
            f"encoder returned shape {vectors.shape!r} for {len(keys)} texts"
        )
    dim = int(vectors.shape[1])

    records = [
        {"key": key, "vector": [float(component) for component in row]}
        for key, row in zip(keys, vectors)
    ]
    local = Path(model).exists()
    manifest = {
        "model": str(model),
        "revision": revision if revision is not None else ("local" if local else "main"),
        "dim": dim,
    }
    return write_sidecar(out_path, manifest, records)
