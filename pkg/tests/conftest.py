"""Shared fixtures: the committed corpus, loaded once per session."""

from __future__ import annotations

import json
from pathlib import Path

import pytest

from biasaudit import (
    GenderLexicon,
    filter_context,
    load_captions,
    load_contexts,
    load_lm_sidecar,
    load_sidecar_vectors,
    load_word_vectors,
)

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def lexicon() -> GenderLexicon:
    return GenderLexicon.from_file(FIXTURES / "lexicon.json")


@pytest.fixture(scope="session")
def lexicon_dict() -> dict:
    return json.loads((FIXTURES / "lexicon.json").read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def captions():
    return load_captions(FIXTURES / "captions.jsonl")


@pytest.fixture(scope="session")
def masked():
    return load_captions(FIXTURES / "masked.jsonl")


@pytest.fixture(scope="session")
def contexts_raw():
    return load_contexts(FIXTURES / "contexts.jsonl")


@pytest.fixture(scope="session")
def word_store():
    return load_word_vectors(FIXTURES / "word_vectors.txt")


@pytest.fixture(scope="session")
def emb_store():
    return load_sidecar_vectors(FIXTURES / "embeddings.jsonl")


@pytest.fixture(scope="session")
def lm_store():
    return load_lm_sidecar(FIXTURES / "lm.jsonl")


@pytest.fixture(scope="session")
def contexts(contexts_raw, word_store, lexicon):
    """Raw contexts passed through the standard filter."""
    return {
        image_id: filter_context(
            ctx.objects, word_store, lexicon=lexicon, image_id=image_id
        )
        for image_id, ctx in contexts_raw.items()
    }


@pytest.fixture(scope="session")
def pipeline_run(tmp_path_factory):
    """One full CLI pipeline run over the committed corpus."""
    from pipeline import run_pipeline

    return run_pipeline(tmp_path_factory.mktemp("run"))
