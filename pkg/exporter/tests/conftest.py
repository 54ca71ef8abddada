"""Session fixtures: tiny locally-built models so no test touches the network.

The word-level vocabulary is harvested from the committed fixture corpus
(captions, masked captions, context labels) plus the lexicon fill words,
so the tiny tokenizer covers every text the exporters will see.
"""

import os

os.environ.setdefault("HF_HUB_OFFLINE", "1")
os.environ.setdefault("TRANSFORMERS_OFFLINE", "1")
os.environ.setdefault("HF_HUB_DISABLE_PROGRESS_BARS", "1")
os.environ.setdefault("TOKENIZERS_PARALLELISM", "false")

import json
from pathlib import Path

import pytest

FIXTURES = Path(__file__).resolve().parents[2] / "tests" / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def corpus_vocab() -> list[str]:
    words: set[str] = {"<MASK>", "a", "man", "woman", "person"}
    for name in ("captions.jsonl", "masked.jsonl"):
        for line in (FIXTURES / name).read_text(encoding="utf-8").splitlines():
            words.update(json.loads(line)["text"].split())
    for line in (FIXTURES / "contexts.jsonl").read_text(encoding="utf-8").splitlines():
        for obj in json.loads(line)["objects"]:
            words.update(obj["label"].split())
    lexicon = json.loads((FIXTURES / "lexicon.json").read_text(encoding="utf-8"))
    for cls in ("man", "woman", "neutral"):
        words.update(lexicon[cls])
        words.update(lexicon["anchors"][cls].split())
    return sorted(words)


def _fast_tokenizer(vocab_words):
    from tokenizers import Tokenizer
    from tokenizers.models import WordLevel
    from tokenizers.pre_tokenizers import WhitespaceSplit
    from transformers import PreTrainedTokenizerFast

    vocab = {"[UNK]": 0, "[BOS]": 1, "[PAD]": 2}
    for word in vocab_words:
        vocab.setdefault(word, len(vocab))
    tok = Tokenizer(WordLevel(vocab=vocab, unk_token="[UNK]"))
    tok.pre_tokenizer = WhitespaceSplit()
    return PreTrainedTokenizerFast(
        tokenizer_object=tok, unk_token="[UNK]", bos_token="[BOS]", pad_token="[PAD]"
    )


@pytest.fixture(scope="session")
def tiny_lm_dir(tmp_path_factory, corpus_vocab) -> Path:
    import torch
    from transformers import GPT2Config, GPT2LMHeadModel

    tokenizer = _fast_tokenizer(corpus_vocab)
    out = tmp_path_factory.mktemp("tiny-lm")
    torch.manual_seed(7)
    config = GPT2Config(
        vocab_size=len(tokenizer),
        n_positions=64,
        n_embd=32,
        n_layer=2,
        n_head=2,
        bos_token_id=tokenizer.bos_token_id,
        eos_token_id=tokenizer.bos_token_id,
        pad_token_id=tokenizer.pad_token_id,
    )
    model = GPT2LMHeadModel(config).eval()
    model.save_pretrained(out)
    tokenizer.save_pretrained(out)
    return out


@pytest.fixture(scope="session")
def tiny_encoder_dir(tmp_path_factory, corpus_vocab) -> Path:
    import torch
    from transformers import BertConfig, BertModel
    from sentence_transformers import SentenceTransformer

    try:
        from sentence_transformers.sentence_transformer.modules import Pooling, Transformer
    except ImportError:  # older sentence-transformers releases
        from sentence_transformers.models import Pooling, Transformer

    tokenizer = _fast_tokenizer(corpus_vocab)
    bert_dir = tmp_path_factory.mktemp("tiny-bert")
    torch.manual_seed(11)
    config = BertConfig(
        vocab_size=len(tokenizer),
        hidden_size=32,
        num_hidden_layers=2,
        num_attention_heads=2,
        intermediate_size=64,
        max_position_embeddings=64,
        pad_token_id=tokenizer.pad_token_id,
    )
    model = BertModel(config).eval()
    model.save_pretrained(bert_dir)
    tokenizer.save_pretrained(bert_dir)

    word = Transformer(str(bert_dir), max_seq_length=32)
    get_dim = getattr(word, "get_embedding_dimension", None) or word.get_word_embedding_dimension
    pooling = Pooling(get_dim(), pooling_mode="mean")
    encoder = SentenceTransformer(modules=[word, pooling], device="cpu")
    out = tmp_path_factory.mktemp("tiny-encoder")
    encoder.save(str(out))
    return out


def _write_jsonl(path: Path, records) -> Path:
    path.write_text(
        "".join(json.dumps(r, ensure_ascii=False) + "\n" for r in records),
        encoding="utf-8",
    )
    return path


@pytest.fixture
def write_jsonl():
    return _write_jsonl
