"""Token-probability export with a causal language model.

Each text is scored conditionally: a BOS token is prepended so the first
real token has a probability too, logits are computed in one forward
pass, and each token's log-probability is read from a float64
log-softmax. ``mean_token_prob`` is the arithmetic mean of the per-token
probabilities (fsum over exp of the emitted logprobs), so the file is
internally consistent to the last bit.
"""

from __future__ import annotations

import math
from pathlib import Path
from typing import Sequence

from .contract import lm_texts, load_lexicon, read_captions
from .errors import ExportError
from .sidecar import write_sidecar


def export_lm_probs(
    captions_paths: Sequence[str | Path],
    out_path: str | Path,
    *,
    lexicon_path: str | Path | None = None,
    model: str = "gpt2",
    revision: str | None = None,
) -> Path:
    """Write the LM sidecar for every caption and filled variant."""
    lexicon = load_lexicon(lexicon_path)
    captions = []
    for path in captions_paths:
        captions.extend(read_captions(path))
    texts = lm_texts(captions, lexicon)
    if not texts:
        raise ExportError("no captions to score")

    import torch
    from transformers import AutoModelForCausalLM, AutoTokenizer

    local = Path(model).exists()
    load_kwargs = {} if local or revision is None else {"revision": revision}
    try:
        tokenizer = AutoTokenizer.from_pretrained(model, **load_kwargs)
        lm = AutoModelForCausalLM.from_pretrained(model, **load_kwargs)
    except Exception as exc:
        raise ExportError(f"cannot load language model {model!r}: {exc}") from None
    lm.eval()

    bos_id = tokenizer.bos_token_id
    if bos_id is None:
        bos_id = tokenizer.eos_token_id
    if bos_id is None:
        raise ExportError(
            f"model {model!r} declares neither a BOS nor an EOS token; "
            "the first token of each text cannot be conditioned"
        )

    records = []
    with torch.no_grad():
        for key in sorted(texts):
            token_ids = tokenizer.encode(texts[key], add_special_tokens=False)
            if not token_ids:
                raise ExportError(f"text for key {key!r} produced no tokens")
            inputs = torch.tensor([[bos_id] + token_ids], dtype=torch.long)
            logits = lm(inputs).logits[0].double()
            logprobs = torch.log_softmax(logits, dim=-1)
            token_lps = [
                min(float(logprobs[pos, tok]), 0.0) for pos, tok in enumerate(token_ids)
            ]
            mean = math.fsum(math.exp(lp) for lp in token_lps) / len(token_lps)
            records.append(
                {"key": key, "mean_token_prob": mean, "token_logprobs": token_lps}
            )

    manifest = {
        "model": str(model),
        "revision": revision if revision is not None else ("local" if local else "main"),
        "dim": None,
    }
    return write_sidecar(out_path, manifest, records)
