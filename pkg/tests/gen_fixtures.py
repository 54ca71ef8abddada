#!/usr/bin/env python3
"""Regenerate the committed fixtures under tests/fixtures/.

Deterministic by seed; run manually when the fixture design changes and
commit the outputs. Tests read the committed files, never this script.

The corpus is synthetic: 50 images with one model and one human caption
each, 40 masked estimation records, raw detection contexts (including
below-threshold, person-labeled, near-duplicate, and overflow
candidates so the filter has work to do), word vectors, an embedding
sidecar, a language-model sidecar, and a keyword-tagged text corpus.

Three masked records are engineered so the full scoring pipeline lands
on fixed reference scores: e000 (paddle context) scores 0.33/0.30 and
resolves Man, e001 (tennis ball) ties at 0.45 and resolves Neutral,
e002 (umbrella) scores 0.12/0.13 and resolves Woman. The engineering
solves for the hypothesis probability that the revision math maps onto
the target score given the committed vectors.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

OUT = Path(__file__).parent / "fixtures"
SEED = 20240811
WORD_DIM = 16
EMB_DIM = 12

MAN_TEMPLATES = [
    "a man riding a {obj}",
    "two men standing near a {obj}",
    "a boy playing with a {obj}",
    "a guy holding a {obj}",
]
WOMAN_TEMPLATES = [
    "a woman riding a {obj}",
    "two women sitting by a {obj}",
    "a girl playing with a {obj}",
    "a lady holding a {obj}",
]
NEUTRAL_TEMPLATES = [
    "a person walking past a {obj}",
    "a child looking at a {obj}",
    "people gathered around a {obj}",
]
MIXED_TEMPLATE = "a man and a woman sharing a {obj}"

GENDER_TERMS = [
    "man", "men", "boy", "boys", "guy", "guys", "gentleman", "male",
    "woman", "women", "girl", "girls", "lady", "ladies", "female",
    "person", "people", "human", "player", "child", "kid",
]

# Labels that appear in context files. "person" only ever appears as a
# distractor the filter must drop.
MAIN_OBJECTS = [
    "skateboard", "surfboard", "kitchen", "umbrella", "motorcycle",
    "dog", "frisbee", "laptop", "pizza", "bench", "horse", "bicycle",
    "racket", "snowboard", "oven", "boat", "kite", "paddle",
    "tennis ball", "handbag", "wine glass", "couch", "guitar", "truck",
]
EXTRA_LABELS = ["motorbike", "person"]

TWEET_KEYWORDS = [
    "coffee", "makeup", "football", "novel", "garden",
    "gaming", "cooking", "travel", "music",
]

MASK_ACTIONS = ["riding", "holding", "watching", "carrying", "cleaning"]


def unit(rng, dim):
    v = rng.normal(size=dim)
    return v / np.linalg.norm(v)


def rounded(vec, places=6):
    return [round(float(x), places) for x in vec]


def cos(a, b):
    va = np.asarray(a, dtype=np.float64)
    vb = np.asarray(b, dtype=np.float64)
    value = float(np.dot(va, vb)) / (
        float(np.linalg.norm(va)) * float(np.linalg.norm(vb))
    )
    return min(1.0, max(-1.0, value))


def build_word_vectors(rng):
    """Unit vectors with controlled pairwise cosines.

    Random tokens stay below 0.7 against everything accepted before
    them; motorbike is planted next to motorcycle so duplicate voting
    has a true positive.
    """
    tokens = list(GENDER_TERMS)
    for label in MAIN_OBJECTS:
        for tok in label.split():
            if tok not in tokens:
                tokens.append(tok)
    vectors: dict[str, list[float]] = {}
    for token in tokens:
        while True:
            cand = rounded(unit(rng, WORD_DIM))
            if all(abs(cos(cand, v)) < 0.7 for v in vectors.values()):
                vectors[token] = cand
                break
    twin = np.asarray(vectors["motorcycle"]) + 0.05 * rng.normal(size=WORD_DIM)
    vectors["motorbike"] = rounded(twin / np.linalg.norm(twin))
    assert cos(vectors["motorbike"], vectors["motorcycle"]) > 0.95
    return vectors


def build_captions(rng):
    model_rows, human_rows = [], []
    for i in range(50):
        obj = MAIN_OBJECTS[i % len(MAIN_OBJECTS)]
        image_id = f"img{i:03d}"
        r = i % 10
        if r < 4:
            text = MAN_TEMPLATES[i % len(MAN_TEMPLATES)].format(obj=obj)
        elif r < 7:
            text = WOMAN_TEMPLATES[i % len(WOMAN_TEMPLATES)].format(obj=obj)
        elif r < 9:
            text = NEUTRAL_TEMPLATES[i % len(NEUTRAL_TEMPLATES)].format(obj=obj)
        else:
            text = MIXED_TEMPLATE.format(obj=obj)
        model_rows.append(
            {"id": f"c{i:03d}", "image_id": image_id, "text": text, "source": "model"}
        )
        if r < 3:
            text = MAN_TEMPLATES[(i + 1) % len(MAN_TEMPLATES)].format(obj=obj)
        elif r < 7:
            text = WOMAN_TEMPLATES[(i + 2) % len(WOMAN_TEMPLATES)].format(obj=obj)
        elif r < 9:
            text = NEUTRAL_TEMPLATES[(i + 1) % len(NEUTRAL_TEMPLATES)].format(obj=obj)
        else:
            text = MIXED_TEMPLATE.format(obj=obj)
        human_rows.append(
            {"id": f"h{i:03d}", "image_id": image_id, "text": text, "source": "human"}
        )
    return model_rows + human_rows


def build_masked(rng):
    rows = [
        {
            "id": "e000",
            "image_id": "mimg000",
            "text": "a <MASK> riding a wave on top of a surfboard",
            "source": "model",
        },
        {
            "id": "e001",
            "image_id": "mimg001",
            "text": "a <MASK> hitting a tennis ball on a tennis court",
            "source": "model",
        },
        {
            "id": "e002",
            "image_id": "mimg002",
            "text": "a <MASK> holding an umbrella in the rain",
            "source": "model",
        },
    ]
    for i in range(3, 40):
        obj = MAIN_OBJECTS[(i * 3) % len(MAIN_OBJECTS)]
        action = MASK_ACTIONS[i % len(MASK_ACTIONS)]
        rows.append(
            {
                "id": f"e{i:03d}",
                "image_id": f"mimg{i:03d}",
                "text": f"a <MASK> {action} a {obj}",
                "source": "model",
            }
        )
    return rows


def build_contexts(rng, captions, masked):
    contexts = []
    for i in range(50):
        image_id = f"img{i:03d}"
        obj = MAIN_OBJECTS[i % len(MAIN_OBJECTS)]
        objects = [
            {
                "label": obj,
                "confidence": round(float(rng.uniform(0.45, 0.95)), 4),
                "classifier": "frcnn",
            }
        ]
        if i % 4 == 0 and obj != "motorcycle":
            objects.append(
                {
                    "label": MAIN_OBJECTS[(i + 5) % len(MAIN_OBJECTS)],
                    "confidence": round(float(rng.uniform(0.3, 0.44)), 4),
                    "classifier": "yolo",
                }
            )
        if obj == "motorcycle":
            # near-duplicate from a second classifier; voting absorbs it
            objects.append(
                {
                    "label": "motorbike",
                    "confidence": round(float(rng.uniform(0.3, 0.44)), 4),
                    "classifier": "yolo",
                }
            )
        if i % 5 == 0:
            objects.append(
                {
                    "label": "person",
                    "confidence": round(float(rng.uniform(0.8, 0.99)), 4),
                    "classifier": "frcnn",
                }
            )
        if i % 7 == 0:
            objects.append(
                {
                    "label": MAIN_OBJECTS[(i + 11) % len(MAIN_OBJECTS)],
                    "confidence": round(float(rng.uniform(0.02, 0.19)), 4),
                    "classifier": "detr",
                }
            )
        if i % 6 == 0:
            for off in (7, 13, 17):
                objects.append(
                    {
                        "label": MAIN_OBJECTS[(i + off) % len(MAIN_OBJECTS)],
                        "confidence": round(float(rng.uniform(0.25, 0.4)), 4),
                        "classifier": "detr",
                    }
                )
        contexts.append({"image_id": image_id, "objects": objects})

    contexts.append(
        {
            "image_id": "mimg000",
            "objects": [
                {"label": "paddle", "confidence": 0.8, "classifier": "frcnn"},
                {"label": "person", "confidence": 0.97, "classifier": "frcnn"},
            ],
        }
    )
    contexts.append(
        {
            "image_id": "mimg001",
            "objects": [
                {"label": "tennis ball", "confidence": 0.9, "classifier": "frcnn"}
            ],
        }
    )
    contexts.append(
        {
            "image_id": "mimg002",
            "objects": [
                {"label": "umbrella", "confidence": 0.85, "classifier": "yolo"}
            ],
        }
    )
    for i in range(3, 40):
        image_id = f"mimg{i:03d}"
        objects = [
            {
                "label": MAIN_OBJECTS[(i * 3) % len(MAIN_OBJECTS)],
                "confidence": round(float(rng.uniform(0.35, 0.95)), 4),
                "classifier": "frcnn",
            }
        ]
        if i % 3 == 0:
            objects.append(
                {
                    "label": MAIN_OBJECTS[(i * 3 + 9) % len(MAIN_OBJECTS)],
                    "confidence": round(float(rng.uniform(0.25, 0.6)), 4),
                    "classifier": "yolo",
                }
            )
        contexts.append({"image_id": image_id, "objects": objects})
    return contexts


def distinct_labels(contexts):
    labels = set()
    for ctx in contexts:
        labels.update(o["label"] for o in ctx["objects"])
    return sorted(labels)


def orthonormal_pair(rng, dim):
    p = unit(rng, dim)
    q = rng.normal(size=dim)
    q = q - np.dot(q, p) * p
    q = q / np.linalg.norm(q)
    return p, q


def alpha_of(sim, conf):
    s = min(1.0, max(0.0, sim))
    c = min(1.0, max(0.0, conf))
    if 1.0 - c == 0.0:
        return 1.0
    base = (1.0 - s) / (1.0 + s)
    if base == 0.0:
        return 0.0
    return base ** (1.0 - c)


def solve_hypothesis(target, sim, conf):
    """Hypothesis probability whose revision by (sim, conf) hits target."""
    a = alpha_of(sim, conf)
    p = math.exp(math.log(target) / a)
    assert 0.0 < p <= 1.0
    return p


def build_sidecars(rng, captions, masked, contexts, tweets):
    emb: dict[str, list[float]] = {}
    lm: dict[str, dict] = {}

    labels = distinct_labels(contexts)
    for label in labels:
        emb[label] = rounded(unit(rng, EMB_DIM))
    for phrase in ("a man", "a woman", "a person"):
        emb[phrase] = rounded(unit(rng, EMB_DIM))

    form = 0
    for row in captions:
        emb[row["id"]] = rounded(unit(rng, EMB_DIM))
        lm[row["id"]] = lm_record(rng, form)
        form += 1

    engineered = {
        # id -> (label, confidence, sim_man, sim_woman, target_man, target_woman)
        "e000": ("paddle", 0.8, 0.60, 0.55, 0.33, 0.30),
        "e002": ("umbrella", 0.85, 0.35, 0.30, 0.12, 0.13),
    }
    for row in masked:
        rid = row["id"]
        if rid == "e001":
            # identical variant vectors and probabilities: an exact tie
            shared = rounded(unit(rng, EMB_DIM))
            emb[f"{rid}#man"] = list(shared)
            emb[f"{rid}#woman"] = list(shared)
            emb[f"{rid}#person"] = rounded(unit(rng, EMB_DIM))
            sim = cos(shared, emb["tennis ball"])
            p = solve_hypothesis(0.45, max(0.0, sim), 0.9)
            lm[f"{rid}#man"] = {"mean_token_prob": p}
            lm[f"{rid}#woman"] = {"mean_token_prob": p}
            lm[f"{rid}#person"] = lm_record(rng, 0)
        elif rid in engineered:
            label, conf, sim_m, sim_w, target_m, target_w = engineered[rid]
            anchor = np.asarray(emb[label], dtype=np.float64)
            anchor = anchor / np.linalg.norm(anchor)
            spare = rng.normal(size=EMB_DIM)
            spare = spare - np.dot(spare, anchor) * anchor
            spare = spare / np.linalg.norm(spare)
            for cls, sim_target, score_target in (
                ("man", sim_m, target_m),
                ("woman", sim_w, target_w),
            ):
                vec = rounded(
                    sim_target * anchor + math.sqrt(1.0 - sim_target**2) * spare
                )
                emb[f"{rid}#{cls}"] = vec
                sim_actual = max(0.0, cos(vec, emb[label]))
                lm[f"{rid}#{cls}"] = {
                    "mean_token_prob": solve_hypothesis(score_target, sim_actual, conf)
                }
            emb[f"{rid}#person"] = rounded(unit(rng, EMB_DIM))
            lm[f"{rid}#person"] = lm_record(rng, 1)
        else:
            for cls in ("man", "woman", "person"):
                emb[f"{rid}#{cls}"] = rounded(unit(rng, EMB_DIM))
                lm[f"{rid}#{cls}"] = lm_record(rng, form)
                form += 1

    for row in tweets:
        for cls in ("man", "woman"):
            key = f"{row['id']}#{cls}"
            emb[key] = rounded(unit(rng, EMB_DIM))
            lm[key] = lm_record(rng, form)
            form += 1
    for keyword in TWEET_KEYWORDS:
        if keyword not in emb:
            emb[keyword] = rounded(unit(rng, EMB_DIM))

    return emb, lm


def lm_record(rng, form):
    """Rotate through the three accepted record shapes."""
    k = int(rng.integers(3, 9))
    logprobs = [round(float(x), 6) for x in rng.uniform(-4.0, -0.2, size=k)]
    mean = math.fsum(math.exp(lp) for lp in logprobs) / len(logprobs)
    shape = form % 3
    if shape == 0:
        return {"mean_token_prob": round(float(rng.uniform(0.05, 0.6)), 6)}
    if shape == 1:
        return {"token_logprobs": logprobs}
    return {"mean_token_prob": mean, "token_logprobs": logprobs}


def build_tweets(rng):
    texts = [
        "need my morning coffee before anything else",
        "trying a new makeup look tonight",
        "watched the football match with friends",
        "halfway through a mystery novel",
        "spent the afternoon in the garden",
        "late night gaming session again",
        "cooking dinner for the whole family",
        "booked the travel tickets at last",
        "this music has been on repeat all day",
        "quiet day with nothing planned",
    ]
    rows = []
    for i, text in enumerate(texts):
        row = {"id": f"t{i:03d}", "text": text}
        if i != 9:
            row["keyword"] = TWEET_KEYWORDS[i % len(TWEET_KEYWORDS)]
        if i == 3:
            row["keyword_confidence"] = 0.9
        row["gt_confidence"] = round(float(rng.uniform(0.0, 1.0)), 2)
        rows.append(row)
    return rows


def write_jsonl(rows, path):
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        for row in rows:
            fh.write(json.dumps(row, ensure_ascii=False, separators=(",", ":")) + "\n")


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(SEED)

    word_vectors = build_word_vectors(rng)
    captions = build_captions(rng)
    masked = build_masked(rng)
    contexts = build_contexts(rng, captions, masked)
    tweets = build_tweets(rng)
    emb, lm = build_sidecars(rng, captions, masked, contexts, tweets)

    with (OUT / "word_vectors.txt").open("w", encoding="utf-8", newline="\n") as fh:
        for token in sorted(word_vectors):
            comps = " ".join(f"{x:.6f}" for x in word_vectors[token])
            fh.write(f"{token} {comps}\n")

    write_jsonl(sorted(captions, key=lambda r: r["id"]), OUT / "captions.jsonl")
    write_jsonl(sorted(masked, key=lambda r: r["id"]), OUT / "masked.jsonl")
    write_jsonl(sorted(contexts, key=lambda r: r["image_id"]), OUT / "contexts.jsonl")
    write_jsonl(tweets, OUT / "tweets.jsonl")

    emb_rows = [{"_manifest": {"model": "fixture-encoder", "revision": "1", "dim": EMB_DIM}}]
    emb_rows += [{"key": k, "vector": emb[k]} for k in sorted(emb)]
    write_jsonl(emb_rows, OUT / "embeddings.jsonl")

    lm_rows = [{"_manifest": {"model": "fixture-lm", "revision": "1", "dim": None}}]
    lm_rows += [{"key": k, **lm[k]} for k in sorted(lm)]
    write_jsonl(lm_rows, OUT / "lm.jsonl")

    lexicon = {
        "man": ["man", "men", "boy", "boys", "guy", "guys", "gentleman", "male"],
        "woman": ["woman", "women", "girl", "girls", "lady", "ladies", "female"],
        "neutral": ["person", "people", "human", "player", "child", "kid"],
        "anchors": {"man": "a man", "woman": "a woman", "neutral": "a person"},
    }
    with (OUT / "lexicon.json").open("w", encoding="utf-8", newline="\n") as fh:
        json.dump(lexicon, fh, indent=2)
        fh.write("\n")

    print(f"wrote fixtures to {OUT}")
    print(f"  word vectors: {len(word_vectors)} tokens")
    print(f"  captions: {len(captions)}, masked: {len(masked)}, contexts: {len(contexts)}")
    print(f"  embeddings: {len(emb)} keys, lm: {len(lm)} keys, tweets: {len(tweets)}")


if __name__ == "__main__":
    main()
