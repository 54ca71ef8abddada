"""Command surface: one subcommand per pipeline stage.

    filter-context  reduce raw detections to distinct high-confidence objects
    distance        gender-object similarity tables (word or sentence level)
    score           belief-revision gender scores over a caption corpus
    estimate        masked-gender estimation over a masked corpus
    cooc            gender co-occurrence counts and per-object count bias
    leakage         model counts relative to human counts
    report          render CSV/JSON tables from a run directory
    validate        schema and cross-file checks over the inputs
    text-score      keyword-context scoring for image-free corpora

Configuration may come from a JSON file (--config); explicit flags win.
Diagnostics go to stderr as JSON lines. Exit codes: 0 success, 1 invalid
input, 2 runtime failure. BIASAUDIT_THREADS caps the worker pool; output
bytes do not depend on it.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

from . import report as report_mod
from .context import filter_context, prefilter_context
from .cooc import cooc_counts, leakage, per_image_mean_to_m, per_object_bias
from .core import (
    FILLABLE_CLASSES,
    GenderClass,
    GenderLexicon,
    label_caption_gender,
)
from .dataio import (
    dump_json,
    dump_jsonl,
    load_captions,
    load_contexts,
    parallel_map,
    write_contexts,
)
from .distance import aggregate_distance_table, bias_ratio_to_m, ratio_to_neutral
from .errors import BiasAuditError, InputError
from .estimate import TIE_EPSILON, estimation_report
from .revision import STRATEGIES, load_lm_sidecar, score_caption
from .textscore import (
    DEFAULT_KEYWORD_CONFIDENCE,
    load_text_records,
    text_only_score,
)
from .validate import validate_inputs
from .vectors import iter_jsonl, load_sidecar_vectors, load_word_vectors

log = logging.getLogger(__name__)


class _JsonLineFormatter(logging.Formatter):
    def format(self, record):
        return json.dumps(
            {
                "level": record.levelname.lower(),
                "logger": record.name,
                "message": record.getMessage(),
            },
            ensure_ascii=False,
        )


def _setup_logging() -> None:
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(_JsonLineFormatter())
    root = logging.getLogger("biasaudit")
    root.handlers[:] = [handler]
    root.setLevel(logging.WARNING)
    root.propagate = False


class Settings:
    """Flag-over-config resolution for tunable parameters."""

    def __init__(self, config_path: str | None):
        self.values: dict = {}
        if config_path:
            try:
                raw = json.loads(Path(config_path).read_text(encoding="utf-8"))
            except (OSError, json.JSONDecodeError) as exc:
                raise InputError(f"cannot load config {config_path}: {exc}") from exc
            if not isinstance(raw, dict):
                raise InputError(f"config {config_path} must contain a JSON object")
            self.values = raw

    def get(self, flag_value, key: str, default):
        if flag_value is not None:
            return flag_value
        if key in self.values:
            return self.values[key]
        return default


def _resolve_lexicon(args, settings: Settings) -> GenderLexicon:
    path = settings.get(getattr(args, "lexicon", None), "lexicon", None)
    if path is None:
        return GenderLexicon.default()
    return GenderLexicon.from_file(path)


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON config file; explicit flags win")
    parser.add_argument("--lexicon", help="lexicon JSON file (default: packaged lexicon)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="biasaudit",
        description="Audit gender bias in caption corpora.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("filter-context", help="filter raw visual contexts")
    _add_common(p)
    p.add_argument("--contexts", required=True, help="raw contexts JSONL")
    p.add_argument("--vectors", help="word vectors for duplicate voting")
    p.add_argument("--conf-threshold", type=float, default=None)
    p.add_argument("--vote-threshold", type=float, default=None)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--out", required=True, help="filtered contexts JSONL path")
    p.set_defaults(func=cmd_filter_context)

    p = sub.add_parser("distance", help="gender-object similarity tables")
    _add_common(p)
    p.add_argument("--level", required=True, choices=("word", "sentence"))
    p.add_argument("--captions", required=True)
    p.add_argument("--contexts", required=True)
    p.add_argument("--vectors", help="word vectors (word level)")
    p.add_argument("--sidecar", help="embedding sidecar (sentence level)")
    p.add_argument("--conf-threshold", type=float, default=None)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--top-n", type=int, default=None)
    p.add_argument("--out", required=True, help="output prefix: writes .json and .csv")
    p.set_defaults(func=cmd_distance)

    p = sub.add_parser("score", help="belief-revision gender scores")
    _add_common(p)
    p.add_argument("--captions", required=True)
    p.add_argument("--contexts", required=True)
    p.add_argument("--embeddings", required=True, help="embedding sidecar JSONL")
    p.add_argument("--lm", required=True, help="language-model sidecar JSONL")
    p.add_argument("--strategy", choices=STRATEGIES, default=None)
    p.add_argument("--conf-threshold", type=float, default=None)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--out", required=True, help="output prefix: writes .jsonl and .summary.json")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("estimate", help="masked-gender estimation")
    _add_common(p)
    p.add_argument("--captions", required=True, help="masked captions JSONL")
    p.add_argument("--contexts", required=True)
    p.add_argument("--embeddings", required=True)
    p.add_argument("--lm", required=True)
    p.add_argument("--strategy", choices=STRATEGIES, default=None)
    p.add_argument("--tie-epsilon", type=float, default=None)
    p.add_argument("--include-neutral", action="store_true")
    p.add_argument("--conf-threshold", type=float, default=None)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--out", required=True, help="output prefix: writes .jsonl and .summary.json")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("cooc", help="gender co-occurrence counts")
    _add_common(p)
    p.add_argument("--captions", required=True)
    p.add_argument("--source", choices=("model", "human", "all"), default="all")
    p.add_argument("--objects", help="comma-separated object labels for per-object bias")
    p.add_argument("--scores", help="scored captions JSONL for score-weighted per-object bias")
    p.add_argument("--out", required=True, help="output prefix: writes .json")
    p.set_defaults(func=cmd_cooc)

    p = sub.add_parser("leakage", help="model counts vs human counts")
    _add_common(p)
    p.add_argument("--model", required=True, help="cooc summary JSON for model captions")
    p.add_argument("--human", required=True, help="cooc summary JSON for human captions")
    p.add_argument("--out", required=True, help="output prefix: writes .json")
    p.set_defaults(func=cmd_leakage)

    p = sub.add_parser("report", help="render tables from a run directory")
    _add_common(p)
    p.add_argument("--run", required=True, help="directory holding subcommand artifacts")
    p.add_argument("--tables", help=f"comma-separated subset of {sorted(report_mod.TABLES)}")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("validate", help="schema and cross-file checks")
    _add_common(p)
    p.add_argument("--captions")
    p.add_argument("--masked")
    p.add_argument("--contexts")
    p.add_argument("--vectors")
    p.add_argument("--embeddings")
    p.add_argument("--lm")
    p.add_argument("--conf-threshold", type=float, default=None)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--out", help="write the report JSON here as well as stdout")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("text-score", help="keyword-context scoring without images")
    _add_common(p)
    p.add_argument("--records", required=True, help="text records JSONL")
    p.add_argument("--embeddings", required=True)
    p.add_argument("--lm", required=True)
    p.add_argument("--strategy", choices=STRATEGIES, default=None)
    p.add_argument("--keyword-confidence", type=float, default=None)
    p.add_argument("--out", required=True, help="output prefix: writes .jsonl and .summary.json")
    p.set_defaults(func=cmd_text_score)

    return parser


def cmd_filter_context(args, settings: Settings) -> int:
    lexicon = _resolve_lexicon(args, settings)
    contexts = load_contexts(args.contexts)
    store = load_word_vectors(args.vectors) if args.vectors else None
    conf = settings.get(args.conf_threshold, "conf_threshold", 0.2)
    vote = settings.get(args.vote_threshold, "vote_threshold", 0.8)
    k = settings.get(args.k, "k", 3)

    def run(image_id):
        ctx = contexts[image_id]
        return filter_context(
            ctx.objects,
            store,
            lexicon=lexicon,
            conf_threshold=conf,
            vote_threshold=vote,
            k=k,
            image_id=image_id,
        )

    filtered = parallel_map(run, sorted(contexts))
    write_contexts({ctx.image_id: ctx for ctx in filtered}, args.out)
    return 0


def cmd_distance(args, settings: Settings) -> int:
    lexicon = _resolve_lexicon(args, settings)
    records = load_captions(args.captions)
    conf = settings.get(args.conf_threshold, "conf_threshold", 0.2)
    k = settings.get(args.k, "k", 3)
    contexts = {
        image_id: prefilter_context(ctx, lexicon=lexicon, conf_threshold=conf, k=k)
        for image_id, ctx in load_contexts(args.contexts).items()
    }
    word_store = sidecar = None
    if args.level == "word":
        if not args.vectors:
            raise InputError("distance --level word needs --vectors")
        word_store = load_word_vectors(args.vectors)
    else:
        if not args.sidecar:
            raise InputError("distance --level sentence needs --sidecar")
        sidecar = load_sidecar_vectors(args.sidecar)
    table = aggregate_distance_table(
        records,
        contexts,
        args.level,
        lexicon=lexicon,
        word_store=word_store,
        sidecar=sidecar,
        top_n=settings.get(args.top_n, "top_n", 5),
    )
    data = table.to_dict()
    dump_json(data, f"{args.out}.json")
    report_mod.render_distance_csv(data, Path(f"{args.out}.csv"))
    return 0


def cmd_score(args, settings: Settings) -> int:
    lexicon = _resolve_lexicon(args, settings)
    records = load_captions(args.captions)
    conf = settings.get(args.conf_threshold, "conf_threshold", 0.2)
    k = settings.get(args.k, "k", 3)
    contexts = {
        image_id: prefilter_context(ctx, lexicon=lexicon, conf_threshold=conf, k=k)
        for image_id, ctx in load_contexts(args.contexts).items()
    }
    emb_store = load_sidecar_vectors(args.embeddings)
    lm_store = load_lm_sidecar(args.lm)
    strategy = settings.get(args.strategy, "strategy", "max_sim")

    skipped_mixed = 0
    jobs = []
    for record in records:
        if record.mask_present:
            jobs.append((record, FILLABLE_CLASSES))
        else:
            cls = label_caption_gender(record.text, lexicon)
            if cls is GenderClass.MIXED:
                skipped_mixed += 1
                continue
            jobs.append((record, (cls,)))

    def run(job):
        record, classes = job
        ctx = contexts.get(record.image_id)
        return [
            score_caption(record, cls, ctx, emb_store, lm_store, strategy)
            for cls in classes
        ]

    rows = [scored for batch in parallel_map(run, jobs) for scored in batch]
    rows.sort(key=lambda s: (s.caption_id, s.gender.value))

    aggregates = {}
    for cls in FILLABLE_CLASSES:
        scores = [s.score for s in rows if s.gender is cls]
        aggregates[cls.value] = {
            "gender": cls.value,
            "mean_score": _fmean(scores),
            "count": len(scores),
        }
    mean_man = aggregates["man"]["mean_score"]
    mean_woman = aggregates["woman"]["mean_score"]
    mean_person = aggregates["neutral"]["mean_score"]
    summary = {
        "aggregates": aggregates,
        "ratio_to_neutral": {
            "man": (
                ratio_to_neutral(mean_man, mean_person)
                if mean_man is not None and mean_person is not None
                else None
            ),
            "woman": (
                ratio_to_neutral(mean_woman, mean_person)
                if mean_woman is not None and mean_person is not None
                else None
            ),
        },
        "to_m": (
            bias_ratio_to_m(mean_man, mean_woman)
            if mean_man is not None and mean_woman is not None
            else None
        ),
        "to_w": (
            bias_ratio_to_m(mean_woman, mean_man)
            if mean_man is not None and mean_woman is not None
            else None
        ),
        "skipped_mixed": skipped_mixed,
        "strategy": strategy,
    }
    dump_jsonl([s.to_dict() for s in rows], f"{args.out}.jsonl")
    dump_json(summary, f"{args.out}.summary.json")
    return 0


def _fmean(values):
    if not values:
        return None
    return math.fsum(values) / len(values)


def cmd_estimate(args, settings: Settings) -> int:
    lexicon = _resolve_lexicon(args, settings)
    records = load_captions(args.captions)
    conf = settings.get(args.conf_threshold, "conf_threshold", 0.2)
    k = settings.get(args.k, "k", 3)
    contexts = {
        image_id: prefilter_context(ctx, lexicon=lexicon, conf_threshold=conf, k=k)
        for image_id, ctx in load_contexts(args.contexts).items()
    }
    emb_store = load_sidecar_vectors(args.embeddings)
    lm_store = load_lm_sidecar(args.lm)
    result = estimation_report(
        records,
        contexts,
        emb_store,
        lm_store,
        strategy=settings.get(args.strategy, "strategy", "max_sim"),
        tie_epsilon=settings.get(args.tie_epsilon, "tie_epsilon", TIE_EPSILON),
        include_neutral=args.include_neutral,
        mapper=parallel_map,
    )
    dump_jsonl([p.to_dict() for p in result.predictions], f"{args.out}.jsonl")
    dump_json(result.summary(), f"{args.out}.summary.json")
    return 0


def cmd_cooc(args, settings: Settings) -> int:
    lexicon = _resolve_lexicon(args, settings)
    records = load_captions(args.captions)
    if args.source != "all":
        records = [r for r in records if r.source == args.source]
    counts = cooc_counts(records, lexicon)
    per_image, image_count = per_image_mean_to_m(records, lexicon)
    summary = counts.to_dict()
    summary["source"] = args.source
    summary["per_image_to_m"] = per_image
    summary["per_image_count"] = image_count

    per_object_rows = []
    if args.objects:
        scores = None
        if args.scores:
            scores = _own_label_scores(args.scores, records, lexicon)
        for label in [o.strip() for o in args.objects.split(",") if o.strip()]:
            to_m, to_w = per_object_bias(records, lexicon, label, method="cooc")
            per_object_rows.append(
                {"label": label, "method": "cooc", "to_m": to_m, "to_w": to_w}
            )
            if scores is not None:
                to_m, to_w = per_object_bias(
                    records, lexicon, label, method="gender_score", scores=scores
                )
                per_object_rows.append(
                    {"label": label, "method": "gender_score", "to_m": to_m, "to_w": to_w}
                )
    summary["per_object"] = per_object_rows
    dump_json(summary, f"{args.out}.json")
    return 0


def _own_label_scores(path: str, records, lexicon: GenderLexicon) -> dict[str, float]:
    """Scores from a scored-captions JSONL, keyed by caption id.

    Each caption contributes the row scored under its own label class.
    """
    by_key: dict[tuple[str, str], float] = {}
    for _, row in iter_jsonl(path):
        if "caption_id" in row and "gender" in row and "score" in row:
            by_key[(str(row["caption_id"]), str(row["gender"]))] = float(row["score"])
    scores: dict[str, float] = {}
    for record in records:
        cls = label_caption_gender(record.text, lexicon)
        if cls in (GenderClass.MAN, GenderClass.WOMAN):
            value = by_key.get((record.id, cls.value))
            if value is not None:
                scores[record.id] = value
    return scores


def cmd_leakage(args, settings: Settings) -> int:
    def counts_of(path: str) -> dict:
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot load cooc summary {path}: {exc}") from exc
        if "counts" not in data:
            raise InputError(f"{path} is not a cooc summary (no 'counts')")
        return data["counts"]

    model = counts_of(args.model)
    human = counts_of(args.human)
    result = {
        gender: {
            "model": model[gender],
            "human": human[gender],
            "leakage": leakage(model[gender], human[gender]),
        }
        for gender in ("man", "woman")
    }
    dump_json(result, f"{args.out}.json")
    return 0


def cmd_report(args, settings: Settings) -> int:
    tables = None
    if args.tables:
        tables = [t.strip() for t in args.tables.split(",") if t.strip()]
    report_mod.build_report(Path(args.run), Path(args.out), tables)
    return 0


def cmd_validate(args, settings: Settings) -> int:
    lexicon = _resolve_lexicon(args, settings)
    report = validate_inputs(
        captions_path=args.captions,
        masked_path=args.masked,
        contexts_path=args.contexts,
        vectors_path=args.vectors,
        embeddings_path=args.embeddings,
        lm_path=args.lm,
        lexicon=lexicon,
        conf_threshold=settings.get(args.conf_threshold, "conf_threshold", 0.2),
        k=settings.get(args.k, "k", 3),
    )
    payload = report.to_dict()
    sys.stdout.write(json.dumps(payload, ensure_ascii=False, indent=2) + "\n")
    if args.out:
        dump_json(payload, args.out)
    return 0 if report.ok else 1


def cmd_text_score(args, settings: Settings) -> int:
    records = load_text_records(args.records)
    emb_store = load_sidecar_vectors(args.embeddings)
    lm_store = load_lm_sidecar(args.lm)
    rows, summary = text_only_score(
        records,
        emb_store,
        lm_store,
        strategy=settings.get(args.strategy, "strategy", "max_sim"),
        default_keyword_confidence=settings.get(
            args.keyword_confidence, "keyword_confidence", DEFAULT_KEYWORD_CONFIDENCE
        ),
        mapper=parallel_map,
    )
    dump_jsonl(rows, f"{args.out}.jsonl")
    dump_json(summary, f"{args.out}.summary.json")
    return 0


def main(argv=None) -> int:
    _setup_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        settings = Settings(getattr(args, "config", None))
        return args.func(args, settings)
    except InputError as exc:
        _diag("error", str(exc))
        return 1
    except BiasAuditError as exc:
        _diag("error", str(exc))
        return 2
    except Exception as exc:  # noqa: BLE001 - the CLI boundary reports, not raises
        _diag("error", f"unexpected failure: {exc.__class__.__name__}: {exc}")
        return 2


def _diag(level: str, message: str) -> None:
    sys.stderr.write(
        json.dumps({"level": level, "message": message}, ensure_ascii=False) + "\n"
    )


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
