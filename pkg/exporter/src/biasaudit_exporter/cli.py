"""Command surface: ``export-emb`` and ``export-lm``.

Also reachable as ``python -m biasaudit_exporter {export-emb,export-lm}``.
Exit codes: 0 success, 1 invalid input or model failure, 2 unexpected
failure. Diagnostics are single-line JSON on stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .errors import ExportError


def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--captions",
        action="append",
        required=True,
        metavar="PATH",
        help="captions JSONL; repeat the flag to merge several files",
    )
    parser.add_argument("--lexicon", metavar="PATH", help="lexicon JSON (default: built-in)")
    parser.add_argument("--revision", help="model revision recorded in the manifest")
    parser.add_argument("--out", required=True, metavar="PATH", help="sidecar JSONL to write")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="biasaudit-exporter", description="Produce audit sidecar files with pretrained models."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    emb = sub.add_parser("export-emb", help="sentence-embedding sidecar")
    _common(emb)
    emb.add_argument("--contexts", required=True, metavar="PATH", help="visual contexts JSONL")
    emb.add_argument(
        "--model",
        default="sentence-transformers/all-MiniLM-L6-v2",
        help="sentence encoder name or local path",
    )

    lm = sub.add_parser("export-lm", help="token-probability sidecar")
    _common(lm)
    lm.add_argument("--model", default="gpt2", help="causal LM name or local path")
    return parser


def run(argv: list[str] | None = None) -> int:
    os.environ.setdefault("HF_HUB_DISABLE_PROGRESS_BARS", "1")
    args = build_parser().parse_args(argv)
    try:
        if args.command == "export-emb":
            from .embed import export_embeddings

            out = export_embeddings(
                args.captions,
                args.contexts,
                args.out,
                lexicon_path=args.lexicon,
                model=args.model,
                revision=args.revision,
            )
        else:
            from .lm import export_lm_probs

            out = export_lm_probs(
                args.captions,
                args.out,
                lexicon_path=args.lexicon,
                model=args.model,
                revision=args.revision,
            )
    except ExportError as exc:
        _diag("error", str(exc))
        return 1
    except OSError as exc:
        _diag("error", str(exc))
        return 1
    except Exception as exc:  # noqa: BLE001 - report, don't traceback, at the CLI edge
        _diag("error", f"unexpected failure: {exc}")
        return 2
    print(out)
    return 0


def _diag(level: str, message: str) -> None:
    print(json.dumps({"level": level, "message": message}), file=sys.stderr)


def main() -> None:
    raise SystemExit(run())


def main_emb() -> None:
    raise SystemExit(run(["export-emb", *sys.argv[1:]]))


def main_lm() -> None:
    raise SystemExit(run(["export-lm", *sys.argv[1:]]))
