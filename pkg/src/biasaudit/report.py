"""Assemble audit tables from the artifacts of earlier subcommands.

The report step is presentation only: it reads the JSON artifacts a run
directory already contains, renders one CSV per table with all reals
cut to two decimals, and bundles the untouched full-precision numbers
into report.json. A requested table whose artifact is absent is an
error naming the subcommand that produces it.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

from .dataio import fmt2
from .errors import InputError, ParseError

# table name -> (artifact file, producing subcommand)
TABLES = {
    "distance": ("distance.json", "distance"),
    "score": ("score.summary.json", "score"),
    "estimation": ("estimate.summary.json", "estimate"),
    "cooc": ("cooc.model.json", "cooc"),
    "leakage": ("leakage.json", "leakage"),
    "text": ("text.summary.json", "text-score"),
}


def build_report(run_dir: Path, out_dir: Path, tables=None) -> list[Path]:
    """Render the requested tables from *run_dir* into *out_dir*.

    Returns the paths written. *tables* defaults to every known table.
    """
    run_dir = Path(run_dir)
    out_dir = Path(out_dir)
    if tables is None:
        tables = list(TABLES)
    unknown = [t for t in tables if t not in TABLES]
    if unknown:
        raise InputError(f"unknown report tables: {unknown}; expected {sorted(TABLES)}")

    loaded: dict[str, dict] = {}
    for table in tables:
        artifact, subcommand = TABLES[table]
        path = run_dir / artifact
        if not path.exists():
            raise InputError(
                f"missing artifact {artifact!r} for table {table!r}; "
                f"run `biasaudit {subcommand}` first"
            )
        try:
            loaded[table] = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: invalid JSON: {exc.msg}") from exc

    out_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    renderers = {
        "distance": _render_distance,
        "score": _render_score,
        "estimation": _render_estimation,
        "cooc": _render_cooc,
        "leakage": _render_leakage,
        "text": _render_text,
    }
    for table in tables:
        extra = {}
        if table == "cooc":
            human_path = run_dir / "cooc.human.json"
            if human_path.exists():
                extra["human"] = json.loads(human_path.read_text(encoding="utf-8"))
        written.extend(renderers[table](loaded[table], out_dir, **extra))

    report_path = out_dir / "report.json"
    with report_path.open("w", encoding="utf-8", newline="\n") as fh:
        json.dump({"tables": loaded}, fh, ensure_ascii=False, indent=2)
        fh.write("\n")
    written.append(report_path)
    return written


def _open_csv(path: Path):
    fh = path.open("w", encoding="utf-8", newline="")
    return fh, csv.writer(fh, lineterminator="\n")


def render_distance_csv(data: dict, path: Path) -> None:
    """CSV form of a distance table: corpus row first, then per-object rows."""
    fh, writer = _open_csv(Path(path))
    with fh:
        writer.writerow(
            ["subject", "s_person", "s_man", "s_woman", "n_person", "n_man",
             "n_woman", "to_m", "to_w", "man_to_neutral", "woman_to_neutral"]
        )
        for row in [data["corpus"], *data.get("rows", [])]:
            writer.writerow(
                [row["subject"]]
                + [fmt2(row[k]) for k in ("s_person", "s_man", "s_woman")]
                + [row[k] for k in ("n_person", "n_man", "n_woman")]
                + [fmt2(row[k]) for k in ("to_m", "to_w", "man_to_neutral", "woman_to_neutral")]
            )


def _render_distance(data: dict, out_dir: Path) -> list[Path]:
    path = out_dir / "distance.csv"
    render_distance_csv(data, path)
    return [path]


def _render_score(data: dict, out_dir: Path) -> list[Path]:
    path = out_dir / "score.csv"
    agg = data["aggregates"]
    fh, writer = _open_csv(path)
    with fh:
        writer.writerow(
            ["mean_person", "mean_man", "mean_woman", "count_person", "count_man",
             "count_woman", "man_to_neutral", "woman_to_neutral", "to_m", "to_w"]
        )
        writer.writerow(
            [fmt2(agg[g]["mean_score"]) for g in ("neutral", "man", "woman")]
            + [agg[g]["count"] for g in ("neutral", "man", "woman")]
            + [
                fmt2(data["ratio_to_neutral"]["man"]),
                fmt2(data["ratio_to_neutral"]["woman"]),
                fmt2(data["to_m"]),
                fmt2(data["to_w"]),
            ]
        )
    return [path]


def _render_estimation(data: dict, out_dir: Path) -> list[Path]:
    path = out_dir / "estimation.csv"
    fh, writer = _open_csv(path)
    with fh:
        writer.writerow(["man", "woman", "neutral", "errors", "to_m", "to_w"])
        counts = data["counts"]
        writer.writerow(
            [counts["man"], counts["woman"], counts["neutral"], data["errors"],
             fmt2(data["to_m"]), fmt2(data["to_w"])]
        )
    return [path]


def _render_cooc(data: dict, out_dir: Path, human: dict | None = None) -> list[Path]:
    path = out_dir / "cooc.csv"
    fh, writer = _open_csv(path)
    with fh:
        writer.writerow(
            ["source", "man", "woman", "neutral", "mixed", "to_m", "to_w",
             "per_image_to_m"]
        )
        for name, summary in (("model", data), ("human", human)):
            if summary is None:
                continue
            counts = summary["counts"]
            writer.writerow(
                [name, counts["man"], counts["woman"], counts["neutral"],
                 counts["mixed"], fmt2(summary["to_m"]), fmt2(summary["to_w"]),
                 fmt2(summary.get("per_image_to_m"))]
            )
    paths = [path]

    objects_path = out_dir / "objects.csv"
    fh, writer = _open_csv(objects_path)
    with fh:
        writer.writerow(["object", "method", "to_m", "to_w"])
        for row in data.get("per_object", []):
            writer.writerow(
                [row["label"], row["method"], fmt2(row["to_m"]), fmt2(row["to_w"])]
            )
    paths.append(objects_path)
    return paths


def _render_leakage(data: dict, out_dir: Path) -> list[Path]:
    path = out_dir / "leakage.csv"
    fh, writer = _open_csv(path)
    with fh:
        writer.writerow(["gender", "model_count", "human_count", "leakage"])
        for gender in ("man", "woman"):
            row = data[gender]
            writer.writerow(
                [gender, row["model"], row["human"], fmt2(row["leakage"])]
            )
    return [path]


def _render_text(data: dict, out_dir: Path) -> list[Path]:
    path = out_dir / "text.csv"
    fh, writer = _open_csv(path)
    with fh:
        writer.writerow(["count", "mean_man", "mean_woman", "to_m", "to_w"])
        writer.writerow(
            [data["count"], fmt2(data["mean_man"]), fmt2(data["mean_woman"]),
             fmt2(data["to_m"]), fmt2(data["to_w"])]
        )
    return [path]
