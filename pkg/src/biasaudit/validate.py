"""Input validation: schema checks per file plus cross-file key coverage.

Every supplied file is checked independently so one bad file does not
hide problems in another. Cross-checks then confirm that the sidecars
cover the dataset: the language model must know every caption and every
gendered fill, embeddings must know every caption whose image carries
context objects, and anchor phrases and object labels are reported as
warnings when uncovered (consumers skip them with a coverage note
rather than failing).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

from .context import prefilter_context
from .core import FILLABLE_CLASSES, GenderLexicon, variant_key
from .dataio import load_captions, load_contexts
from .errors import InputError
from .revision import load_lm_sidecar, mean_prob_from_logprobs
from .vectors import iter_jsonl, load_sidecar_vectors, load_word_vectors

LM_CONSISTENCY_TOL = 1e-9


@dataclass
class ValidationReport:
    errors: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    files: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.errors

    def error(self, message: str) -> None:
        self.errors.append(message)

    def warn(self, message: str) -> None:
        self.warnings.append(message)

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "error_count": len(self.errors),
            "warning_count": len(self.warnings),
            "errors": list(self.errors),
            "warnings": list(self.warnings),
            "files": dict(self.files),
        }


def validate_inputs(
    *,
    captions_path: Path | None = None,
    masked_path: Path | None = None,
    contexts_path: Path | None = None,
    vectors_path: Path | None = None,
    embeddings_path: Path | None = None,
    lm_path: Path | None = None,
    lexicon: GenderLexicon | None = None,
    conf_threshold: float = 0.2,
    k: int = 3,
) -> ValidationReport:
    """Check every supplied input and the key coverage between them."""
    report = ValidationReport()
    lexicon = lexicon if lexicon is not None else GenderLexicon.default()

    captions = []
    if captions_path is not None:
        loaded = _load(report, "captions", load_captions, captions_path)
        if loaded is not None:
            captions.extend(loaded)
            report.files["captions"] = {"records": len(loaded)}

    masked = []
    if masked_path is not None:
        loaded = _load(report, "masked", load_captions, masked_path)
        if loaded is not None:
            masked.extend(loaded)
            report.files["masked"] = {"records": len(loaded)}
            for record in loaded:
                if not record.mask_present:
                    report.error(
                        f"masked: caption {record.id!r} carries no <MASK> slot"
                    )

    contexts = None
    if contexts_path is not None:
        contexts = _load(report, "contexts", load_contexts, contexts_path)
        if contexts is not None:
            report.files["contexts"] = {
                "images": len(contexts),
                "objects": sum(len(c.objects) for c in contexts.values()),
            }

    if vectors_path is not None:
        vectors = _load(report, "vectors", load_word_vectors, vectors_path)
        if vectors is not None:
            report.files["vectors"] = {"tokens": len(vectors), "dim": vectors.dim}

    embeddings = None
    if embeddings_path is not None:
        embeddings = _load(report, "embeddings", load_sidecar_vectors, embeddings_path)
        if embeddings is not None:
            report.files["embeddings"] = {"keys": len(embeddings), "dim": embeddings.dim}
            manifest = embeddings.manifest
            if manifest and manifest.get("dim") is not None and manifest["dim"] != embeddings.dim:
                report.error(
                    f"embeddings: manifest declares dim {manifest['dim']} "
                    f"but vectors have dim {embeddings.dim}"
                )

    lm = None
    if lm_path is not None:
        lm = _load(report, "lm", load_lm_sidecar, lm_path)
        if lm is not None:
            report.files["lm"] = {"keys": len(lm)}
            _check_lm_consistency(report, lm_path)

    all_records = captions + masked
    surviving_labels: set[str] = set()
    images_with_objects: set[str] = set()
    if contexts is not None:
        for image_id, ctx in contexts.items():
            kept = prefilter_context(
                ctx, lexicon=lexicon, conf_threshold=conf_threshold, k=k
            )
            if kept.objects:
                images_with_objects.add(image_id)
            surviving_labels.update(o.label for o in kept.objects)

    if lm is not None:
        for record in all_records:
            if record.mask_present:
                for cls in FILLABLE_CLASSES:
                    key = variant_key(record.id, cls)
                    if key not in lm:
                        report.error(f"lm: missing required key {key!r}")
            elif record.id not in lm:
                report.error(f"lm: missing required key {record.id!r}")

    if embeddings is not None:
        if contexts is not None:
            for record in all_records:
                if record.image_id not in images_with_objects:
                    continue
                if record.mask_present:
                    for cls in FILLABLE_CLASSES:
                        key = variant_key(record.id, cls)
                        if key not in embeddings:
                            report.error(f"embeddings: missing required key {key!r}")
                elif record.id not in embeddings:
                    report.error(f"embeddings: missing required key {record.id!r}")
            for label in sorted(surviving_labels):
                if label not in embeddings:
                    report.warn(f"embeddings: no vector for object label {label!r}")
        for cls in FILLABLE_CLASSES:
            phrase = lexicon.anchor(cls)
            if phrase not in embeddings:
                report.warn(f"embeddings: no vector for anchor phrase {phrase!r}")

    return report


def _load(report: ValidationReport, role: str, loader, path: Path):
    try:
        return loader(path)
    except InputError as exc:
        report.error(f"{role}: {exc}")
        return None


def _check_lm_consistency(report: ValidationReport, path: Path) -> None:
    """Records carrying both fields must agree within LM_CONSISTENCY_TOL."""
    try:
        for lineno, record in iter_jsonl(path):
            if "_manifest" in record:
                continue
            mean = record.get("mean_token_prob")
            logprobs = record.get("token_logprobs")
            if mean is None or not logprobs:
                continue
            recomputed = mean_prob_from_logprobs([float(lp) for lp in logprobs])
            if not math.isclose(float(mean), recomputed, rel_tol=0.0, abs_tol=LM_CONSISTENCY_TOL):
                report.error(
                    f"lm: key {record.get('key')!r} mean_token_prob {mean!r} disagrees "
                    f"with its token_logprobs mean {recomputed!r}"
                )
    except InputError:
        pass  # already reported by the loader
