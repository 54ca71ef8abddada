"""Atomic JSONL sidecar writing: manifest header first, then records.

The file appears under its final name only once fully written and
flushed (write to a temp file in the same directory, fsync, rename), so
a crashed export never leaves a partial sidecar behind.
"""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path


def write_sidecar(path: str | Path, manifest: dict, records: list[dict]) -> Path:
    """Write ``{"_manifest": manifest}`` then each record, atomically."""
    path = Path(path)
    fd, tmp_name = tempfile.mkstemp(
        prefix=path.name + ".", suffix=".tmp", dir=path.parent or Path(".")
    )
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(json.dumps({"_manifest": manifest}, ensure_ascii=False) + "\n")
            for record in records:
                handle.write(json.dumps(record, ensure_ascii=False) + "\n")
            handle.flush()
            os.fsync(handle.fileno())
        os.replace(tmp_name, path)
    except BaseException:
        try:
            os.unlink(tmp_name)
        except OSError:
            pass
        raise
    return path
