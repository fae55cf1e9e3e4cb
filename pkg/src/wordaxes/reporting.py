"""Deterministic writers for the report tables and JSON sidecars.

Every file starts with (or embeds) the tool version, the config fingerprint,
and the seed.  Floats are written with round-trip ``repr`` and all rows are
sorted by their callers, so identical (config, seed) pairs produce
byte-identical files.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path


def fmt(value) -> str:
    """Canonical cell text: round-trip floats, empty string for None."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def meta_comment(meta: dict) -> str:
    return "# " + " ".join(f"{k}={v}" for k, v in sorted(meta.items()))


def write_table(path, fieldnames: list[str], rows: list[dict], meta: dict) -> None:
    """CSV with a leading '# key=value ...' comment line carrying provenance."""
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(meta_comment(meta) + "\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(fieldnames)
        for row in rows:
            writer.writerow([fmt(row.get(f)) for f in fieldnames])


def write_json(path, payload: dict, meta: dict) -> None:
    path = Path(path)
    document = {"meta": dict(sorted(meta.items())), **payload}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(document, fh, indent=2, sort_keys=True)
        fh.write("\n")


def sanitize(token: str) -> str:
    """Filename-safe version of a run-key component."""
    return "".join(c if c.isalnum() or c in "._-" else "-" for c in token)
