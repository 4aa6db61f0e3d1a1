"""Structured verifier reports with reproducible serialization.

Reports are rebuilt bit-for-bit from the same seed and config, so the
JSON payload deliberately excludes wall-clock timing; runtime is kept
on the object and surfaced on stderr by the CLI instead.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field


CSV_COLUMNS = ["sample_id", "x", "y", "r", "found", "certified_distance",
               "margin", "word"]


def fmt_coords(coords) -> str:
    if coords is None:
        return ""
    return ";".join(repr(float(c)) for c in coords)


@dataclass
class VerifierReport:
    condition: str
    parameters: dict
    seed: int
    samples: list = field(default_factory=list)
    aggregate: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)
    runtime_seconds: float = None  # not serialized

    def passed(self) -> bool:
        return bool(self.aggregate.get("passed", False))

    def to_dict(self) -> dict:
        return {
            "condition": self.condition,
            "parameters": self.parameters,
            "seed": self.seed,
            "samples": self.samples,
            "aggregate": self.aggregate,
            "notes": self.notes,
        }

    def to_json_bytes(self) -> bytes:
        return (json.dumps(self.to_dict(), sort_keys=True, indent=2,
                           ensure_ascii=False) + "\n").encode("utf-8")

    def write_json(self, path) -> None:
        with open(path, "wb") as fh:
            fh.write(self.to_json_bytes())

    def csv_text(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for row in self.samples:
            w.writerow([row.get(c, "") for c in CSV_COLUMNS])
        return buf.getvalue()

    def write_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(self.csv_text())
