"""Capacity record files.

The JSONL format starts with a header object, followed by one record per
line::

    {"format": "fmgen-capacity", "version": 1, "index_order": "...", "generator": "fmgen 0.1.0", "count": 2}
    {"n": 2, "values": [0.0, 0.3, 0.4, 1.0], "tags": ["normal"], "spec": {"class": "normal"}, "seed": 7, "index": 0, "generator": "fmgen 0.1.0"}
    ...

``values[A]`` is the value of the subset with bitmask ``A`` (bit ``i-1`` set
when element ``i`` belongs to it).  Floats are written with Python's
shortest round-trip repr, so reading back is lossless.  The header count
makes truncation detectable.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import IO, Iterable, Optional

from .errors import FmgenError
from .setfn import MAX_N, SetFunction

FORMAT = "fmgen-capacity"
FORMAT_VERSION = 1
INDEX_ORDER = "values[A] for bitmask A; bit i-1 set iff element i in A"


class RecordError(FmgenError):
    """Unreadable, malformed or truncated record file."""


@dataclass(frozen=True)
class CapacityRecord:
    n: int
    values: tuple
    tags: tuple = ()
    spec: dict = field(default_factory=dict)
    seed: Optional[int] = None
    index: Optional[int] = None
    generator: str = ""

    def measure(self) -> SetFunction:
        return SetFunction(self.n, self.values)

    def to_json(self) -> dict:
        return {
            "n": self.n, "values": list(self.values), "tags": list(self.tags), "spec": dict(self.spec),
            "seed": self.seed, "index": self.index, "generator": self.generator,
        }

    @classmethod
    def from_json(cls, obj) -> "CapacityRecord":
        if not isinstance(obj, dict):
            raise RecordError("record is not a JSON object")
        try:
            n = obj["n"]
            values = obj["values"]
        except KeyError as exc:
            raise RecordError(f"record lacks field {exc}") from None
        if not isinstance(n, int) or not 2 <= n <= MAX_N:
            raise RecordError(f"bad element count {n!r}")
        if not isinstance(values, list) or len(values) != 1 << n:
            raise RecordError(f"expected {1 << n} values")
        if not all(isinstance(x, (int, float)) and not isinstance(x, bool) and math.isfinite(x) for x in values):
            raise RecordError("values must be finite numbers")
        return cls(n, tuple(float(x) for x in values), tuple(obj.get("tags", ())), dict(obj.get("spec", {})),
                   obj.get("seed"), obj.get("index"), str(obj.get("generator", "")))


def header(count: int, generator: str) -> dict:
    return {"format": FORMAT, "version": FORMAT_VERSION, "index_order": INDEX_ORDER,
            "generator": generator, "count": count}


def dumps_line(obj: dict) -> str:
    return json.dumps(obj, separators=(", ", ": "), allow_nan=False)


def write_jsonl(records: Iterable[CapacityRecord], out: IO[str], count: int, generator: str) -> None:
    out.write(dumps_line(header(count, generator)) + "\n")
    for rec in records:
        out.write(dumps_line(rec.to_json()) + "\n")


def read_jsonl(stream: IO[str]) -> tuple[dict, list[CapacityRecord]]:
    """Parse a record file; raises :class:`RecordError` on any defect."""
    lines = stream.read().split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    else:
        raise RecordError("file does not end with a newline (truncated?)")
    if not lines:
        raise RecordError("empty file")
    try:
        head = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise RecordError(f"bad header: {exc}") from None
    if not isinstance(head, dict) or head.get("format") != FORMAT:
        raise RecordError("missing capacity-file header")
    if head.get("version") != FORMAT_VERSION:
        raise RecordError(f"unsupported format version {head.get('version')!r}")
    records = []
    for lineno, line in enumerate(lines[1:], start=2):
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise RecordError(f"line {lineno}: {exc}") from None
        records.append(CapacityRecord.from_json(obj))
    if head.get("count") != len(records):
        raise RecordError(f"header announces {head.get('count')} records, found {len(records)}")
    return head, records


def write_csv(records: Iterable[CapacityRecord], out: IO[str]) -> None:
    """Flat CSV: one row per record, values in bitmask order."""
    w = csv.writer(out, lineterminator="\n")
    wrote_header = False
    for rec in records:
        if not wrote_header:
            w.writerow(["index", "seed", "n", "tags"] + [f"v{a}" for a in range(1 << rec.n)])
            wrote_header = True
        w.writerow([rec.index, rec.seed, rec.n, ";".join(rec.tags)] + [repr(x) for x in rec.values])


def to_csv_string(records: Iterable[CapacityRecord]) -> str:
    buf = io.StringIO()
    write_csv(records, buf)
    return buf.getvalue()
