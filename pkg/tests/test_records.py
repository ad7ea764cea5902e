from __future__ import annotations

import io
from pathlib import Path

import pytest

from fmgen.records import CapacityRecord, RecordError, read_jsonl, to_csv_string, write_jsonl

GOLDEN = Path(__file__).parent / "golden"

RECORDS = [
    CapacityRecord(2, (0.0, 0.3, 0.4, 1.0), ("normal",), {"class": "normal"}, 7, 0, "fmgen 0.1.0"),
    CapacityRecord(2, (0.0, 0.25, 0.75, 1.0), ("additive",), {"class": "additive"}, 7, 1, "fmgen 0.1.0"),
]


def _dump(records):
    buf = io.StringIO()
    write_jsonl(records, buf, len(records), "fmgen 0.1.0")
    return buf.getvalue()


def test_jsonl_matches_golden():
    assert _dump(RECORDS) == (GOLDEN / "records_n2.jsonl").read_text()


def test_jsonl_round_trip():
    head, back = read_jsonl(io.StringIO(_dump(RECORDS)))
    assert head["count"] == 2 and back == RECORDS


def test_float_round_trip_is_lossless():
    rec = CapacityRecord(2, (0.0, 0.1 + 0.2, 1 / 3, 1.0))
    _, (back,) = read_jsonl(io.StringIO(_dump([rec])))
    assert back.values == rec.values


def test_csv_layout():
    text = to_csv_string(RECORDS)
    assert text.splitlines() == [
        "index,seed,n,tags,v0,v1,v2,v3",
        "0,7,2,normal,0.0,0.3,0.4,1.0",
        "1,7,2,additive,0.0,0.25,0.75,1.0",
    ]


@pytest.mark.parametrize("mangle", [
    lambda s: s[:-1],                                   # missing final newline
    lambda s: s.rsplit("\n", 2)[0] + "\n",              # a whole record dropped
    lambda s: s.replace('"fmgen-capacity"', '"other"'),
    lambda s: s.replace('"version": 1', '"version": 9'),
    lambda s: s.replace("[0.0, 0.3, 0.4, 1.0]", "[0.0, 0.3, 1.0]"),
    lambda s: s.replace("0.3,", "NaN,"),
    lambda s: s.replace('"n": 2', '"n": "2"', 1),
    lambda s: "",
])
def test_defects_are_detected(mangle):
    with pytest.raises(RecordError):
        read_jsonl(io.StringIO(mangle(_dump(RECORDS))))
