from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest

from fmgen.cli import EXIT_INFEASIBLE, EXIT_IO, EXIT_OK, EXIT_VERIFY, main
from fmgen.records import read_jsonl
from fmgen.setfn import SetFunction, cardinalities, mobius_transform
from fmgen.structured import supermodular_range

GOLDEN = Path(__file__).parent / "golden"


def _gen(tmp_path, name, *args):
    out = tmp_path / name
    assert main(["gen", *args, "--out", str(out)]) == EXIT_OK
    return out


def _records(path):
    with open(path) as fh:
        return read_jsonl(fh)[1]


def test_gen_matches_golden(tmp_path):
    out = _gen(tmp_path, "a.jsonl", "--class", "supermodular", "--n", "3", "--count", "3", "--seed", "1")
    assert out.read_bytes() == (GOLDEN / "gen_supermodular_n3.jsonl").read_bytes()


def test_gen_csv_matches_golden(tmp_path):
    out = _gen(tmp_path, "a.csv", "--class", "2-additive", "--n", "3", "--count", "2", "--seed", "1",
               "--format", "csv")
    assert out.read_bytes() == (GOLDEN / "gen_2additive_n3.csv").read_bytes()


def test_gen_supermodular_determinism(tmp_path):
    args = ["--class", "supermodular", "--n", "4", "--count", "100", "--seed", "42"]
    a = _gen(tmp_path, "a.jsonl", *args)
    b = _gen(tmp_path, "b.jsonl", *args, "--threads", "2")
    assert a.read_bytes() == b.read_bytes()
    recs = _records(a)
    assert len(recs) == 100 and all(r.tags == ("supermodular",) for r in recs)
    assert main(["verify", str(a)]) == EXIT_OK


def test_gen_k_additive(tmp_path):
    out = _gen(tmp_path, "k.jsonl", "--class", "k-additive", "--k", "2", "--n", "4", "--count", "50")
    big = cardinalities(4) > 2
    for rec in _records(out):
        assert np.abs(mobius_transform(rec.measure()).coefficients[big]).max() <= 1e-9


def test_gen_p_symmetric(tmp_path):
    out = _gen(tmp_path, "p.jsonl", "--class", "p-symmetric", "--partition", "1,2|3", "--inner",
               "superadditive", "--n", "3", "--count", "10", "--strict")
    rec = _records(out)[0]
    assert rec.spec == {"class": "p-symmetric", "inner": "superadditive", "partition": [[1, 2], [3]],
                        "strict": True}
    assert main(["verify", str(out)]) == EXIT_OK


@pytest.mark.parametrize("args", [
    ["--class", "supermodular", "--n", "4", "--eta-fraction", "1.5"],
    ["--class", "k-additive", "--k", "5", "--n", "4"],
    ["--class", "submodular", "--n", "4"],
    ["--class", "normal", "--n", "4", "--strict"],
    ["--class", "p-symmetric", "--partition", "1,2|3", "--n", "4"],
])
def test_gen_infeasible_exit_3(tmp_path, args, capsys):
    assert main(["gen", *args, "--out", str(tmp_path / "x")]) == EXIT_INFEASIBLE
    assert capsys.readouterr().err.startswith("fmgen:")


def test_usage_error_exit_4(capsys):
    assert main(["gen", "--n", "3"]) == EXIT_IO
    assert main(["frobnicate"]) == EXIT_IO


def test_verify_mutation_reports_triple(tmp_path, capsys):
    src = _gen(tmp_path, "s.jsonl", "--class", "supermodular", "--n", "3", "--count", "5", "--seed", "3")
    lines = src.read_text().splitlines()
    rec = json.loads(lines[2])
    A = 0b011
    mu = SetFunction(3, rec["values"])
    rec["values"][A] = supermodular_range(mu, A).upper + 1e-3
    lines[2] = json.dumps(rec, separators=(", ", ": "))
    bad = tmp_path / "bad.jsonl"
    bad.write_text("\n".join(lines) + "\n")
    capsys.readouterr()
    assert main(["verify", str(bad)]) == EXIT_VERIFY
    out = capsys.readouterr().out
    assert "record 1: fails supermodular" in out
    assert "i=" in out and "j=" in out and "4/5 records pass" in out


def test_verify_truncated_exit_4(tmp_path):
    src = _gen(tmp_path, "s.jsonl", "--class", "normal", "--n", "3", "--count", "4")
    data = src.read_bytes()
    cut = tmp_path / "cut.jsonl"
    cut.write_bytes(data[: len(data) // 2])
    assert main(["verify", str(cut)]) == EXIT_IO
    cut.write_bytes(data[: data.rindex(b"\n", 0, len(data) - 1) + 1])
    assert main(["verify", str(cut)]) == EXIT_IO
    assert main(["verify", str(tmp_path / "missing.jsonl")]) == EXIT_IO


def test_verify_with_override(tmp_path):
    src = _gen(tmp_path, "s.jsonl", "--class", "normal", "--n", "4", "--count", "20")
    assert main(["verify", str(src), "--class", "supermodular"]) == EXIT_VERIFY


def test_dual_maps_tags_and_verifies(tmp_path):
    src = _gen(tmp_path, "s.jsonl", "--class", "supermodular", "--n", "4", "--count", "20")
    d1 = tmp_path / "d1.jsonl"
    assert main(["dual", str(src), "--out", str(d1)]) == EXIT_OK
    recs = _records(d1)
    assert all(r.tags == ("submodular",) and r.spec == {"class": "submodular"} for r in recs)
    assert main(["verify", str(d1)]) == EXIT_OK
    d2 = tmp_path / "d2.jsonl"
    assert main(["dual", str(d1), "--out", str(d2)]) == EXIT_OK
    for a, b in zip(_records(src), _records(d2)):
        assert a.tags == b.tags and a.spec == b.spec
        assert np.abs(np.subtract(a.values, b.values)).max() <= 2e-16


def test_dual_of_maxitive(tmp_path):
    src = _gen(tmp_path, "m.jsonl", "--class", "2-maxitive", "--n", "4", "--count", "10")
    d = tmp_path / "d.jsonl"
    assert main(["dual", str(src), "--out", str(d)]) == EXIT_OK
    assert all(r.tags == ("2-minitive",) for r in _records(d))


def test_dual_of_additive_is_identity(tmp_path):
    src = tmp_path / "add.jsonl"
    src.write_text((GOLDEN / "records_n2.jsonl").read_text())
    d = tmp_path / "d.jsonl"
    assert main(["dual", str(src), "--out", str(d)]) == EXIT_OK
    assert _records(d)[1].values == (0.0, 0.25, 0.75, 1.0)


def test_enumerate(capsys):
    assert main(["enumerate", "--n", "3", "--count-only"]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "48"
    assert main(["enumerate", "--n", "2"]) == EXIT_OK
    assert capsys.readouterr().out.splitlines() == ["[0, 1, 2, 3]", "[0, 2, 1, 3]"]
    assert main(["enumerate", "--n", "5"]) == EXIT_INFEASIBLE


def test_experiment_csv(tmp_path):
    out = tmp_path / "t.csv"
    assert main(["experiment", "--n", "3", "--num", "20", "--iterations", "2", "--seed", "1",
                 "--stderr", "--out", str(out)]) == EXIT_OK
    assert out.read_text() == (GOLDEN / "experiment_n3.csv").read_text()
    assert main(["experiment", "--n", "9", "--num", "5"]) == EXIT_INFEASIBLE
