from __future__ import annotations

import subprocess
import sys

import pytest

from fairjoin.cli import main
from fairjoin.harness import read_csv
from fairjoin.matchers import AlgorithmId


def test_bench_writes_csv_and_svg(tmp_path, capsys):
    code = main(
        [
            "bench",
            "size",
            "--min-param", "1",
            "--max-param", "3",
            "--matches", "3",
            "--repetitions", "2",
            "--algorithms", "stateful, while-lazy",
            "--out", str(tmp_path),
        ]
    )
    assert code == 0
    parsed = read_csv(tmp_path / "size.csv")
    assert parsed.table.params == [1, 2, 3]
    assert parsed.table.algorithms == [AlgorithmId.STATEFUL_TREE, AlgorithmId.WHILE_LAZY]
    assert (tmp_path / "size.svg").read_text().startswith("<?xml")
    assert "rep 2" in capsys.readouterr().out


def test_bench_specific_flags(tmp_path):
    args = ["--min-param", "1", "--max-param", "1", "--out", str(tmp_path), "--no-plot", "--quiet"]
    assert main(["bench", "size-with-guards", "--variant", "non-satisfying", "--matches", "2", *args]) == 0
    assert main(["bench", "simple-smart-house", "--heavy-guard", "--heavy-guard-us", "10", "--matches", "2", *args]) == 0
    assert main(["bench", "bounded-buffer", "--bufferBound", "2", "--count", "5", *args]) == 0
    assert main(["bench", "complex-smart-house", "--matches", "3", "--algorithms", "filtering-parallel", "--workers", "2", *args]) == 0
    assert not (tmp_path / "size-with-guards.svg").exists()


@pytest.mark.parametrize(
    "argv",
    [
        ["bench", "no-such-benchmark"],
        ["bench", "size", "--algorithms", "teleport"],
        ["bench", "size", "--min-param", "4", "--max-param", "2"],
        ["bench", "size", "--variant", "loud"],
        ["bench", "bounded-buffer", "--bufferBound", "0"],
        ["example", "payment", "--algorithm", "nope"],
        [],
    ],
)
def test_usage_errors_exit_2(argv, capsys):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 2
    err = capsys.readouterr().err
    if "--algorithms" in argv or "nope" in argv:
        assert "valid names" in err and "while-lazy" in err
    if "no-such-benchmark" in argv:
        assert "valid names" in err and "bounded-buffer" in err


def test_example_payment_prints_transcript(capsys):
    assert main(["example", "payment", "--requests", "2"]) == 0
    out = capsys.readouterr().out
    assert "2 tokens generated, 2 payments succeeded" in out
    assert "payment succeeded" in out


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "fairjoin", "example", "payment", "--requests", "1", "--flow", "token"],
        capture_output=True,
        text=True,
        timeout=60,
    )
    assert proc.returncode == 0
    assert "1 tokens generated, 0 payments succeeded" in proc.stdout
