import json

import pytest

from disambig.cli import main, oracle_check
from disambig.corpus import generate_corpus, save_corpus


@pytest.fixture(scope="module")
def small_corpus_path(tmp_path_factory):
    path = tmp_path_factory.mktemp("cli") / "small.jsonl"
    save_corpus(generate_corpus()[:1], path)
    return path


@pytest.fixture(scope="module")
def trace_dir(small_corpus_path, tmp_path_factory):
    out = tmp_path_factory.mktemp("cli-traces")
    code = main(["simulate", "--corpus", str(small_corpus_path),
                 "--out", str(out), "--noise", "mild", "--seed", "3"])
    assert code == 0
    return out


def test_gen_corpus(tmp_path, capsys):
    out = tmp_path / "c.jsonl"
    assert main(["gen-corpus", "--out", str(out)]) == 0
    assert "237" in capsys.readouterr().out
    lines = out.read_text().splitlines()
    assert len(lines) == 238  # header + one line per sentence
    assert json.loads(lines[0])["schema"] == "corpus-v1"


def test_simulate_writes_suite(trace_dir):
    files = sorted(p.name for p in trace_dir.iterdir())
    assert files == ["pp-001-i0-v0.jsonl", "pp-001-i0-v1.jsonl",
                     "pp-001-i1-v0.jsonl", "pp-001-i1-v1.jsonl"]


def test_score_exact_and_beam(trace_dir, capsys):
    trace = str(trace_dir / "pp-001-i0-v0.jsonl")
    formula = "and(chair(x), approach(Sam,x), bag(y), with(y,Sam))"
    assert main(["score", "--trace", trace, "--formula", formula]) == 0
    exact = float(capsys.readouterr().out.split()[-1])
    assert main(["score", "--trace", trace, "--formula", formula,
                 "--beam", "2"]) == 0
    beam = float(capsys.readouterr().out.split()[-1])
    assert beam <= exact + 1e-9


def test_score_dump_path(trace_dir, capsys):
    trace = str(trace_dir / "pp-001-i0-v0.jsonl")
    assert main(["score", "--trace", trace, "--formula",
                 "and(chair(x))", "--dump-path"]) == 0
    out = capsys.readouterr().out
    payload = json.loads(out[out.index("{"):])
    assert set(payload) == {"variables", "atoms", "detections", "states",
                            "breakdown"}


def test_disambiguate(small_corpus_path, trace_dir, capsys):
    assert main(["disambiguate", "--corpus", str(small_corpus_path),
                 "--trace", str(trace_dir / "pp-001-i1-v0.jsonl")]) == 0
    out = capsys.readouterr().out
    assert '"chosen": 1' in out
    assert '"correct": true' in out


def test_evaluate_small(small_corpus_path, tmp_path, capsys):
    report_path = tmp_path / "report.json"
    assert main(["evaluate", "--corpus", str(small_corpus_path),
                 "--noise", "none", "--seed", "0", "--variations", "1",
                 "--json", str(report_path)]) == 0
    out = capsys.readouterr().out
    assert "macro average" in out
    payload = json.loads(report_path.read_text())
    assert payload["per_class"] == {"PP": 1.0}


def test_oracle_check_cli(capsys):
    assert main(["oracle-check", "--n", "25", "--seed", "7"]) == 0
    assert "25/25 match" in capsys.readouterr().out


def test_oracle_check_function():
    assert oracle_check(10, seed=1) == (10, 10)


def test_usage_error_exits_2(capsys):
    assert main(["no-such-command"]) == 2
    assert main([]) == 2


def test_runtime_error_exits_1(tmp_path, capsys):
    missing = str(tmp_path / "missing.jsonl")
    assert main(["score", "--trace", missing, "--formula", "and(chair(x))"]) == 1
    assert "error:" in capsys.readouterr().err
