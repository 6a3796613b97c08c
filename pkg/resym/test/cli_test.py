import json

import pytest
from click.testing import CliRunner

from resym.cli import cli, main


def _json(result) -> dict:
    return json.loads(result.stdout.splitlines()[0])


@pytest.fixture
def runner():
    return CliRunner()


# --- Symbols ---

def test_legendre(runner):
    result = runner.invoke(cli, ["legendre", "2", "7"])
    assert result.exit_code == 0
    out = _json(result)
    assert out["symbol"] == 1
    assert out["certificate"]["sqrt"] == "3"
    assert out["certificate"]["euler"] == "1"


def test_legendre_non_residue(runner):
    out = _json(runner.invoke(cli, ["legendre", "3", "7"]))
    assert out["symbol"] == -1
    assert out["certificate"]["sqrt"] is None


def test_legendre_composite_modulus(runner):
    result = runner.invoke(cli, ["legendre", "5", "9"])
    assert result.exit_code == 2
    assert _json(result) == {"error": "precondition", "failed": ["p odd prime"]}


def test_malformed_integer(runner):
    assert runner.invoke(cli, ["legendre", "abc", "7"]).exit_code == 1


def test_redei(runner):
    result = runner.invoke(cli, ["redei", "13", "61", "937"])
    assert result.exit_code == 0
    out = _json(result)
    assert out["symbol"] == -1
    assert out["certificate"]["p3"] == "937"


def test_redei_precondition(runner):
    result = runner.invoke(cli, ["redei", "5", "13", "29"])
    assert result.exit_code == 2
    assert "(p1/p2)" in _json(result)["failed"]


def test_quad(runner):
    result = runner.invoke(cli, ["quad", "5", "8081", "101", "449", "--crosscheck", "5"])
    assert result.exit_code == 0
    out = _json(result)
    assert out["symbol"] == -1
    assert out["certificate"]["certificate"]["case_tag"] == "Z_odd"


def test_quad_precondition(runner):
    result = runner.invoke(cli, ["quad", "17", "5", "13", "29"])
    assert result.exit_code == 2
    assert "p1 mod 8" in _json(result)["failed"]


# --- Magnus / group ---

def test_magnus_expand(runner):
    result = runner.invoke(cli, ["magnus", "expand", "x1 x1", "--deg", "3"])
    assert result.exit_code == 0
    assert result.stdout.strip() == "1 + X1X1"


def test_magnus_expand_identity(runner):
    result = runner.invoke(cli, ["magnus", "expand", "", "--deg", "2"])
    assert result.exit_code == 0
    assert result.stdout.strip() == "1"


def test_magnus_expand_bad_word(runner):
    assert runner.invoke(cli, ["magnus", "expand", "x1 y"]).exit_code == 1


def test_magnus_mu(runner):
    out = _json(runner.invoke(cli, ["magnus", "mu", "(x1 x2 x3 x2)^2", "--index", "123"]))
    assert out == {"index": "123", "mu2": 1, "fox": 1}


def test_group_check(runner):
    result = runner.invoke(cli, ["group", "check-n4", "--tau"])
    assert result.exit_code == 0
    assert result.stdout.splitlines()[0] == "8/8 relations OK, order 64"


# --- Corpora ---

def test_scan_verify_report(runner, tmp_path):
    corpus = tmp_path / "triples.jsonl"
    result = runner.invoke(cli, ["scan", "--kind", "triple", "--bound", "1000",
                                 "--primes", "13,61,937", "-o", str(corpus)])
    assert result.exit_code == 0
    assert len(corpus.read_text().splitlines()) == 1

    result = runner.invoke(cli, ["verify-corpus", str(corpus), "--aux-primes", "5"])
    assert result.exit_code == 0
    assert _json(result) == {"lines": 1, "ok": 1, "failed": 0}

    result = runner.invoke(cli, ["report", str(corpus)])
    assert result.exit_code == 0
    assert json.loads(result.stdout)["counts"] == {"triple": 1}


def test_verify_empty_corpus(runner, tmp_path):
    corpus = tmp_path / "empty.jsonl"
    corpus.write_text("")
    result = runner.invoke(cli, ["verify-corpus", str(corpus)])
    assert result.exit_code == 0


def test_verify_missing_corpus(runner):
    assert runner.invoke(cli, ["verify-corpus", "/nonexistent/x.jsonl"]).exit_code == 4


def test_verify_mismatch_exit_code(runner, tmp_path):
    corpus = tmp_path / "bad.jsonl"
    corpus.write_text("not json\n")
    assert runner.invoke(cli, ["verify-corpus", str(corpus)]).exit_code == 5


def test_usage_error_exits_1():
    with pytest.raises(SystemExit) as e:
        main(["no-such-command"])
    assert e.value.code == 1
