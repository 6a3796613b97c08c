import io
import os
import re

from resym.cache import SolutionCache, default_cache, make_key
from resym.config import load_settings
from resym.exporter import report_name, save_csv, save_json_report, write_corpus
from resym.models import CorpusLine, VerifyOutcome


# --- Solution cache ---

def test_key_ignores_avoid_order():
    assert make_key("legendre_eq", (5, 29), [449, 101]) == make_key("legendre_eq", (5, 29), [101, 449])
    assert make_key("legendre_eq", (5, 29)) != make_key("legendre_eq", (29, 5))


def test_put_get_and_reload(tmp_path):
    path = str(tmp_path / "cache" / "solutions.jsonl")
    cache = SolutionCache(path)
    cache.put("legendre_eq", (5, 29), (), {"x": "23"}, 100)
    assert cache.get("legendre_eq", (5, 29)).payload == {"x": "23"}
    assert SolutionCache(path).get("legendre_eq", (5, 29)).payload == {"x": "23"}


def test_first_write_wins(tmp_path):
    cache = SolutionCache(str(tmp_path / "c.jsonl"))
    cache.put("redei", (13, 61), (), {"v": 1}, 10)
    cache.put("redei", (13, 61), (), {"v": 2}, 10)
    assert cache.get("redei", (13, 61)).payload == {"v": 1}


def test_truncated_line_is_skipped(tmp_path):
    path = tmp_path / "c.jsonl"
    cache = SolutionCache(str(path))
    cache.put("redei", (13, 61), (), {"v": 1}, 10)
    with open(path, "a", encoding="utf-8") as f:
        f.write('{"kind": "redei", "primes": ["5"')
    assert len(SolutionCache(str(path))) == 1


def test_cache_switched_off():
    # conftest sets RESYM_CACHE=off
    assert load_settings().cache_path is None
    assert default_cache() is None


def test_settings_ignore_bad_integers(monkeypatch):
    monkeypatch.setenv("RESYM_RATIONAL_BUDGET", "lots")
    monkeypatch.setenv("RESYM_RELATIVE_BUDGET", "-3")
    s = load_settings()
    assert s.rational_budget == 10_000
    assert s.relative_budget == 1_000


# --- Exporter ---

def test_write_corpus_counts_lines():
    buf = io.StringIO()
    lines = [CorpusLine(kind="triple", primes=[13, 61, 937], symbol=-1, certificate={})]
    assert write_corpus(lines, buf) == 1
    assert buf.getvalue().count("\n") == 1


def test_save_csv_adds_timestamp(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    name = save_csv([VerifyOutcome(line_no=1, kind="triple", primes=(13, 61, 937), ok=True)], "verify.csv",
                    source="data/triples.jsonl")
    assert re.fullmatch(r"verify_triples_\d{8}T\d{6}Z\.csv", name)
    assert os.path.exists(name)
    assert save_csv([], "empty.csv") is None


def test_report_name_keeps_existing_files(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    first = report_name("report.json")
    open(first, "w").close()
    second = report_name("report.json")
    assert second != first
    assert re.fullmatch(r"report_\d{8}T\d{6}Z(-1)?\.json", second)


def test_save_json_report(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    name = save_json_report({"counts": {"triple": 1}}, "report.json")
    assert name.startswith("report_") and os.path.exists(name)
