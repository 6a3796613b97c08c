# report_builder.py

from datetime import datetime
from typing import Any, Dict, List, Tuple

import pandas as pd

from resym.exporter import read_corpus
from resym.models import CorpusLine
from resym.magnus import proper_shuffles
from resym.scan import shuffle_partitions


def build_corpus_report(path: str) -> Tuple[pd.DataFrame, Dict[str, Any]]:
    """
    Summarize a corpus file.

    Returns the per-line table and a dict with:
      - meta
      - counts           lines per kind
      - symbols          symbol distribution per kind
      - reciprocity      prime sets whose lines disagree (triples only)
      - shuffle          symbol-level shuffle products computable from the corpus
    """
    entries = read_corpus(path)
    lines = [item for _, item in entries if isinstance(item, CorpusLine)]
    df = _lines_to_frame(lines)

    meta: Dict[str, Any] = {
        "corpus": path,
        "lines": len(entries),
        "malformed": len(entries) - len(lines),
        "generated_at": datetime.now().strftime("%Y-%m-%d %H:%M"),
    }

    report: Dict[str, Any] = {
        "meta": meta,
        "counts": _counts(df),
        "symbols": _symbol_distribution(df),
        "reciprocity": _reciprocity(df),
        "shuffle": _shuffle_summary(df),
    }
    return df, report


# ================== helpers ================== #

def _lines_to_frame(lines: List[CorpusLine]) -> pd.DataFrame:
    rows = []
    for line in lines:
        row = {"kind": line.kind, "symbol": line.symbol,
               "primes": tuple(line.primes), "prime_set": tuple(sorted(line.primes))}
        for k, p in enumerate(line.primes, start=1):
            row[f"p{k}"] = p
        rows.append(row)
    columns = ["kind", "symbol", "primes", "prime_set", "p1", "p2", "p3", "p4"]
    return pd.DataFrame(rows, columns=columns)


def _counts(df: pd.DataFrame) -> Dict[str, int]:
    if df.empty:
        return {}
    return {str(k): int(v) for k, v in df.groupby("kind").size().items()}


def _symbol_distribution(df: pd.DataFrame) -> Dict[str, Dict[int, int]]:
    if df.empty:
        return {}
    out: Dict[str, Dict[int, int]] = {}
    for (kind, symbol), n in df.groupby(["kind", "symbol"]).size().items():
        out.setdefault(str(kind), {})[int(symbol)] = int(n)
    return out


def _reciprocity(df: pd.DataFrame) -> Dict[str, Any]:
    triples = df[df["kind"] == "triple"]
    if triples.empty:
        return {"sets": 0, "disagreeing": []}
    per_set = triples.groupby("prime_set")["symbol"].nunique()
    bad = [list(k) for k, v in per_set.items() if v > 1]
    return {"sets": int(len(per_set)), "disagreeing": bad}


def _shuffle_summary(df: pd.DataFrame) -> Dict[str, Any]:
    quads = df[df["kind"] == "quad"]
    values = {row.primes: int(row.symbol) for row in quads.itertuples()}
    computed, violations = 0, []
    for primes in values:
        for I, J, l in shuffle_partitions():
            needed = [tuple(primes[i - 1] for i in H) + (primes[l - 1],) for H in proper_shuffles(I, J)]
            if not all(q in values for q in needed):
                continue
            computed += 1
            product = 1
            for q in needed:
                product *= values[q]
            if product != 1:
                violations.append({"primes": list(primes), "I": list(I), "J": list(J), "l": l})
    return {"computed": computed, "vacuous": computed == 0, "violations": violations}
