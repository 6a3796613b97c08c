"""
exporter.py - Corpus files and timestamped report files.

Exports used by scan.py and the CLI:
  - write_corpus(lines, stream), read_corpus(path)
  - report_name(filename, source), save_csv(rows, filename, source),
    save_json_report(report, filename, source)
"""

import csv
import json
import logging
import os
from dataclasses import asdict
from datetime import datetime, timezone
from typing import Any, Dict, IO, Iterable, List, Optional, Tuple, Union

from pydantic import ValidationError

from resym.errors import CorpusIOError
from resym.models import CorpusLine

logger = logging.getLogger(__name__)


def report_name(filename: str, source: Optional[str] = None) -> str:
    """
    'verify.csv' for corpus 'data/triples.jsonl' -> 'verify_triples_20261019T204512Z.csv'.
    UTC stamp; a -1, -2, ... suffix keeps an existing report.
    """
    base, ext = os.path.splitext(filename)
    if source:
        base += "_" + os.path.splitext(os.path.basename(source))[0]
    stem = f"{base}_{datetime.now(timezone.utc).strftime('%Y%m%dT%H%M%SZ')}"
    name, n = stem + ext, 0
    while os.path.exists(name):
        n += 1
        name = f"{stem}-{n}{ext}"
    return name


# ---- Corpus (JSON lines) ----

def write_corpus(lines: Iterable[CorpusLine], stream: IO[str]) -> int:
    count = 0
    for line in lines:
        stream.write(line.model_dump_json() + "\n")
        count += 1
    stream.flush()
    return count


def read_corpus(path: str) -> List[Tuple[int, Union[CorpusLine, str]]]:
    """
    (line number, CorpusLine) per non-blank line; a line that does not parse
    comes back as its error message. An unreadable file raises CorpusIOError.
    """
    try:
        with open(path, "r", encoding="utf-8") as f:
            raw = f.readlines()
    except OSError as e:
        raise CorpusIOError(f"cannot read corpus {path}: {e}") from e

    out: List[Tuple[int, Union[CorpusLine, str]]] = []
    for line_no, text in enumerate(raw, start=1):
        text = text.strip()
        if not text:
            continue
        try:
            out.append((line_no, CorpusLine.model_validate_json(text)))
        except (ValidationError, ValueError) as e:
            out.append((line_no, f"malformed line: {e}"))
    return out


# ---- Reports ----

def save_csv(data_list: List[object], filename: str, source: Optional[str] = None) -> Optional[str]:
    """
    Saves a list of dataclasses (verification outcomes, summary rows) to CSV
    with a timestamped filename.
    """
    if not data_list:
        logger.warning("no data to save for %s", filename)
        return None

    final_name = report_name(filename, source)
    rows = [asdict(item) for item in data_list]
    headers = rows[0].keys()

    try:
        with open(final_name, "w", newline="") as f:
            writer = csv.DictWriter(f, fieldnames=headers)
            writer.writeheader()
            writer.writerows(rows)
    except OSError as e:
        raise CorpusIOError(f"cannot write {final_name}: {e}") from e
    logger.info("saved report: %s", final_name)
    return final_name


def save_json_report(report: Dict[str, Any], filename: str, source: Optional[str] = None) -> str:
    final_name = report_name(filename, source)
    try:
        with open(final_name, "w", encoding="utf-8") as f:
            json.dump(report, f, indent=2, default=str)
    except OSError as e:
        raise CorpusIOError(f"cannot write {final_name}: {e}") from e
    logger.info("saved report: %s", final_name)
    return final_name
