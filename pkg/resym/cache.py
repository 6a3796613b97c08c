"""
cache.py - Append-only JSON-lines cache of solver outputs.

Rows are CacheEntry records keyed by (kind, primes, avoid). The cache is a
hint: callers replay every hit through the independent checkers and fall back
to solving when the replay fails. A truncated trailing line (crash during
append) is skipped on load.
"""

import fcntl
import hashlib
import json
import logging
import os
import threading
from datetime import datetime, timezone
from typing import Dict, Iterable, Optional

from pydantic import ValidationError

from resym.config import load_settings
from resym.models import CacheEntry

logger = logging.getLogger(__name__)


def make_key(kind: str, primes: Iterable[int], avoid: Iterable[int] = ()) -> str:
    data = {
        "kind": kind,
        "primes": [str(p) for p in primes],
        "avoid": sorted(str(q) for q in set(avoid)),
    }
    content = json.dumps(data, sort_keys=True)
    return hashlib.sha256(content.encode()).hexdigest()


class SolutionCache:
    def __init__(self, path: str):
        self.path = path
        self._entries: Dict[str, CacheEntry] = {}
        self._lock = threading.Lock()
        self._load()

    def _load(self) -> None:
        if not os.path.exists(self.path):
            return
        with open(self.path, "r", encoding="utf-8") as f:
            for line_no, line in enumerate(f, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    entry = CacheEntry.model_validate_json(line)
                except (ValidationError, ValueError):
                    logger.warning("cache %s: skipping unreadable line %d", self.path, line_no)
                    continue
                self._entries[make_key(entry.kind, entry.primes, entry.avoid)] = entry
        logger.debug("cache %s: loaded %d entries", self.path, len(self._entries))

    def __len__(self) -> int:
        return len(self._entries)

    def get(self, kind: str, primes: Iterable[int], avoid: Iterable[int] = ()) -> Optional[CacheEntry]:
        return self._entries.get(make_key(kind, primes, avoid))

    def put(self, kind: str, primes: Iterable[int], avoid: Iterable[int],
            payload: dict, budget: int) -> CacheEntry:
        primes = [str(p) for p in primes]
        avoid = sorted(str(q) for q in set(avoid))
        entry = CacheEntry(kind=kind, primes=primes, avoid=avoid, payload=payload,
                           timestamp=datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ"),
                           budget=budget)
        key = make_key(kind, primes, avoid)
        with self._lock:
            if key in self._entries:
                return self._entries[key]
            self._entries[key] = entry
            directory = os.path.dirname(self.path)
            if directory:
                os.makedirs(directory, exist_ok=True)
            try:
                with open(self.path, "a", encoding="utf-8") as f:
                    fcntl.flock(f, fcntl.LOCK_EX)
                    try:
                        f.write(entry.model_dump_json() + "\n")
                        f.flush()
                    finally:
                        fcntl.flock(f, fcntl.LOCK_UN)
            except OSError as e:
                logger.warning("cache %s: append failed: %s", self.path, e)
        return entry


_default: Optional[SolutionCache] = None
_default_path: Optional[str] = None


def default_cache() -> Optional[SolutionCache]:
    """Process-wide cache at RESYM_CACHE, or None when it is switched off."""
    global _default, _default_path
    path = load_settings().cache_path
    if path is None:
        return None
    if _default is None or _default_path != path:
        _default = SolutionCache(path)
        _default_path = path
    return _default
