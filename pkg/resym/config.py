"""
config.py - Environment-driven settings.

Set in .env (next to this package) or in the process environment:
  RESYM_CACHE             path of the JSON-lines solution cache ("off" disables it)
  RESYM_RATIONAL_BUDGET   largest z tried by conic.solve_legendre
  RESYM_RELATIVE_BUDGET   largest coordinate height tried by conic.solve_relative_conic
  RESYM_SCAN_CEILING      largest --bound accepted by `resym scan`
  RESYM_AUX_PRIMES        auxiliary primes used by the empirical field checks
  RESYM_LOG_LEVEL         logging level for the CLI (default WARNING)
"""

import logging
import os
from dataclasses import dataclass
from typing import Optional

from dotenv import load_dotenv

logger = logging.getLogger(__name__)

dotenv_path = os.path.join(os.path.dirname(__file__), ".env")
if os.path.exists(dotenv_path):
    load_dotenv(dotenv_path=dotenv_path)

DEFAULT_CACHE_PATH = os.path.join(os.path.expanduser("~"), ".cache", "resym", "solutions.jsonl")


@dataclass(frozen=True)
class Settings:
    cache_path: Optional[str]     # None when the cache is switched off
    rational_budget: int          # z <= this
    relative_budget: int          # coordinate height <= this
    scan_ceiling: int
    aux_primes: int
    log_level: str


def _int_env(name: str, default: int) -> int:
    raw = os.getenv(name, "").strip()
    if not raw:
        return default
    try:
        value = int(raw)
    except ValueError:
        logger.warning("ignoring %s=%r: not an integer, using %d", name, raw, default)
        return default
    if value <= 0:
        logger.warning("ignoring %s=%r: must be positive, using %d", name, raw, default)
        return default
    return value


def load_settings() -> Settings:
    """Read the current environment. Called per use so tests can monkeypatch it."""
    cache = os.getenv("RESYM_CACHE", "").strip() or DEFAULT_CACHE_PATH
    if cache.lower() in ("off", "none", "0"):
        cache = None
    return Settings(
        cache_path=cache,
        rational_budget=_int_env("RESYM_RATIONAL_BUDGET", 10_000),
        relative_budget=_int_env("RESYM_RELATIVE_BUDGET", 1_000),
        scan_ceiling=_int_env("RESYM_SCAN_CEILING", 20_000),
        aux_primes=_int_env("RESYM_AUX_PRIMES", 20),
        log_level=os.getenv("RESYM_LOG_LEVEL", "WARNING").upper().strip() or "WARNING",
    )
