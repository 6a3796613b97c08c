"""
scan.py - Admissible prime tuples below a bound, the parallel scan driver, and
corpus verification.

Exports used by the CLI:
  - candidate_triples(pool), candidate_quadruple_sets(pool, p1)
  - run_scan(kind, bound, jobs, ...)  -> iterator of CorpusLine, deterministic order
  - verify_corpus(path, ...)          -> list of VerifyOutcome
  - shuffle_partitions()
"""

import logging
import multiprocessing
from concurrent.futures import Executor, ProcessPoolExecutor, ThreadPoolExecutor
from itertools import combinations, groupby, permutations
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

from sympy import primerange
from tqdm import tqdm

from resym.arith import is_prime, legendre_symbol
from resym.config import load_settings
from resym.conic import (check_rational_solution, check_relative_solution, rational_from_record,
                         relative_from_record, shift_by_unit)
from resym.errors import InvalidInputError, ResymError
from resym.exporter import read_corpus
from resym.models import CorpusLine, RedeiRecord, SymbolRecord, VerifyOutcome
from resym.nilgroup import verify_tau_action
from resym.quadfield import class_number_is_one
from resym.redei import (RedeiCertificate, redei_certificate, redei_field_equal, redei_permutations,
                         redei_symbol, redei_to_record)
from resym.symbol4 import (compositum_crosscheck, shuffle_product, symbol4, symbol_to_record,
                           validate_quadruple)

logger = logging.getLogger(__name__)

KINDS = ("triple", "quad")


# ---------------------------------------------------------------------------
# Enumeration
# ---------------------------------------------------------------------------

def prime_pool(bound: int, primes: Optional[Iterable[int]] = None) -> List[int]:
    """Primes = 1 mod 4 below bound, optionally restricted to an explicit list."""
    source = primerange(5, bound) if primes is None else primes
    return sorted({p for p in source if p < bound and p % 4 == 1 and is_prime(p)})


def _adjacency(pool: Sequence[int]) -> Dict[int, set]:
    # (p/q) = (q/p) for p, q = 1 mod 4
    adj: Dict[int, set] = {p: set() for p in pool}
    for p, q in combinations(pool, 2):
        if legendre_symbol(p, q) == 1:
            adj[p].add(q)
            adj[q].add(p)
    return adj


def candidate_triples(pool: Sequence[int]) -> Iterator[Tuple[int, int, int]]:
    """p1 < p2 < p3 from pool with every pairwise symbol 1."""
    adj = _adjacency(pool)
    for a in pool:
        for b in sorted(q for q in adj[a] if q > a):
            for c in sorted(q for q in adj[a] & adj[b] if q > b):
                yield a, b, c


def candidate_quadruple_sets(pool: Sequence[int], p1: Optional[int] = None
                             ) -> Iterator[Tuple[int, Tuple[int, int, int]]]:
    """
    (p1, {p2 < p3 < p4}) with p1 = 5 mod 8, h(p1) = 1 and every pairwise
    symbol 1. Triple symbols are left to the workers.
    """
    pool = sorted(set(pool) | ({p1} if p1 is not None else set()))
    adj = _adjacency(pool)
    heads = [p1] if p1 is not None else [p for p in pool if p % 8 == 5]
    for head in heads:
        if head % 8 != 5 or not class_number_is_one(head):
            logger.info("skipping p1 = %d: not 5 mod 8 with class number one", head)
            continue
        others = sorted(adj[head])
        for a, b, c in candidate_triples(others):
            yield head, (a, b, c)


# ---------------------------------------------------------------------------
# Workers
# ---------------------------------------------------------------------------

def _triple_task(args) -> Tuple[List[CorpusLine], List[str]]:
    p1, p2, p3s, budget = args
    lines, errors = [], []
    try:
        cert = redei_certificate(p1, p2, budget=budget)
    except ResymError as e:
        return lines, [f"({p1}, {p2}): {e}"]
    for p3 in p3s:
        try:
            res = redei_symbol(p1, p2, p3, budget=budget, certificate=cert)
        except ResymError as e:
            errors.append(f"({p1}, {p2}, {p3}): {e}")
            continue
        lines.append(CorpusLine(kind="triple", primes=[p1, p2, p3], symbol=res.value,
                                certificate=redei_to_record(res).model_dump()))
    return lines, errors


def _quad_task(args) -> Tuple[List[CorpusLine], List[str]]:
    p1, rest, rational_budget, relative_budget = args
    lines: List[CorpusLine] = []
    try:
        if not validate_quadruple(p1, *rest, budget=rational_budget).ok:
            return lines, []
        for perm in permutations(rest):
            res = symbol4(p1, *perm, rational_budget=rational_budget, relative_budget=relative_budget)
            lines.append(CorpusLine(kind="quad", primes=[p1, *perm], symbol=res.value,
                                    certificate=symbol_to_record(res).model_dump()))
    except ResymError as e:
        return [], [f"({p1}, {', '.join(map(str, rest))}): {e}"]
    return lines, []


def _make_executor(jobs: int) -> Optional[Executor]:
    """
    Process pool with 'fork' so workers inherit the loaded modules; threads
    when fork is unavailable; None for a serial run.
    """
    if jobs <= 1:
        return None
    try:
        ctx = multiprocessing.get_context("fork")
        return ProcessPoolExecutor(max_workers=jobs, mp_context=ctx)
    except ValueError as e:
        logger.warning("process pool with fork unavailable (%s), using threads", e)
        return ThreadPoolExecutor(max_workers=jobs)


def _tasks(kind: str, pool: Sequence[int], p1: Optional[int], rational_budget: int,
           relative_budget: int) -> List[tuple]:
    if kind == "triple":
        triples = candidate_triples(pool if p1 is None else [q for q in pool if q >= p1])
        if p1 is not None:
            triples = (t for t in triples if t[0] == p1)
        return [(a, b, [t[2] for t in group], rational_budget)
                for (a, b), group in groupby(triples, key=lambda t: (t[0], t[1]))]
    return [(head, rest, rational_budget, relative_budget)
            for head, rest in candidate_quadruple_sets(pool, p1)]


def run_scan(kind: str, bound: int, jobs: int = 1, p1: Optional[int] = None,
             limit: Optional[int] = None, primes: Optional[Iterable[int]] = None,
             progress: bool = True) -> Iterator[CorpusLine]:
    """
    Corpus lines for every admissible tuple below bound, in enumeration order
    whatever the job count. limit caps the number of admissible tuples
    (triples, or prime sets for quads).
    """
    settings = load_settings()
    if kind not in KINDS:
        raise InvalidInputError(f"kind must be one of {KINDS}, got {kind!r}")
    if bound > settings.scan_ceiling:
        raise InvalidInputError(f"bound {bound} exceeds the scan ceiling {settings.scan_ceiling}")

    pool = prime_pool(bound, primes)
    tasks = _tasks(kind, pool, p1, settings.rational_budget, settings.relative_budget)
    worker = _triple_task if kind == "triple" else _quad_task
    logger.info("scan %s below %d: %d tasks over %d primes, %d jobs", kind, bound, len(tasks), len(pool), jobs)

    executor = _make_executor(jobs)
    results = executor.map(worker, tasks) if executor is not None else map(worker, tasks)
    emitted = 0
    try:
        for lines, errors in tqdm(results, total=len(tasks), desc=f"scan {kind}",
                                  disable=not progress, unit="task"):
            for err in errors:
                logger.warning("scan: %s", err)
            if kind == "quad" and lines:
                emitted += 1
            for line in lines:
                yield line
                if kind == "triple":
                    emitted += 1
                    if limit is not None and emitted >= limit:
                        return
            if limit is not None and emitted >= limit:
                return
    finally:
        if executor is not None:
            executor.shutdown(wait=True, cancel_futures=True)


# ---------------------------------------------------------------------------
# Verification
# ---------------------------------------------------------------------------

def shuffle_partitions() -> List[Tuple[Tuple[int, ...], Tuple[int, ...], int]]:
    """(I, J, l): l one position, I a single position, J the other two in order."""
    out = []
    for l in range(1, 5):
        rest = [k for k in range(1, 5) if k != l]
        for i in rest:
            out.append(((i,), tuple(k for k in rest if k != i), l))
    return out


def _verify_triple(line: CorpusLine, aux_primes: int, budget: int) -> Optional[str]:
    primes = tuple(line.primes)
    if len(primes) != 3:
        return f"expected 3 primes, got {len(primes)}"
    record = RedeiRecord.model_validate(line.certificate)
    stored = rational_from_record(record.solution)
    check_rational_solution(stored)
    for perm, value in redei_permutations(*primes, budget=budget).items():
        if value != line.symbol:
            return f"reciprocity: [{', '.join(map(str, perm))}] = {value}, corpus says {line.symbol}"
    cert = RedeiCertificate(p1=stored.p1, p2=stored.p2, solution=stored, alpha=stored.alpha)
    shifted = shift_by_unit(stored)
    other = RedeiCertificate(p1=shifted.p1, p2=shifted.p2, solution=shifted, alpha=shifted.alpha)
    if not redei_field_equal(cert, other, aux_primes):
        return "unit-shifted solution gives a different Redei field"
    return None


def _verify_quad(line: CorpusLine, aux_primes: int, rational_budget: int,
                 relative_budget: int) -> Optional[str]:
    primes = tuple(line.primes)
    if len(primes) != 4:
        return f"expected 4 primes, got {len(primes)}"
    record = SymbolRecord.model_validate(line.certificate)
    check_rational_solution(rational_from_record(record.certificate.redei))
    check_relative_solution(relative_from_record(record.certificate.relsol))

    res = symbol4(*primes, rational_budget=rational_budget, relative_budget=relative_budget)
    if res.value != line.symbol:
        return f"symbol recomputed as {res.value}, corpus says {line.symbol}"
    if not compositum_crosscheck(res.certificate, aux_primes):
        return "compositum cross-check failed"
    tau = verify_tau_action(res.certificate)
    if not tau.ok:
        return f"tau action: {tau.summary()}"
    for I, J, l in shuffle_partitions():
        product = shuffle_product(primes, I, J, l, rational_budget=rational_budget,
                                  relative_budget=relative_budget)
        if product is not None and product != 1:
            return f"shuffle product over I={I}, J={J}, l={l} is {product}"
    return None


def verify_corpus(path: str, aux_primes: Optional[int] = None) -> List[VerifyOutcome]:
    """Recompute every line; CorpusIOError when the file cannot be read."""
    settings = load_settings()
    aux = settings.aux_primes if aux_primes is None else aux_primes
    outcomes = []
    for line_no, item in read_corpus(path):
        if isinstance(item, str):
            outcomes.append(VerifyOutcome(line_no=line_no, kind="?", primes=(), ok=False, detail=item))
            continue
        try:
            if item.kind == "triple":
                detail = _verify_triple(item, aux, settings.rational_budget)
            else:
                detail = _verify_quad(item, aux, settings.rational_budget, settings.relative_budget)
        except (ResymError, ValueError) as e:
            detail = f"{type(e).__name__}: {e}"
        if detail:
            logger.warning("corpus line %d: %s", line_no, detail)
        outcomes.append(VerifyOutcome(line_no=line_no, kind=item.kind, primes=tuple(item.primes),
                                      ok=detail is None, detail=detail))
    return outcomes
