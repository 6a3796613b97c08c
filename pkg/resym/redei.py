"""
redei.py - The Redei extension k_{p1,p2} = Q(sqrt p1, sqrt p2, sqrt alpha) and
the triple symbol [p1, p2, p3].

Splitting of p3 is read off residue characters: p3 splits in Q(sqrt p1,
sqrt p2) by the preconditions, so it splits completely in k_{p1,p2} iff
alpha is a square at one (hence every) embedding sqrt p1 -> s1 mod p3.
"""

import logging
from dataclasses import dataclass
from itertools import permutations
from typing import Dict, Iterable, Iterator, List, Optional, Tuple

from sympy import nextprime

from resym.arith import is_prime, legendre_symbol, sqrt_mod
from resym.cache import SolutionCache
from resym.conic import RationalConicSolution, rational_to_record, solve_legendre
from resym.errors import InvalidInputError, InvariantViolation, PreconditionError
from resym.models import RedeiRecord
from resym.quadfield import QuadInt

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RedeiCertificate:
    p1: int
    p2: int
    solution: RationalConicSolution
    alpha: QuadInt


@dataclass(frozen=True)
class RedeiResult:
    p3: int
    value: int
    s1: int                 # sqrt(p1) mod p3 used for the character
    residue: int            # x + y*s1 mod p3
    certificate: RedeiCertificate


def pairwise_failures(primes: Tuple[int, ...], names: Tuple[str, ...]) -> List[str]:
    """Primality, 1 mod 4, distinctness and every ordered Legendre symbol."""
    failed = []
    for p, n in zip(primes, names):
        if not is_prime(p) or p == 2:
            failed.append(f"{n} odd prime")
        elif p % 4 != 1:
            failed.append(f"{n} mod 4")
    if len(set(primes)) != len(primes):
        failed.append("distinct primes")
    if failed:
        return failed
    for (p, n), (q, o) in permutations(zip(primes, names), 2):
        if legendre_symbol(p, q) != 1:
            failed.append(f"({n}/{o})")
    return failed


def triple_precheck(p1: int, p2: int, p3: int) -> List[str]:
    """Failing admissibility clauses of a triple."""
    return pairwise_failures((p1, p2, p3), ("p1", "p2", "p3"))


def redei_certificate(p1: int, p2: int, avoid: Iterable[int] = (), budget: Optional[int] = None,
                      cache: Optional[SolutionCache] = None) -> RedeiCertificate:
    sol = solve_legendre(p1, p2, avoid=avoid, budget=budget, cache=cache)
    return RedeiCertificate(p1=p1, p2=p2, solution=sol, alpha=sol.alpha)


def splitting_character(cert: RedeiCertificate, q: int, root: Optional[int] = None) -> int:
    """legendre(x + y*s, q) for s = sqrt(p1) mod q."""
    s = sqrt_mod(cert.p1, q) if root is None else root
    sol = cert.solution
    return legendre_symbol(sol.x + sol.y * s, q)


def redei_symbol(p1: int, p2: int, p3: int, budget: Optional[int] = None,
                 cache: Optional[SolutionCache] = None,
                 certificate: Optional[RedeiCertificate] = None) -> RedeiResult:
    """
    [p1, p2, p3]. A certificate for (p1, p2) whose z is prime to p3 may be
    passed in to skip the conic solve (scan mode reuses one per pair).
    """
    failed = triple_precheck(p1, p2, p3)
    if failed:
        raise PreconditionError(failed)

    cert = certificate
    if cert is None or (cert.p1, cert.p2) != (p1, p2) or cert.solution.z % p3 == 0:
        cert = redei_certificate(p1, p2, avoid={p3}, budget=budget, cache=cache)
    s1 = sqrt_mod(p1, p3)
    x, y = cert.solution.x, cert.solution.y
    residue = (x + y * s1) % p3
    if residue == 0:
        # z is prime to p3, so x + y*s1 = 0 mod p3 would force p3 | z
        raise InvariantViolation(f"zero residue of alpha mod {p3} with p3 avoided",
                                 dump=rational_to_record(cert.solution).model_dump())

    value = legendre_symbol(residue, p3)
    other = legendre_symbol(x - y * s1, p3)
    if other != value:
        raise InvariantViolation(f"[{p1},{p2},{p3}] depends on the choice of sqrt({p1}) mod {p3}",
                                 dump={"s1": s1, "values": [value, other]})
    logger.info("[%d, %d, %d] = %d", p1, p2, p3, value)
    return RedeiResult(p3=p3, value=value, s1=s1, residue=residue, certificate=cert)


def redei_permutations(p1: int, p2: int, p3: int, budget: Optional[int] = None,
                       cache: Optional[SolutionCache] = None) -> Dict[Tuple[int, int, int], int]:
    """Symbol values for all six orderings; equal by reciprocity."""
    return {perm: redei_symbol(*perm, budget=budget, cache=cache).value
            for perm in permutations((p1, p2, p3))}


def auxiliary_primes(p1: int, p2: int, start: int = 3) -> Iterator[int]:
    """Primes q = 1 mod 4 with (p1/q) = (p2/q) = 1, q not in {p1, p2}, ascending."""
    q = start - 1
    while True:
        q = nextprime(q)
        if q in (p1, p2) or q % 4 != 1:
            continue
        if legendre_symbol(p1, q) == 1 and legendre_symbol(p2, q) == 1:
            yield q


def redei_field_equal(cert1: RedeiCertificate, cert2: RedeiCertificate, trial_primes: int) -> bool:
    """
    Empirical test that two solutions give the same Redei field: splitting
    indicators agree at `trial_primes` auxiliary primes.
    """
    if (cert1.p1, cert1.p2) != (cert2.p1, cert2.p2):
        raise InvalidInputError("certificates belong to different prime pairs")
    checked = 0
    for q in auxiliary_primes(cert1.p1, cert1.p2):
        if checked >= trial_primes:
            break
        s = sqrt_mod(cert1.p1, q)
        c1 = splitting_character(cert1, q, s)
        c2 = splitting_character(cert2, q, s)
        if c1 == 0 or c2 == 0:
            continue
        if c1 != c2:
            logger.info("Redei fields differ at q = %d", q)
            return False
        checked += 1
    return True


def redei_to_record(result: RedeiResult) -> RedeiRecord:
    cert = result.certificate
    return RedeiRecord(p1=str(cert.p1), p2=str(cert.p2), p3=str(result.p3), symbol=result.value,
                       s1=str(result.s1), residue=str(result.residue),
                       solution=rational_to_record(cert.solution))
