"""
symbol4.py - The degree-64 field K = Q(sqrt theta_1, ..., sqrt theta_4) and the
4-th multiple residue symbol [p1, p2, p3, p4].

Exports used by the CLI, scan.py and nilgroup.py:
  - validate_quadruple(p1, p2, p3, p4) -> ValidationReport
  - KCertificate, build_K(p1, p2, p3), assemble_K(redei, relsol), check_certificate(cert)
  - SymbolResult, symbol4(p1, p2, p3, p4), evaluate_symbol(cert, p4)
  - generator_characters(cert, p4, s1, s3), theta_prime_characters(cert, p4, s1, sa, sb)
  - cross_field_generator(cert), compositum_crosscheck(cert, trial_primes)
  - shuffle_product(primes, I, J, l)
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, product
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from resym.arith import legendre_symbol, sqrt_mod
from resym.biquad import BiquadInt
from resym.cache import SolutionCache
from resym.conic import (RelativeConicSolution, check_rational_solution,
                         check_relative_solution, rational_to_record, relative_to_record,
                         solve_relative_conic)
from resym.errors import InvalidInputError, InvariantViolation, PreconditionError
from resym.magnus import proper_shuffles
from resym.models import KCertificateRecord, SymbolRecord, ValidationReport, biquad_record
from resym.quadfield import QuadInt, class_number_is_one, embed_mod
from resym.redei import (RedeiCertificate, auxiliary_primes, pairwise_failures,
                         redei_certificate, redei_symbol, splitting_character)

logger = logging.getLogger(__name__)

NAMES = ("p1", "p2", "p3", "p4")


# ---------------------------------------------------------------------------
# Preconditions
# ---------------------------------------------------------------------------

@lru_cache(maxsize=4096)
def _pair_certificate(p1: int, p2: int, budget: Optional[int],
                      cache: Optional[SolutionCache]) -> RedeiCertificate:
    return redei_certificate(p1, p2, budget=budget, cache=cache)


def _triple_symbol_failures(primes: Sequence[int], names: Sequence[str],
                            budget: Optional[int], cache: Optional[SolutionCache]) -> List[str]:
    failed = []
    for idx in combinations(range(len(primes)), 3):
        triple = tuple(primes[i] for i in idx)
        pair = _pair_certificate(triple[0], triple[1], budget, cache)
        if redei_symbol(*triple, budget=budget, cache=cache, certificate=pair).value != 1:
            failed.append("[" + ",".join(names[i] for i in idx) + "]")
    return failed


def _admissibility_failures(primes: Sequence[int], budget: Optional[int],
                            cache: Optional[SolutionCache]) -> List[str]:
    names = NAMES[:len(primes)]
    failed = []
    if primes[0] % 8 != 5:
        failed.append("p1 mod 8")
    failed.extend(f for f in pairwise_failures(tuple(primes), names) if f != "p1 mod 4")
    if failed:
        return failed
    if not class_number_is_one(primes[0]):
        failed.append("h(p1)=1")
    failed.extend(_triple_symbol_failures(primes, names, budget, cache))
    return failed


def validate_quadruple(p1: int, p2: int, p3: int, p4: int, budget: Optional[int] = None,
                       cache: Optional[SolutionCache] = None) -> ValidationReport:
    """Every failing admissibility clause is listed, not just the first."""
    primes = (p1, p2, p3, p4)
    return ValidationReport(primes=primes, failed=_admissibility_failures(primes, budget, cache))


# ---------------------------------------------------------------------------
# The field K
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class KCertificate:
    p1: int
    p2: int
    p3: int
    redei: RedeiCertificate
    relsol: RelativeConicSolution
    case_tag: str
    thetas: Tuple[BiquadInt, ...]           # theta_i (Z_odd) or eta_i (Y_odd), in Q(sqrt p1, sqrt p3)
    theta_primes: Tuple[BiquadInt, ...]     # X +- Z sqrt(alpha) and conjugates; empty for Z_odd
    h: int


def _conjugate_generators(X: QuadInt, W: QuadInt, beta: QuadInt, beta_bar: QuadInt,
                          scale: int = 1) -> Tuple[BiquadInt, ...]:
    """scale*(X + W r), scale*(X - W r), scale*(Xb + Wb rb), scale*(Xb - Wb rb)."""
    Xb, Wb = X.conj(), W.conj()
    return (
        BiquadInt.from_pair(X * scale, W * scale, beta),
        BiquadInt.from_pair(X * scale, -W * scale, beta),
        BiquadInt.from_pair(Xb * scale, Wb * scale, beta_bar),
        BiquadInt.from_pair(Xb * scale, -Wb * scale, beta_bar),
    )


def build_K(p1: int, p2: int, p3: int, avoid: Iterable[int] = (),
            rational_budget: Optional[int] = None, relative_budget: Optional[int] = None,
            cache: Optional[SolutionCache] = None) -> KCertificate:
    failed = _admissibility_failures((p1, p2, p3), rational_budget, cache)
    if failed:
        raise PreconditionError(failed)
    avoid = set(avoid)

    redei = redei_certificate(p1, p2, avoid=avoid, budget=rational_budget, cache=cache)
    alpha = redei.alpha
    relsol = solve_relative_conic(p1, p3, alpha, avoid=avoid, budget=relative_budget, cache=cache)
    return assemble_K(redei, relsol)


def assemble_K(redei: RedeiCertificate, relsol: RelativeConicSolution) -> KCertificate:
    """Generators of K from given Redei and relative-conic solutions, checked."""
    if relsol.p1 != redei.p1 or relsol.alpha != redei.alpha:
        raise InvalidInputError("relative solution was not built over this Redei element")
    p1, p2, p3 = redei.p1, redei.p2, relsol.p3
    alpha = redei.alpha
    X, Y, Z = relsol.X, relsol.Y, relsol.Z
    beta13 = QuadInt.rational(p3, p1)

    h = abs(redei.solution.z * Z.norm())
    if relsol.case_tag == "Z_odd":
        thetas = _conjugate_generators(X, Y, beta13, beta13)
        theta_primes: Tuple[BiquadInt, ...] = ()
    else:
        thetas = _conjugate_generators(X, Y, beta13, beta13, scale=2)
        theta_primes = _conjugate_generators(X, Z, alpha, alpha.conj())

    cert = KCertificate(p1=p1, p2=p2, p3=p3, redei=redei, relsol=relsol,
                        case_tag=relsol.case_tag, thetas=thetas, theta_primes=theta_primes, h=h)
    check_certificate(cert)
    logger.info("built K for (%d, %d, %d): case %s, h = %d", p1, p2, p3, cert.case_tag, h)
    return cert


def _k13(n: QuadInt, p3: int) -> BiquadInt:
    return BiquadInt.from_k(n, QuadInt.rational(p3, n.d))


def check_certificate(cert: KCertificate) -> None:
    """Exact algebraic identities of K; raises InvariantViolation with a dump."""
    check_rational_solution(cert.redei.solution)
    check_relative_solution(cert.relsol)
    p1, p2, p3 = cert.p1, cert.p2, cert.p3
    X, Y, Z = cert.relsol.X, cert.relsol.Y, cert.relsol.Z
    alpha = cert.redei.alpha
    t1, t2, t3, t4 = cert.thetas
    scale = 1 if cert.case_tag == "Z_odd" else 2
    failures = []

    if t1 * t2 != _k13(alpha * Z * Z * (scale * scale), p3):
        failures.append("theta1*theta2 != alpha Z^2")
    total = t1 * t2 * t3 * t4
    if total != _k13(QuadInt.rational(scale ** 4 * p2 * cert.h ** 2, p1), p3):
        failures.append("theta1*theta2*theta3*theta4 != p2 h^2")
    if t1.conj_beta() != t2 or t1.conj_m() != t3 or t3.conj_beta() != t4:
        failures.append("generators are not conjugate")
    s12, s13 = (t1 + t2).coords4(), (t1 + t3).coords4()
    if s12[2] or s12[3] or s13[1] or s13[3] or s12[0] != s13[0]:
        failures.append("theta1 + theta2, theta1 + theta3 coordinate identities")

    if cert.case_tag == "Y_odd":
        q1, q2, q3, q4 = cert.theta_primes
        n12, n34 = q1 * q2, q3 * q4
        if not (n12.is_in_k() and n34.is_in_k()):
            failures.append("theta'1 theta'2 not in k")
        elif n12.u != Y * Y * p3 or n12.u * n34.u != QuadInt.rational(p3 * p3 * Y.norm() ** 2, p1):
            failures.append("theta'1 theta'2 theta'3 theta'4 != p3^2 (Y Ybar)^2")

    if failures:
        raise InvariantViolation("K certificate: " + "; ".join(failures),
                                 dump=certificate_to_record(cert).model_dump())


def cross_field_generator(cert: KCertificate) -> QuadInt:
    """theta1*theta3 (or eta1*eta3) as an element of Q(sqrt p3)."""
    prod = cert.thetas[0] * cert.thetas[2]
    c0, c1, c2, c3 = prod.coords4()
    if c1 or c3 or c0 % 2 or c2 % 2:
        raise InvariantViolation("theta1*theta3 is not in Q(sqrt p3)", dump={"coords": [c0, c1, c2, c3]})
    return QuadInt(c0 // 2, c2 // 2, cert.p3)


# ---------------------------------------------------------------------------
# The symbol
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SymbolResult:
    p4: int
    value: int
    certificate: KCertificate
    embedding_roots: Dict[str, int]
    characters: Tuple[int, ...]


def _embed(x: BiquadInt, s1: int, s_beta: int, p: int) -> int:
    """Image in F_p under sqrt m -> s1, sqrt beta -> s_beta."""
    c0, c1, c2, c3 = x.coords4()
    return (c0 + c1 * s1 + c2 * s_beta + c3 * s1 * s_beta) * pow(4, -1, p) % p


def _characters(gens: Sequence[BiquadInt], s1: int, s3: int, p4: int) -> Tuple[int, ...]:
    return tuple(legendre_symbol(_embed(g, s1, s3, p4), p4) for g in gens)


def _value(chars: Sequence[int]) -> int:
    if 0 in chars:
        raise InvariantViolation("zero residue of a generator mod p4 with p4 avoided",
                                 dump={"characters": list(chars)})
    return 1 if all(c == 1 for c in chars) else -1


def symbol4(p1: int, p2: int, p3: int, p4: int, rational_budget: Optional[int] = None,
            relative_budget: Optional[int] = None,
            cache: Optional[SolutionCache] = None) -> SymbolResult:
    report = validate_quadruple(p1, p2, p3, p4, budget=rational_budget, cache=cache)
    if not report.ok:
        raise PreconditionError(report.failed)

    cert = build_K(p1, p2, p3, avoid={p4}, rational_budget=rational_budget,
                   relative_budget=relative_budget, cache=cache)
    return evaluate_symbol(cert, p4)


def generator_characters(cert: KCertificate, p4: int, s1: int, s3: int) -> Tuple[int, ...]:
    """Legendre symbols mod p4 of the generators under sqrt p1 -> s1, sqrt p3 -> s3."""
    if (s1 * s1 - cert.p1) % p4 or (s3 * s3 - cert.p3) % p4:
        raise InvalidInputError(f"({s1}, {s3}) are not square roots of ({cert.p1}, {cert.p3}) mod {p4}")
    return _characters(cert.thetas, s1, s3, p4)


def theta_prime_characters(cert: KCertificate, p4: int, s1: int, s_alpha: int,
                           s_alpha_bar: int) -> Tuple[int, ...]:
    """Legendre symbols mod p4 of X +- Z sqrt(alpha) and X' +- Z' sqrt(alpha')."""
    if cert.case_tag != "Y_odd":
        raise InvalidInputError("theta' generators exist only in the Y_odd case")
    q1, q2, q3, q4 = cert.theta_primes
    return (
        legendre_symbol(_embed(q1, s1, s_alpha, p4), p4),
        legendre_symbol(_embed(q2, s1, s_alpha, p4), p4),
        legendre_symbol(_embed(q3, s1, s_alpha_bar, p4), p4),
        legendre_symbol(_embed(q4, s1, s_alpha_bar, p4), p4),
    )


def evaluate_symbol(cert: KCertificate, p4: int) -> SymbolResult:
    """
    [p1, p2, p3, p4] from a built K: 1 iff p4 splits completely, read off the
    generators at every choice of embedding roots.
    """
    p1, p2, p3 = cert.p1, cert.p2, cert.p3
    s1, s3 = sqrt_mod(p1, p4), sqrt_mod(p3, p4)
    if s1 is None or s3 is None:
        raise PreconditionError(["(p1/p4)" if s1 is None else "(p3/p4)"])
    chars = _characters(cert.thetas, s1, s3, p4)
    value = _value(chars)

    for e1, e3 in product((1, -1), repeat=2):
        other = _value(_characters(cert.thetas, e1 * s1 % p4, e3 * s3 % p4, p4))
        if other != value:
            raise InvariantViolation("symbol depends on the embedding",
                                     dump={"s1": s1, "s3": s3, "signs": [e1, e3]})

    # F = Q(sqrt p1, sqrt p2, sqrt p3, sqrt theta1 theta2, sqrt theta1 theta3) splits p4
    if chars[0] * chars[1] != 1 or chars[0] * chars[2] != 1:
        raise InvariantViolation("p4 does not split in the degree-32 subfield F",
                                 dump={"characters": list(chars)})

    roots = {"s1": s1, "s3": s3}
    if cert.case_tag == "Y_odd":
        sol = cert.redei.solution
        s_alpha = sqrt_mod(sol.x + sol.y * s1, p4)
        s_alpha_bar = sqrt_mod(sol.x - sol.y * s1, p4)
        if s_alpha is None or s_alpha_bar is None:
            raise InvariantViolation("alpha is not a square mod p4 although [p1,p2,p4] = 1",
                                     dump={"s1": s1})
        roots["s_alpha"] = s_alpha
        for ea, eb in product((1, -1), repeat=2):
            prime_chars = theta_prime_characters(cert, p4, s1, ea * s_alpha % p4, eb * s_alpha_bar % p4)
            if _value(prime_chars) != value:
                raise InvariantViolation("theta' and eta generators disagree on splitting",
                                         dump={"eta": list(chars), "theta_prime": list(prime_chars)})

    logger.info("[%d, %d, %d, %d] = %d", p1, p2, p3, p4, value)
    return SymbolResult(p4=p4, value=value, certificate=cert, embedding_roots=roots, characters=chars)


def compositum_crosscheck(cert: KCertificate, trial_primes: int) -> bool:
    """
    Splitting of q in Q(sqrt p3, sqrt theta1 theta3) against [p3, p2, q] at
    `trial_primes` auxiliary primes.
    """
    if trial_primes <= 0:
        return True
    g = cross_field_generator(cert)
    other = redei_certificate(cert.p3, cert.p2)
    checked = 0
    for q in auxiliary_primes(cert.p3, cert.p2):
        if checked >= trial_primes:
            break
        if cert.h % q == 0:
            continue
        s3 = sqrt_mod(cert.p3, q)
        ours = legendre_symbol(embed_mod(g, s3, q), q)
        theirs = splitting_character(other, q, s3)
        if ours == 0 or theirs == 0:
            continue
        if ours != theirs:
            logger.info("compositum check failed at q = %d", q)
            return False
        checked += 1
    return True


def shuffle_product(primes: Sequence[int], I: Sequence[int], J: Sequence[int], l: int,
                    rational_budget: Optional[int] = None, relative_budget: Optional[int] = None,
                    cache: Optional[SolutionCache] = None) -> Optional[int]:
    """
    Product of [p_H1, p_H2, p_H3, p_l] over proper shuffles H of the position
    multi-indices I and J; None when a permuted quadruple is not admissible.
    """
    positions = list(I) + list(J) + [l]
    if sorted(positions) != [1, 2, 3, 4]:
        raise InvalidInputError("I, J and l must partition the positions 1..4")
    result = 1
    for H in proper_shuffles(tuple(I), tuple(J)):
        quad = tuple(primes[i - 1] for i in H) + (primes[l - 1],)
        if not validate_quadruple(*quad, budget=rational_budget, cache=cache).ok:
            return None
        result *= symbol4(*quad, rational_budget=rational_budget,
                          relative_budget=relative_budget, cache=cache).value
    return result


# ---------------------------------------------------------------------------
# Records
# ---------------------------------------------------------------------------

def certificate_to_record(cert: KCertificate) -> KCertificateRecord:
    return KCertificateRecord(
        p1=str(cert.p1), p2=str(cert.p2), p3=str(cert.p3), case_tag=cert.case_tag, h=str(cert.h),
        redei=rational_to_record(cert.redei.solution), relsol=relative_to_record(cert.relsol),
        thetas=[biquad_record(t) for t in cert.thetas],
        theta_primes=[biquad_record(t) for t in cert.theta_primes])


def symbol_to_record(result: SymbolResult) -> SymbolRecord:
    cert = result.certificate
    return SymbolRecord(
        p1=str(cert.p1), p2=str(cert.p2), p3=str(cert.p3), p4=str(result.p4),
        symbol=result.value, embedding_roots={k: str(v) for k, v in result.embedding_roots.items()},
        characters=list(result.characters), certificate=certificate_to_record(cert))
