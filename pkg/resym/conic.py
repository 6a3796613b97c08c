"""
conic.py - Solvers for the two ternary quadratic equations.

  x^2 - p1 y^2 - p2 z^2 = 0          over Z     (the Redei element alpha)
  X^2 - p3 Y^2 - alpha Z^2 = 0       over O_k   (k = Q(sqrt p1))

Exports used by redei.py and symbol4.py:
  - RationalConicSolution, solve_legendre, check_rational_solution
  - shift_by_unit, conjugate_solution
  - RelativeConicSolution, solve_relative_conic, check_relative_solution,
    normalize_relative_solution
  - rational_to_record / rational_from_record, relative_to_record / relative_from_record
"""

import logging
from dataclasses import dataclass
from math import gcd
from typing import Iterable, Iterator, List, Optional, Sequence, Set, Tuple

from sympy.solvers.diophantine.diophantine import diop_DN

from resym.arith import is_prime, legendre_precheck, sqrt_mod
from resym.biquad import BiquadInt, residue_ring, verify_u2_structure
from resym.cache import SolutionCache
from resym.config import load_settings
from resym.errors import (BudgetExhausted, InvalidInputError, InvariantViolation, NormalizationError,
                          OrderClosureError, PreconditionError)
from resym.models import (RationalSolutionRecord, RelativeSolutionRecord, biquad_from_record,
                          biquad_record, quad_from_record, quad_record)
from resym.quadfield import (QuadInt, adjusted_unit, class_number_is_one, coprime, pell_unit,
                             principal_prime_power_check, quad_sqrt)

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Rational conic
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RationalConicSolution:
    p1: int
    p2: int
    x: int
    y: int
    z: int
    alpha: QuadInt      # x + y sqrt(p1)
    m: int              # (alpha) = P2^m


def check_rational_solution(sol: RationalConicSolution) -> None:
    failures = []
    x, y, z = sol.x, sol.y, sol.z
    if x * x - sol.p1 * y * y - sol.p2 * z * z != 0:
        failures.append("x^2 - p1 y^2 - p2 z^2 != 0")
    if gcd(gcd(x, y), z) != 1:
        failures.append("gcd(x, y, z) != 1")
    if y % 2:
        failures.append("y odd")
    if (x - y) % 4 != 1:
        failures.append("x - y != 1 mod 4")
    if sol.alpha != QuadInt.of(x, y, sol.p1):
        failures.append("alpha != x + y sqrt(p1)")
    m = principal_prime_power_check(sol.alpha, sol.p2)
    if m is None or m != sol.m:
        failures.append(f"(alpha) is not P2^{sol.m}")
    if failures:
        raise InvariantViolation("rational conic solution: " + "; ".join(failures),
                                 dump=rational_to_record(sol).model_dump())


def _acceptable(p1: int, p2: int, x: int, y: int, z: int, s: int) -> Optional[int]:
    """Prime-power exponent m when (x, y, z) meets every side condition, else None."""
    if y <= 0 or y % 2 or (x - y) % 4 != 1:
        return None
    if (x - y * s) % p2:
        return None
    if gcd(gcd(x, y), z) != 1:
        return None
    return principal_prime_power_check(QuadInt.of(x, y, p1), p2)


def _orbit_candidates(p1: int, n: int, eta: QuadInt) -> Set[Tuple[int, int]]:
    """
    Solutions of x^2 - p1 y^2 = n near the smallest |y| of every orbit under
    the norm-one units, all sign patterns.
    """
    eta_inv = eta.conj()
    found = set()
    for x0, y0 in diop_DN(p1, n):
        for sx, sy in ((1, 1), (1, -1), (-1, 1), (-1, -1)):
            q = QuadInt.of(sx * int(x0), sy * int(y0), p1)
            while abs((q * eta).B) < abs(q.B):
                q = q * eta
            while abs((q * eta_inv).B) < abs(q.B):
                q = q * eta_inv
            walk = [q, q * eta, q * eta * eta, q * eta_inv, q * eta_inv * eta_inv]
            for w in walk:
                for r in (w, -w):
                    found.add((r.A // 2, r.B // 2))
    return found


def solve_legendre(p1: int, p2: int, avoid: Iterable[int] = (), budget: Optional[int] = None,
                   cache: Optional[SolutionCache] = None) -> RationalConicSolution:
    """
    Normalized solution of x^2 - p1 y^2 - p2 z^2 = 0.

    (alpha) must be a power of one prime above p2, so z runs over powers of p2.
    For each z the accepted solution has the smallest positive y (positive x
    first on ties) with y even, x - y = 1 mod 4, gcd 1 and x = y*s mod p2,
    s = sqrt_mod(p1, p2); the last condition fixes the prime above p2.
    """
    avoid = sorted(set(avoid))
    if budget is None:
        budget = load_settings().rational_budget

    failed = []
    if not is_prime(p1):
        failed.append("p1 prime")
    if not is_prime(p2):
        failed.append("p2 prime")
    if p1 == p2:
        failed.append("p1 != p2")
    if failed:
        raise PreconditionError(failed)
    failed = legendre_precheck(p1, p2)
    if failed:
        raise PreconditionError(failed)

    if cache is not None:
        entry = cache.get("legendre_eq", (p1, p2), avoid)
        if entry is not None:
            try:
                sol = rational_from_record(RationalSolutionRecord.model_validate(entry.payload))
                check_rational_solution(sol)
                return sol
            except (InvariantViolation, ValueError) as e:
                logger.warning("cache row for legendre_eq %s rejected: %s", (p1, p2), e)

    s = sqrt_mod(p1, p2)
    eta = pell_unit(p1)
    z = 1
    while z <= budget:
        if any(z % q == 0 for q in avoid):
            z *= p2
            continue
        logger.debug("solve_legendre(%d, %d): trying z = %d", p1, p2, z)
        candidates = sorted(_orbit_candidates(p1, p2 * z * z, eta), key=lambda c: (c[1], c[0] < 0, abs(c[0])))
        for x, y in candidates:
            m = _acceptable(p1, p2, x, y, z, s)
            if m is None:
                continue
            sol = RationalConicSolution(p1=p1, p2=p2, x=x, y=y, z=z,
                                        alpha=QuadInt.of(x, y, p1), m=m)
            check_rational_solution(sol)
            logger.info("solve_legendre(%d, %d) -> (%d, %d, %d)", p1, p2, x, y, z)
            if cache is not None:
                cache.put("legendre_eq", (p1, p2), avoid,
                          rational_to_record(sol).model_dump(), budget)
            return sol
        z *= p2
    raise BudgetExhausted(f"solve_legendre({p1}, {p2})", budget)


def _normalizing_unit(p1: int) -> QuadInt:
    """Norm-one unit u of Z[sqrt p1] with u = 1 mod 4 (keeps x - y = 1 mod 4)."""
    eta = pell_unit(p1)
    return eta if eta.A // 2 % 4 == 1 else -eta


def shift_by_unit(sol: RationalConicSolution) -> RationalConicSolution:
    """Same prime class, alpha multiplied by a norm-one unit (y kept positive)."""
    unit = _normalizing_unit(sol.p1)
    for u in (unit, unit.conj()):
        alpha = sol.alpha * u
        x, y = alpha.A // 2, alpha.B // 2
        if y > 0:
            shifted = RationalConicSolution(p1=sol.p1, p2=sol.p2, x=x, y=y, z=sol.z,
                                            alpha=alpha, m=sol.m)
            check_rational_solution(shifted)
            return shifted
    raise InvariantViolation("no unit shift keeps y positive", dump=rational_to_record(sol).model_dump())


def conjugate_solution(sol: RationalConicSolution) -> RationalConicSolution:
    """(x, -y, z): the solution attached to the conjugate prime above p2."""
    conj = RationalConicSolution(p1=sol.p1, p2=sol.p2, x=sol.x, y=-sol.y, z=sol.z,
                                 alpha=sol.alpha.conj(), m=sol.m)
    check_rational_solution(conj)
    return conj


def rational_to_record(sol: RationalConicSolution) -> RationalSolutionRecord:
    return RationalSolutionRecord(p1=str(sol.p1), p2=str(sol.p2), x=str(sol.x), y=str(sol.y),
                                  z=str(sol.z), m=str(sol.m), alpha=quad_record(sol.alpha))


def rational_from_record(r: RationalSolutionRecord) -> RationalConicSolution:
    return RationalConicSolution(p1=int(r.p1), p2=int(r.p2), x=int(r.x), y=int(r.y), z=int(r.z),
                                 alpha=quad_from_record(r.alpha), m=int(r.m))


# ---------------------------------------------------------------------------
# Relative conic over O_k
# ---------------------------------------------------------------------------

UNIT_LABELS = ("theta", "-theta", "eps*theta", "-eps*theta")


@dataclass(frozen=True)
class RelativeConicSolution:
    p1: int
    p3: int
    alpha: QuadInt
    X: QuadInt
    Y: QuadInt
    Z: QuadInt
    case_tag: str               # "Z_odd" or "Y_odd"
    unit: str                   # which of UNIT_LABELS normalized theta
    order: int                  # odd order of theta mod 4
    height: int                 # search layer the solution was found in
    lambda_witness: BiquadInt

    def theta(self) -> BiquadInt:
        """X + Y sqrt(p3) (Z_odd) or X + Z sqrt(alpha) (Y_odd)."""
        if self.case_tag == "Z_odd":
            return BiquadInt.from_pair(self.X, self.Y, QuadInt.rational(self.p3, self.p1))
        return BiquadInt.from_pair(self.X, self.Z, self.alpha)


def _key(a: int, b: int) -> Tuple[int, int, int, bool, bool]:
    return max(abs(a), abs(b)), abs(b), abs(a), b < 0, a < 0


def _layer(h: int) -> List[Tuple[int, int]]:
    """O_k coordinates (a, b) in the basis {1, g} with max(|a|, |b|) = h, in key order."""
    if h == 0:
        return [(0, 0)]
    pts = set()
    for t in range(-h, h + 1):
        pts.update({(h, t), (-h, t), (t, h), (t, -h)})
    return sorted(pts, key=lambda ab: _key(*ab))


def _pairs(budget: int) -> Iterator[Tuple[int, Tuple[int, int], Tuple[int, int]]]:
    """(H, Z, Y) with max(h(Z), h(Y)) = H, Z before Y, each in key order."""
    elements: List[Tuple[int, int]] = []
    for h in range(budget + 1):
        new = _layer(h)
        elements.extend(new)
        for z in elements:
            if z == (0, 0):
                continue
            ys = elements if max(abs(z[0]), abs(z[1])) == h else new
            for y in ys:
                yield h, z, y


def check_relative_solution(sol: RelativeConicSolution) -> None:
    failures = []
    X, Y, Z = sol.X, sol.Y, sol.Z
    if X * X - Y * Y * sol.p3 - sol.alpha * Z * Z != QuadInt.rational(0, sol.p1):
        failures.append("X^2 - p3 Y^2 - alpha Z^2 != 0")
    if not coprime(X, Y, Z):
        failures.append("X, Y, Z share a prime")
    if sol.case_tag == "Z_odd" and Z.norm() % 2 == 0:
        failures.append("case Z_odd but Z is even")
    if sol.case_tag == "Y_odd" and Y.norm() % 2 == 0:
        failures.append("case Y_odd but Y is even")
    theta = sol.theta()
    ring = residue_ring(sol.p1, theta.beta)
    lam = ring.reduce(sol.lambda_witness)
    if ring.mul(lam, lam) != ring.reduce(theta):
        failures.append("lambda^2 != theta mod 4")
    if failures:
        raise InvariantViolation("relative conic solution: " + "; ".join(failures),
                                 dump=relative_to_record(sol).model_dump())


def _normalize(p1: int, p3: int, alpha: QuadInt, X: QuadInt, Y: QuadInt, Z: QuadInt,
               case_tag: str, eps: QuadInt, height: int) -> RelativeConicSolution:
    units = (QuadInt.rational(1, p1), QuadInt.rational(-1, p1), eps, -eps)
    beta = QuadInt.rational(p3, p1) if case_tag == "Z_odd" else alpha
    report = verify_u2_structure(p1, beta)
    if not report.ok:
        raise OrderClosureError("U(2) structure check failed: " + "; ".join(report.failures),
                                dump={"p1": p1, "beta": str(beta)})
    ring = residue_ring(p1, beta)
    tried = []
    for label, u in zip(UNIT_LABELS, units):
        Xu, Yu, Zu = X * u, Y * u, Z * u
        theta = BiquadInt.from_pair(Xu, Yu, beta) if case_tag == "Z_odd" else BiquadInt.from_pair(Xu, Zu, beta)
        code = ring.reduce(theta)
        t = ring.order(code)
        tried.append((label, t))
        if t % 2:
            lam = ring.lift(ring.power(code, (t + 1) // 2))
            return RelativeConicSolution(p1=p1, p3=p3, alpha=alpha, X=Xu, Y=Yu, Z=Zu,
                                         case_tag=case_tag, unit=label, order=t,
                                         height=height, lambda_witness=lam)
    raise NormalizationError(
        "no unit multiple of theta has odd order mod 4",
        dump={"p1": p1, "p3": p3, "alpha": str(alpha), "X": str(X), "Y": str(Y), "Z": str(Z),
              "case_tag": case_tag, "orders": tried})


def normalize_relative_solution(p1: int, p3: int, alpha: QuadInt, X: QuadInt, Y: QuadInt,
                                 Z: QuadInt, height: int = 0) -> RelativeConicSolution:
    """Case tag and unit normalization for a solution found elsewhere."""
    if X * X - Y * Y * p3 - alpha * Z * Z != QuadInt.rational(0, p1):
        raise InvalidInputError(f"({X}, {Y}, {Z}) does not solve X^2 = {p3} Y^2 + ({alpha}) Z^2")
    if not coprime(X, Y, Z):
        raise InvalidInputError(f"({X}, {Y}, {Z}) share a prime")
    if Z.norm() % 2:
        case_tag = "Z_odd"
    elif Y.norm() % 2:
        case_tag = "Y_odd"
    else:
        raise InvalidInputError(f"Y = {Y} and Z = {Z} are both even")
    sol = _normalize(p1, p3, alpha, X, Y, Z, case_tag, adjusted_unit(p1).epsilon, height)
    check_relative_solution(sol)
    return sol


def _same_ratio(Y: QuadInt, Z: QuadInt, other: RelativeConicSolution) -> bool:
    """Y/Z = +-Y'/Z': a sign or unit multiple of an excluded solution."""
    lhs, rhs = Y * other.Z, Z * other.Y
    return lhs == rhs or lhs == -rhs


def solve_relative_conic(p1: int, p3: int, alpha: QuadInt, avoid: Iterable[int] = (),
                         budget: Optional[int] = None,
                         cache: Optional[SolutionCache] = None,
                         exclude: Sequence[RelativeConicSolution] = ()) -> RelativeConicSolution:
    """
    X, Y, Z in O_k with X^2 - p3 Y^2 - alpha Z^2 = 0, gcd 1, and the
    normalization theta^((t+1)/2) = lambda with lambda^2 = theta mod 4.

    Solutions proportional to one in `exclude` are passed over; such calls
    bypass the cache.
    """
    avoid = sorted(set(avoid))
    if budget is None:
        budget = load_settings().relative_budget

    failed = []
    if p1 % 8 != 5:
        failed.append("p1 mod 8")
    if p3 % 4 != 1:
        failed.append("p3 mod 4")
    if not failed and not class_number_is_one(p1):
        failed.append("h(p1)=1")
    if alpha.d != p1:
        failed.append("alpha in Q(sqrt p1)")
    elif not (alpha - 1).divisible_by(4):
        failed.append("alpha mod 4")
    if failed:
        raise PreconditionError(failed)

    cache_primes = (p1, p3, alpha.A, alpha.B)
    if exclude:
        cache = None
    if cache is not None:
        entry = cache.get("relative_conic", cache_primes, avoid)
        if entry is not None:
            try:
                sol = relative_from_record(RelativeSolutionRecord.model_validate(entry.payload))
                check_relative_solution(sol)
                return sol
            except (InvariantViolation, ValueError) as e:
                logger.warning("cache row for relative_conic %s rejected: %s", (p1, p3), e)

    eps = adjusted_unit(p1).epsilon
    last_h = -1
    for h, (za, zb), (ya, yb) in _pairs(budget):
        if h != last_h:
            logger.debug("solve_relative_conic(%d, %d): height %d", p1, p3, h)
            last_h = h
        Z = QuadInt.from_basis(za, zb, p1)
        Y = QuadInt.from_basis(ya, yb, p1)
        X = quad_sqrt(alpha * Z * Z + Y * Y * p3)
        if X is None:
            continue
        if not coprime(X, Y, Z):
            continue
        if any(_same_ratio(Y, Z, other) for other in exclude):
            continue
        nY, nZ = Y.norm(), Z.norm()
        if any(nZ % q == 0 or nY % q == 0 for q in avoid):
            logger.debug("skipping (Y, Z) = (%s, %s): norm divisible by an avoided prime", Y, Z)
            continue
        if nZ % 2:
            case_tag = "Z_odd"
        elif nY % 2:
            case_tag = "Y_odd"
        else:
            continue
        sol = _normalize(p1, p3, alpha, X, Y, Z, case_tag, eps, h)
        check_relative_solution(sol)
        logger.info("solve_relative_conic(%d, %d): X = %s, Y = %s, Z = %s (%s)",
                    p1, p3, sol.X, sol.Y, sol.Z, case_tag)
        if cache is not None:
            cache.put("relative_conic", cache_primes, avoid,
                      relative_to_record(sol).model_dump(), budget)
        return sol
    raise BudgetExhausted(f"solve_relative_conic({p1}, {p3})", budget)


def relative_to_record(sol: RelativeConicSolution) -> RelativeSolutionRecord:
    return RelativeSolutionRecord(
        p1=str(sol.p1), p3=str(sol.p3), alpha=quad_record(sol.alpha),
        X=quad_record(sol.X), Y=quad_record(sol.Y), Z=quad_record(sol.Z),
        case_tag=sol.case_tag, unit=sol.unit, order=sol.order, height=sol.height,
        lambda_witness=biquad_record(sol.lambda_witness))


def relative_from_record(r: RelativeSolutionRecord) -> RelativeConicSolution:
    return RelativeConicSolution(
        p1=int(r.p1), p3=int(r.p3), alpha=quad_from_record(r.alpha),
        X=quad_from_record(r.X), Y=quad_from_record(r.Y), Z=quad_from_record(r.Z),
        case_tag=r.case_tag, unit=r.unit, order=r.order, height=r.height,
        lambda_witness=biquad_from_record(r.lambda_witness))
