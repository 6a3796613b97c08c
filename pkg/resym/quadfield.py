"""
quadfield.py - Arithmetic in the ring of integers O_k of k = Q(sqrt d), d > 1.

Elements are stored with doubled coordinates: QuadInt(A, B, d) is
(A + B sqrt d) / 2.

Exports used by biquad.py, conic.py and symbol4.py:
  - QuadInt, quad_mul, quad_conj, quad_norm, quad_trace
  - quad_sqrt(u)                   exact square root in O_k or None
  - coprime(*elements)             no prime ideal divides all of them
  - embed_mod(u, root, p)          image in F_p under sqrt d -> root
  - fundamental_unit(d), adjusted_unit(p1), UnitCertificate
  - class_number(d), class_number_is_one(d), principal_below_minkowski(d)
  - principal_prime_power_check(alpha, p)
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import chain, cycle
from math import gcd, isqrt
from typing import List, Optional, Tuple

from sympy import divisors, factorint, multiplicity, primerange
from sympy.ntheory import sqrt_mod as _sympy_sqrt_mod
from sympy.ntheory.continued_fraction import continued_fraction_periodic
from sympy.solvers.diophantine.diophantine import diop_DN

from resym.errors import InvalidInputError, InvariantViolation, PreconditionError

logger = logging.getLogger(__name__)


def is_squarefree(d: int) -> bool:
    return d > 1 and all(e == 1 for e in factorint(d).values())


def _check_field(d: int) -> None:
    if not is_squarefree(d):
        raise InvalidInputError(f"d must be a squarefree integer > 1, got {d}")


@dataclass(frozen=True)
class QuadInt:
    A: int      # twice the rational part
    B: int      # twice the sqrt(d) coefficient
    d: int

    def __post_init__(self):
        if self.d % 4 == 1:
            ok = (self.A - self.B) % 2 == 0
        else:
            ok = self.A % 2 == 0 and self.B % 2 == 0
        if not ok:
            raise InvalidInputError(f"({self.A} + {self.B}*sqrt({self.d}))/2 is not in O_k")

    # --- constructors ---

    @classmethod
    def of(cls, a: int, b: int, d: int) -> "QuadInt":
        """a + b sqrt d with integer a, b."""
        return cls(2 * a, 2 * b, d)

    @classmethod
    def rational(cls, n: int, d: int) -> "QuadInt":
        return cls(2 * n, 0, d)

    @classmethod
    def from_basis(cls, a: int, b: int, d: int) -> "QuadInt":
        """a + b*g where g = (1 + sqrt d)/2 if d = 1 mod 4, else sqrt d."""
        if d % 4 == 1:
            return cls(2 * a + b, b, d)
        return cls(2 * a, 2 * b, d)

    # --- coordinates ---

    @property
    def a(self) -> Fraction:
        return Fraction(self.A, 2)

    @property
    def b(self) -> Fraction:
        return Fraction(self.B, 2)

    def basis_coords(self) -> Tuple[int, int]:
        """Inverse of from_basis."""
        if self.d % 4 == 1:
            return (self.A - self.B) // 2, self.B
        return self.A // 2, self.B // 2

    def is_zero(self) -> bool:
        return self.A == 0 and self.B == 0

    def is_rational(self) -> bool:
        return self.B == 0

    # --- ring operations ---

    def _same_field(self, other: "QuadInt") -> None:
        if other.d != self.d:
            raise InvalidInputError(f"mixed fields: Q(sqrt {self.d}) and Q(sqrt {other.d})")

    def _lift(self, other) -> "QuadInt":
        if isinstance(other, int):
            return QuadInt.rational(other, self.d)
        self._same_field(other)
        return other

    def __add__(self, other):
        other = self._lift(other)
        return QuadInt(self.A + other.A, self.B + other.B, self.d)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._lift(other)
        return QuadInt(self.A - other.A, self.B - other.B, self.d)

    def __rsub__(self, other):
        return self._lift(other) - self

    def __neg__(self):
        return QuadInt(-self.A, -self.B, self.d)

    def __mul__(self, other):
        if isinstance(other, int):
            return QuadInt(self.A * other, self.B * other, self.d)
        self._same_field(other)
        A = (self.A * other.A + self.B * other.B * self.d) // 2
        B = (self.A * other.B + self.B * other.A) // 2
        return QuadInt(A, B, self.d)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise InvalidInputError("negative powers are not in O_k in general")
        result = QuadInt.rational(1, self.d)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def conj(self) -> "QuadInt":
        return QuadInt(self.A, -self.B, self.d)

    def norm(self) -> int:
        return (self.A * self.A - self.d * self.B * self.B) // 4

    def trace(self) -> int:
        return self.A

    def divisible_by(self, n: int) -> bool:
        """n | self in O_k."""
        if self.A % n or self.B % n:
            return False
        A, B = self.A // n, self.B // n
        if self.d % 4 == 1:
            return (A - B) % 2 == 0
        return A % 2 == 0 and B % 2 == 0

    def exact_div(self, n: int) -> "QuadInt":
        if not self.divisible_by(n):
            raise InvalidInputError(f"{self} is not divisible by {n} in O_k")
        return QuadInt(self.A // n, self.B // n, self.d)

    def __str__(self) -> str:
        a, b = self.a, self.b
        if b == 0:
            return str(a)
        sign = "+" if b > 0 else "-"
        coef = "" if abs(b) == 1 else f"{abs(b)}*"
        return f"{a} {sign} {coef}sqrt({self.d})"


def quad_mul(u: QuadInt, v: QuadInt) -> QuadInt:
    return u * v


def quad_conj(u: QuadInt) -> QuadInt:
    return u.conj()


def quad_norm(u: QuadInt) -> int:
    return u.norm()


def quad_trace(u: QuadInt) -> int:
    return u.trace()


def embed_mod(u: QuadInt, root: int, p: int) -> int:
    """Image of u in F_p under sqrt d -> root (p odd)."""
    return (u.A + u.B * root) * pow(2, -1, p) % p


# ---------------------------------------------------------------------------
# Square roots and coprimality
# ---------------------------------------------------------------------------

def _exact_sqrt(n: int) -> Optional[int]:
    if n < 0:
        return None
    r = isqrt(n)
    return r if r * r == n else None


def quad_sqrt(u: QuadInt) -> Optional[QuadInt]:
    """
    w in O_k with w*w == u, or None.

    With u = (A + B sqrt d)/2 and w = (a + b sqrt d)/2:
    a^2 = A +- 2n, d b^2 = A -+ 2n, a b = B, where n^2 = N(u).
    """
    n = _exact_sqrt(u.norm())
    if n is None:
        return None
    for sign in (1, -1):
        a = _exact_sqrt(u.A + 2 * sign * n)
        if a is None:
            continue
        rest = u.A - 2 * sign * n
        if rest % u.d:
            continue
        b = _exact_sqrt(rest // u.d)
        if b is None:
            continue
        if a * b != abs(u.B):
            continue
        if u.B < 0:
            b = -b
        try:
            w = QuadInt(a, b, u.d)
        except InvalidInputError:
            continue
        if w * w == u:
            return w
    return None


def _generator_roots(d: int, q: int) -> List[int]:
    """Roots mod q of the minimal polynomial of the ring generator g (see from_basis)."""
    if q == 2:
        if d % 4 == 1:
            e = (d - 1) // 4
            return [t for t in (0, 1) if (t * t - t - e) % 2 == 0]
        return [t for t in (0, 1) if (t * t - d) % 2 == 0]
    roots = _sympy_sqrt_mod(d % q, q, all_roots=True) if d % q else [0]
    roots = sorted(set(int(r) for r in (roots or [])))
    if d % 4 == 1:
        inv2 = pow(2, -1, q)
        return sorted({(1 + r) * inv2 % q for r in roots})
    return roots


def coprime(*elements: QuadInt) -> bool:
    """True iff the ideal generated by the elements is O_k."""
    g = 0
    for u in elements:
        g = gcd(g, abs(u.norm()))
    if g == 1:
        return True
    if g == 0:
        return False
    d = elements[0].d
    coords = [u.basis_coords() for u in elements]
    for q in factorint(g):
        roots = _generator_roots(d, q)
        if not roots:
            if all(a % q == 0 and b % q == 0 for a, b in coords):
                return False
            continue
        for t in roots:
            if all((a + b * t) % q == 0 for a, b in coords):
                return False
    return True


# ---------------------------------------------------------------------------
# Units
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def fundamental_unit(d: int) -> QuadInt:
    """
    Fundamental unit > 1 of O_k from the continued fraction of (1 + sqrt d)/2
    (d = 1 mod 4) or sqrt d: the first convergent p/q giving a unit.
    """
    _check_field(d)
    if d % 4 == 1:
        expansion = continued_fraction_periodic(1, 2, d)
    else:
        expansion = continued_fraction_periodic(0, 1, d)
    if isinstance(expansion[-1], list):
        prefix, period = expansion[:-1], expansion[-1]
    else:
        prefix, period = expansion, []
    terms = chain(prefix, cycle(period)) if period else iter(prefix)

    p, p_prev = 1, 0
    q, q_prev = 0, 1
    for term in terms:
        p, p_prev = term * p + p_prev, p
        q, q_prev = term * q + q_prev, q
        if d % 4 == 1:
            # p - q * conj(omega)
            candidate = QuadInt(2 * p - q, q, d)
        else:
            candidate = QuadInt(2 * p, 2 * q, d)
        if abs(candidate.norm()) == 1:
            return candidate
    raise InvariantViolation(f"continued fraction of Q(sqrt {d}) produced no unit")


@dataclass(frozen=True)
class UnitCertificate:
    epsilon: QuadInt
    s: int              # epsilon = s + t sqrt(p1)
    t: int
    power_used: int     # 1 or 3


def adjusted_unit(p1: int) -> UnitCertificate:
    """Unit s + t sqrt(p1) with s even, t odd and norm -1 (p1 = 5 mod 8)."""
    if p1 % 8 != 5:
        raise PreconditionError(["p1 mod 8"], f"adjusted unit needs p1 = 5 mod 8, got {p1}")
    eps1 = fundamental_unit(p1)
    if eps1.norm() != -1:
        raise InvariantViolation(f"fundamental unit of Q(sqrt {p1}) has norm +1",
                                 dump={"epsilon": str(eps1)})
    power = 1 if (eps1.A % 2 == 0 and eps1.B % 2 == 0) else 3
    eps = eps1 ** power
    s, t = eps.A // 2, eps.B // 2
    if s % 2 != 0 or t % 2 != 1 or eps.norm() != -1:
        raise InvariantViolation(f"adjusted unit {eps} lacks s even, t odd, norm -1",
                                 dump={"p1": p1, "power": power})
    return UnitCertificate(epsilon=eps, s=s, t=t, power_used=power)


def pell_unit(d: int) -> QuadInt:
    """Fundamental solution of x^2 - d y^2 = 1 as x + y sqrt d."""
    x, y = diop_DN(d, 1)[0]
    return QuadInt.of(int(x), int(y), d)


# ---------------------------------------------------------------------------
# Class numbers
# ---------------------------------------------------------------------------

def field_discriminant(d: int) -> int:
    return d if d % 4 == 1 else 4 * d


def _reduced_forms(D: int) -> List[Tuple[int, int, int]]:
    s = isqrt(D)
    forms = []
    for b in range(1, s + 1):
        if (b - D) % 2:
            continue
        ac = (b * b - D) // 4
        for a_abs in divisors(-ac):
            if not (s - b < 2 * a_abs <= s + b):
                continue
            for a in (a_abs, -a_abs):
                c = ac // a
                if gcd(gcd(a, b), c) == 1:
                    forms.append((a, b, c))
    return forms


def _rho(form: Tuple[int, int, int], D: int) -> Tuple[int, int, int]:
    _, b, c = form
    s = isqrt(D)
    b2 = s - ((s + b) % (2 * abs(c)))
    return c, b2, (b2 * b2 - D) // (4 * c)


@lru_cache(maxsize=None)
def class_number(d: int) -> Tuple[int, int]:
    """(narrow, wide) class numbers: cycles of reduced indefinite forms."""
    _check_field(d)
    D = field_discriminant(d)
    remaining = set(_reduced_forms(D))
    cycles = 0
    while remaining:
        start = remaining.pop()
        cycles += 1
        form = _rho(start, D)
        while form != start:
            if form not in remaining:
                raise InvariantViolation(f"reduction cycle left the reduced set at {form}",
                                         dump={"d": d, "start": start})
            remaining.discard(form)
            form = _rho(form, D)
    h_plus = cycles
    h = h_plus if fundamental_unit(d).norm() == -1 else h_plus // 2
    logger.debug("class numbers of Q(sqrt %d): narrow %d, wide %d", d, h_plus, h)
    return h_plus, h


def class_number_is_one(d: int) -> bool:
    return class_number(d)[1] == 1


def principal_below_minkowski(d: int) -> bool:
    """
    Second test of h = 1: every prime ideal of norm below sqrt(D)/2 is
    principal, i.e. +-p (or +-4p) is a norm.
    """
    _check_field(d)
    D = field_discriminant(d)
    for p in primerange(2, isqrt(D // 4) + 2):
        if 4 * p * p > D:
            break
        if not _generator_roots(d, p):
            continue
        target = 4 * p if d % 4 == 1 else p
        if not (diop_DN(d, target) or diop_DN(d, -target)):
            return False
    return True


def principal_prime_power_check(alpha: QuadInt, p: int) -> Optional[int]:
    """Odd m with (alpha) = P^m for a single prime P above p, else None."""
    if alpha.is_zero():
        raise InvalidInputError("alpha must be nonzero")
    n = abs(alpha.norm())
    m = multiplicity(p, n)
    if m % 2 == 0 or p ** m != n:
        return None
    if alpha.divisible_by(p):
        return None
    return int(m)
