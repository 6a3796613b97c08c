"""
arith.py - Modular arithmetic primitives over the rationals.

Exports used by the field and symbol modules:
  - is_prime(n)
  - legendre_symbol(a, p)
  - sqrt_mod(a, p)            canonical root in [0, (p-1)/2]
  - hilbert_symbol(a, b, place)
  - local_solvability(a, b)   places where (a, b)_v = -1
  - legendre_precheck(p1, p2) failed clause names for x^2 - p1 y^2 - p2 z^2 = 0
"""

import logging
from fractions import Fraction
from typing import List, Optional, Union

from sympy import factorint, isprime, jacobi_symbol, oo
from sympy.ntheory import sqrt_mod as _sympy_sqrt_mod

from resym.errors import InvalidInputError

logger = logging.getLogger(__name__)

Rational = Union[int, Fraction]
INFINITY = oo


def is_prime(n: int) -> bool:
    """Deterministic below 2**64, strong BPSW test above (sympy)."""
    if n < 2:
        return False
    return bool(isprime(n))


def _check_odd_modulus(p: int) -> None:
    if p < 3 or p % 2 == 0:
        raise InvalidInputError(f"modulus must be an odd prime, got {p}")


def legendre_symbol(a: int, p: int) -> int:
    _check_odd_modulus(p)
    return int(jacobi_symbol(a % p, p))


def sqrt_mod(a: int, p: int) -> Optional[int]:
    """
    Square root of a modulo the odd prime p.

    Returns the smaller of the two roots, or None when a is a non-residue.
    Example: sqrt_mod(5, 11) -> 4 (roots 4 and 7).
    """
    _check_odd_modulus(p)
    a %= p
    if a == 0:
        return 0
    if jacobi_symbol(a, p) != 1:
        return None
    root = int(_sympy_sqrt_mod(a, p))
    return min(root, p - root)


# ---------------------------------------------------------------------------
# Hilbert symbols over Q
# ---------------------------------------------------------------------------

def _square_class(a: Rational) -> int:
    """n/d and n*d differ by the square d**2."""
    q = Fraction(a)
    if q == 0:
        raise InvalidInputError("Hilbert symbol arguments must be nonzero")
    return q.numerator * q.denominator


def _split_power(n: int, p: int):
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k, n


def hilbert_symbol(a: Rational, b: Rational, place) -> int:
    """
    (a, b)_v: 1 iff z^2 = a x^2 + b y^2 has a nontrivial solution over Q_v.

    `place` is a prime or INFINITY.
    """
    a = _square_class(a)
    b = _square_class(b)
    if place == INFINITY or place == float("inf"):
        return -1 if (a < 0 and b < 0) else 1

    p = int(place)
    alpha, u = _split_power(a, p)
    beta, v = _split_power(b, p)
    if p == 2:
        eps_u = ((u - 1) // 2) % 2
        eps_v = ((v - 1) // 2) % 2
        omega_u = ((u * u - 1) // 8) % 2
        omega_v = ((v * v - 1) // 8) % 2
        exponent = eps_u * eps_v + alpha * omega_v + beta * omega_u
        return -1 if exponent % 2 else 1

    sign = -1 if (alpha * beta * ((p - 1) // 2)) % 2 else 1
    if beta % 2:
        sign *= legendre_symbol(u, p)
    if alpha % 2:
        sign *= legendre_symbol(v, p)
    return sign


def relevant_places(a: Rational, b: Rational) -> list:
    """Primes dividing 2ab, then INFINITY; every other place gives +1."""
    primes = {2}
    for x in (_square_class(a), _square_class(b)):
        primes.update(factorint(abs(x)).keys())
    return sorted(primes) + [INFINITY]


def local_solvability(a: Rational, b: Rational) -> list:
    """Places where (a, b)_v = -1; empty iff z^2 = a x^2 + b y^2 is solvable over Q."""
    return [v for v in relevant_places(a, b) if hilbert_symbol(a, b, v) == -1]


def legendre_precheck(p1: int, p2: int) -> List[str]:
    """Failing solvability clauses for (p1, p2): residue conditions and Hilbert symbols."""
    failed = []
    if p1 % 4 != 1:
        failed.append("p1 mod 4")
    if p2 % 4 != 1:
        failed.append("p2 mod 4")
    if not failed:
        if legendre_symbol(p1, p2) != 1:
            failed.append("(p1/p2)")
        if legendre_symbol(p2, p1) != 1:
            failed.append("(p2/p1)")
    for place in local_solvability(p1, p2):
        failed.append(f"hilbert@{'inf' if place == INFINITY else place}")
    return failed
