"""
biquad.py - The order O_k[w] of k(sqrt beta), k = Q(sqrt m), w = (1 + sqrt beta)/2.

beta is a rational prime p3 (the field k13) or the Redei element alpha (the
field k13'); in both cases beta = 1 mod 4 O_k, so c = (beta - 1)/4 lies in
O_k and w^2 = w + c.

Exports used by conic.py, symbol4.py and the CLI:
  - BiquadInt                      u + v*w with u, v in O_k
  - order_basis(m, beta)           Z-basis {1, w_m, w, w_m*w} and its structure table
  - ResidueRing4, residue_ring(m, beta)
  - unit_order_mod4(theta), sqrt_mod4(theta), verify_u2_structure(m, beta)
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Optional, Tuple

import numpy as np

from resym.errors import InvalidInputError, OrderClosureError
from resym.quadfield import QuadInt

logger = logging.getLogger(__name__)


def _as_beta(beta, m: int) -> QuadInt:
    if isinstance(beta, int):
        return QuadInt.rational(beta, m)
    if beta.d != m:
        raise InvalidInputError(f"beta lives in Q(sqrt {beta.d}), expected Q(sqrt {m})")
    return beta


def relative_c(beta: QuadInt) -> QuadInt:
    """(beta - 1)/4, which must be integral."""
    shifted = beta - 1
    if not shifted.divisible_by(4):
        raise OrderClosureError(f"beta = {beta} is not 1 mod 4 O_k",
                                dump={"beta": [beta.A, beta.B, beta.d]})
    return shifted.exact_div(4)


@dataclass(frozen=True)
class BiquadInt:
    u: QuadInt
    v: QuadInt
    beta: QuadInt

    @property
    def m(self) -> int:
        return self.beta.d

    @classmethod
    def from_k(cls, x: QuadInt, beta: QuadInt) -> "BiquadInt":
        return cls(x, QuadInt.rational(0, x.d), beta)

    @classmethod
    def from_pair(cls, x: QuadInt, y: QuadInt, beta: QuadInt) -> "BiquadInt":
        """x + y sqrt(beta), with sqrt(beta) = 2w - 1."""
        return cls(x - y, y * 2, beta)

    @classmethod
    def from_coords4(cls, coords: Tuple[int, int, int, int], beta: QuadInt) -> "BiquadInt":
        """Inverse of coords4: (c0 + c1 sqrt m + c2 sqrt beta + c3 sqrt m sqrt beta)/4."""
        c0, c1, c2, c3 = coords
        if (c0 - c2) % 2 or (c1 - c3) % 2:
            raise InvalidInputError(f"{coords}/4 is not in the order")
        m = beta.d
        return cls(QuadInt((c0 - c2) // 2, (c1 - c3) // 2, m), QuadInt(c2, c3, m), beta)

    def _check(self, other: "BiquadInt") -> None:
        if other.beta != self.beta:
            raise InvalidInputError("mixed biquadratic fields")

    def __add__(self, other: "BiquadInt") -> "BiquadInt":
        self._check(other)
        return BiquadInt(self.u + other.u, self.v + other.v, self.beta)

    def __sub__(self, other: "BiquadInt") -> "BiquadInt":
        self._check(other)
        return BiquadInt(self.u - other.u, self.v - other.v, self.beta)

    def __neg__(self) -> "BiquadInt":
        return BiquadInt(-self.u, -self.v, self.beta)

    def __mul__(self, other):
        if isinstance(other, (int, QuadInt)):
            return BiquadInt(self.u * other, self.v * other, self.beta)
        self._check(other)
        c = relative_c(self.beta)
        u = self.u * other.u + c * self.v * other.v
        v = self.u * other.v + self.v * other.u + self.v * other.v
        return BiquadInt(u, v, self.beta)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "BiquadInt":
        result = BiquadInt.from_k(QuadInt.rational(1, self.m), self.beta)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def coords4(self) -> Tuple[int, int, int, int]:
        """4 * coordinates over {1, sqrt m, sqrt beta, sqrt m sqrt beta}."""
        u, v = self.u, self.v
        return (2 * u.A + v.A, 2 * u.B + v.B, v.A, v.B)

    def basis_coords(self) -> Tuple[int, int, int, int]:
        """Integer coordinates over {1, w_m, w, w_m w}."""
        return self.u.basis_coords() + self.v.basis_coords()

    def conj_beta(self) -> "BiquadInt":
        """sqrt beta -> -sqrt beta; w -> 1 - w."""
        return BiquadInt(self.u + self.v, -self.v, self.beta)

    def conj_m(self) -> "BiquadInt":
        """sqrt m -> -sqrt m; lands in k(sqrt conj(beta))."""
        return BiquadInt(self.u.conj(), self.v.conj(), self.beta.conj())

    def relative_norm(self) -> QuadInt:
        """N_{k(sqrt beta)/k} = u^2 + u v - c v^2."""
        c = relative_c(self.beta)
        return self.u * self.u + self.u * self.v - c * self.v * self.v

    def absolute_norm(self) -> int:
        return self.relative_norm().norm()

    def is_in_k(self) -> bool:
        return self.v.is_zero()

    def __str__(self) -> str:
        c0, c1, c2, c3 = self.coords4()
        return f"({c0} + {c1}*sqrt({self.m}) + {c2}*sqrt(beta) + {c3}*sqrt({self.m})*sqrt(beta))/4"


# ---------------------------------------------------------------------------
# Order basis
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OrderBasis:
    m: int
    beta: QuadInt
    c: QuadInt
    labels: Tuple[str, ...]
    table: np.ndarray           # table[i, j] = coordinates of basis[i] * basis[j]
    half_element: Tuple[int, int, int, int]


def _basis_elements(m: int, beta: QuadInt) -> List[BiquadInt]:
    one = QuadInt.rational(1, m)
    zero = QuadInt.rational(0, m)
    w_m = QuadInt.from_basis(0, 1, m)
    return [
        BiquadInt(one, zero, beta),
        BiquadInt(w_m, zero, beta),
        BiquadInt(zero, one, beta),
        BiquadInt(zero, w_m, beta),
    ]


@lru_cache(maxsize=None)
def _order_basis(m: int, beta: QuadInt) -> OrderBasis:
    if m % 4 != 1:
        raise OrderClosureError(f"m = {m} must be 1 mod 4", dump={"m": m})
    c = relative_c(beta)
    basis = _basis_elements(m, beta)
    table = np.zeros((4, 4, 4), dtype=object)
    for i, x in enumerate(basis):
        for j, y in enumerate(basis):
            table[i, j] = (x * y).basis_coords()
    # closure: every product re-expands to the same element
    for i, x in enumerate(basis):
        for j, y in enumerate(basis):
            a, b, e, f = table[i, j]
            back = (basis[0] * a) + (basis[1] * b) + (basis[2] * e) + (basis[3] * f)
            if back != x * y:
                raise OrderClosureError(f"basis product {i}*{j} leaves the order",
                                        dump={"m": m, "beta": [beta.A, beta.B]})
    half = BiquadInt.from_coords4((6, 2, 2, 2), beta)
    return OrderBasis(m=m, beta=beta, c=c,
                      labels=("1", f"(1+sqrt({m}))/2", "(1+sqrt(beta))/2",
                              f"(1+sqrt({m}))/2*(1+sqrt(beta))/2"),
                      table=table, half_element=half.basis_coords())


def order_basis(m: int, beta) -> OrderBasis:
    return _order_basis(m, _as_beta(beta, m))


# ---------------------------------------------------------------------------
# Residue ring mod 4
# ---------------------------------------------------------------------------

def _encode(coords) -> int:
    a, b, e, f = (x % 4 for x in coords)
    return a | (b << 2) | (e << 4) | (f << 6)


def _decode(code: int) -> Tuple[int, int, int, int]:
    return code & 3, (code >> 2) & 3, (code >> 4) & 3, (code >> 6) & 3


ONE = _encode((1, 0, 0, 0))


class ResidueRing4:
    """O_k[w] / 4, 256 elements coded as a | b<<2 | e<<4 | f<<6."""

    def __init__(self, m: int, beta: QuadInt):
        self.basis = order_basis(m, beta)
        self.m = m
        self.beta = beta
        em = (m - 1) // 4
        c0, c1 = self.basis.c.basis_coords()

        def kmul(x0, x1, y0, y1):
            return (x0 * y0 + x1 * y1 * em) % 4, (x0 * y1 + x1 * y0 + x1 * y1) % 4

        idx = np.arange(256)
        a, b, e, f = idx & 3, (idx >> 2) & 3, (idx >> 4) & 3, (idx >> 6) & 3
        a1, b1, e1, f1 = (x[:, None] for x in (a, b, e, f))
        a2, b2, e2, f2 = (x[None, :] for x in (a, b, e, f))

        uu = kmul(a1, b1, a2, b2)
        vv = kmul(e1, f1, e2, f2)
        cvv = kmul(c0 % 4, c1 % 4, vv[0], vv[1])
        uv = kmul(a1, b1, e2, f2)
        vu = kmul(e1, f1, a2, b2)
        nu0, nu1 = (uu[0] + cvv[0]) % 4, (uu[1] + cvv[1]) % 4
        nv0, nv1 = (uv[0] + vu[0] + vv[0]) % 4, (uv[1] + vu[1] + vv[1]) % 4
        self.table = (nu0 | (nu1 << 2) | (nv0 << 4) | (nv1 << 6)).astype(np.int64)

        self.is_unit = (self.table == ONE).any(axis=1)
        self.unit_count = int(self.is_unit.sum())
        logger.debug("residue ring mod 4 for m=%d beta=%s: %d units", m, beta, self.unit_count)

    def reduce(self, x: BiquadInt) -> int:
        if x.beta != self.beta:
            raise InvalidInputError("element lives in a different order")
        return _encode(x.basis_coords())

    def lift(self, code: int) -> BiquadInt:
        a, b, e, f = _decode(code)
        u = QuadInt.from_basis(a, b, self.m)
        v = QuadInt.from_basis(e, f, self.m)
        return BiquadInt(u, v, self.beta)

    def mul(self, x: int, y: int) -> int:
        return int(self.table[x, y])

    def power(self, x: int, k: int) -> int:
        result, base = ONE, x
        while k:
            if k & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            k >>= 1
        return result

    def order(self, x: int) -> int:
        if not self.is_unit[x]:
            raise InvalidInputError(f"residue {_decode(x)} is not a unit mod 4")
        k, y = 1, x
        while y != ONE:
            y = self.mul(y, x)
            k += 1
        return k

    def sqrt(self, x: int) -> Optional[int]:
        t = self.order(x)
        if t % 2 == 0:
            return None
        return self.power(x, (t + 1) // 2)

    def sqrt_exhaustive(self, x: int) -> Optional[int]:
        squares = self.table[np.arange(256), np.arange(256)]
        hits = np.nonzero(squares == x)[0]
        return int(hits[0]) if len(hits) else None

    def closure(self, generators: List[int]) -> set:
        group = {ONE}
        frontier = [ONE]
        while frontier:
            nxt = []
            for g in frontier:
                for h in generators:
                    y = self.mul(g, h)
                    if y not in group:
                        group.add(y)
                        nxt.append(y)
            frontier = nxt
        return group


@lru_cache(maxsize=None)
def _residue_ring(m: int, beta: QuadInt) -> ResidueRing4:
    return ResidueRing4(m, beta)


def residue_ring(m: int, beta) -> ResidueRing4:
    return _residue_ring(m, _as_beta(beta, m))


def unit_order_mod4(theta: BiquadInt) -> int:
    ring = residue_ring(theta.m, theta.beta)
    return ring.order(ring.reduce(theta))


def sqrt_mod4(theta: BiquadInt) -> Optional[BiquadInt]:
    """lambda with lambda^2 = theta mod 4 when the residue has odd order, else None."""
    ring = residue_ring(theta.m, theta.beta)
    root = ring.sqrt(ring.reduce(theta))
    return None if root is None else ring.lift(root)


# ---------------------------------------------------------------------------
# U(2) structure
# ---------------------------------------------------------------------------

U2_GENERATORS: Dict[str, Tuple[int, int, int, int]] = {
    "-1": (3, 0, 0, 0),
    "sqrt(m)": (3, 2, 0, 0),
    "sqrt(beta)": (3, 0, 2, 0),
    "(3+sqrt(m)+sqrt(beta)+sqrt(m)sqrt(beta))/2": (1, 0, 0, 2),
}


@dataclass
class U2Report:
    m: int
    beta: str
    unit_count: int
    two_part: int               # largest power of 2 dividing unit_count
    subgroup_order: int         # order of the group the four generators span
    generator_orders: Dict[str, int]
    failures: List[str]

    @property
    def ok(self) -> bool:
        return not self.failures


def verify_u2_structure(m: int, beta) -> U2Report:
    """The four residues span an elementary abelian group of order 16 equal to the 2-part of U."""
    ring = residue_ring(m, beta)
    codes = {name: _encode(coords) for name, coords in U2_GENERATORS.items()}
    failures = []

    half = ring.reduce(BiquadInt.from_coords4((6, 2, 2, 2), ring.beta))
    if half != codes["(3+sqrt(m)+sqrt(beta)+sqrt(m)sqrt(beta))/2"]:
        failures.append("half-element residue mismatch")

    orders = {}
    for name, code in codes.items():
        if not ring.is_unit[code]:
            failures.append(f"{name} is not a unit mod 4")
            continue
        orders[name] = ring.order(code)
        if ring.mul(code, code) != ONE:
            failures.append(f"({name})^2 != 1 mod 4")
    if len(set(codes.values())) != len(codes):
        failures.append("generators are not distinct mod 4")

    span = ring.closure(list(codes.values()))
    if len(span) != 16:
        failures.append(f"generators span {len(span)} elements, expected 16")

    two_part = ring.unit_count & -ring.unit_count
    if two_part != 16:
        failures.append(f"2-part of |U| is {two_part}, expected 16")

    report = U2Report(m=m, beta=str(ring.beta), unit_count=ring.unit_count, two_part=two_part,
                      subgroup_order=len(span), generator_orders=orders, failures=failures)
    if failures:
        logger.warning("U(2) structure check failed for m=%d beta=%s: %s", m, ring.beta, failures)
    return report
