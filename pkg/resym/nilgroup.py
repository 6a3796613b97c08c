"""
nilgroup.py - Unipotent groups N_n(F2), the representation rho_I, and the
Galois action on the radicals of K.

Exports used by the CLI and the tests:
  - UnipotentMatrix, rho_I(word, I), evaluate(word, images, identity), closure(generators, identity)
  - N4_GENERATORS, RELATIONS, verify_n4_presentation()
  - RadicalAction, TAU, verify_tau_action(cert)
  - RELATORS, rho_relator_check(seed)
"""

import logging
import random
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, TypeVar

import numpy as np

from resym.errors import InvalidInputError
from resym.magnus import Word, magnus, mu2, parse_word, word_product
from resym.symbol4 import KCertificate

logger = logging.getLogger(__name__)

G = TypeVar("G")


# ---------------------------------------------------------------------------
# N_n(F2)
# ---------------------------------------------------------------------------

class UnipotentMatrix:
    """Upper unitriangular n x n matrix over F2, hashed by its bytes."""

    def __init__(self, A):
        A = np.array(A, dtype=np.int64) % 2
        n = A.shape[0]
        if A.shape != (n, n):
            raise InvalidInputError(f"matrix must be square, got shape {A.shape}")
        if not (np.all(np.diag(A) == 1) and not np.any(np.tril(A, -1))):
            raise InvalidInputError("matrix is not unipotent upper triangular")
        self.A = A.astype(np.int8)
        self.n = n
        self.key = self.A.tobytes()
        self._hash = hash((n, self.key))

    @classmethod
    def identity(cls, n: int) -> "UnipotentMatrix":
        return cls(np.eye(n, dtype=np.int64))

    @classmethod
    def elementary(cls, n: int, j: int, k: int) -> "UnipotentMatrix":
        """I + E_jk, 1-based, j < k."""
        if not 1 <= j < k <= n:
            raise InvalidInputError(f"need 1 <= j < k <= {n}, got ({j}, {k})")
        A = np.eye(n, dtype=np.int64)
        A[j - 1, k - 1] = 1
        return cls(A)

    def __mul__(self, other: "UnipotentMatrix") -> "UnipotentMatrix":
        if other.n != self.n:
            raise InvalidInputError("dimension mismatch")
        return UnipotentMatrix(self.A.astype(np.int64) @ other.A.astype(np.int64))

    def inverse(self) -> "UnipotentMatrix":
        # (I + N)^-1 = I + N + N^2 + ... with N nilpotent, signs vanish mod 2
        N = (self.A.astype(np.int64) - np.eye(self.n, dtype=np.int64)) % 2
        total = np.eye(self.n, dtype=np.int64)
        power = np.eye(self.n, dtype=np.int64)
        for _ in range(self.n - 1):
            power = (power @ N) % 2
            total = total + power
        return UnipotentMatrix(total)

    def __pow__(self, k: int) -> "UnipotentMatrix":
        base = self if k >= 0 else self.inverse()
        result = UnipotentMatrix.identity(self.n)
        for _ in range(abs(k)):
            result = result * base
        return result

    def __eq__(self, other) -> bool:
        return isinstance(other, UnipotentMatrix) and self.n == other.n and self.key == other.key

    def __hash__(self) -> int:
        return self._hash

    def entry(self, j: int, k: int) -> int:
        return int(self.A[j - 1, k - 1])

    def off_diagonal(self) -> List[Tuple[int, int]]:
        return [(int(j) + 1, int(k) + 1) for j, k in zip(*np.nonzero(np.triu(self.A, 1)))]

    def is_identity(self) -> bool:
        return not self.off_diagonal()

    def __str__(self) -> str:
        return "\n".join(" ".join(str(int(v)) for v in row) for row in self.A)


def evaluate(word: Word, images: Mapping[int, G], identity: G) -> G:
    """Image of a word under x_i -> images[i]; generators without an image go to identity."""
    result = identity
    for i, e in word.letters:
        g = images.get(i)
        if g is None:
            continue
        result = result * (g if e == 1 else g.inverse())
    return result


def closure(generators: Sequence[G], identity: G) -> List[G]:
    """Breadth-first closure of a finite group under right multiplication."""
    seen = {identity}
    order = [identity]
    frontier = [identity]
    while frontier:
        nxt = []
        for x in frontier:
            for g in generators:
                y = x * g
                if y not in seen:
                    seen.add(y)
                    order.append(y)
                    nxt.append(y)
        frontier = nxt
    return order


def rho_I(word: Word, I: Sequence[int]) -> UnipotentMatrix:
    """(j, k) entry mu2(i_j ... i_{k-1}; word) in N_{|I|}(F2); i_n never enters."""
    I = tuple(I)
    if len(I) < 2:
        raise InvalidInputError(f"rho_I needs |I| >= 2, got {I}")
    n = len(I)
    series = magnus(word, n - 1)
    A = np.eye(n, dtype=np.int64)
    for j in range(n):
        for k in range(j + 1, n):
            A[j, k] = series.coefficient(I[j:k])
    return UnipotentMatrix(A)


# ---- The presentation of N4(F2) ----

N4_GENERATORS: Dict[int, UnipotentMatrix] = {
    1: UnipotentMatrix.elementary(4, 1, 2),
    2: UnipotentMatrix.elementary(4, 2, 3),
    3: UnipotentMatrix.elementary(4, 3, 4),
}

RELATIONS: Tuple[str, ...] = (
    "x1^2", "x2^2", "x3^2", "(x1 x3)^2",
    "(x1 x2)^4", "(x2 x3)^4", "(x1 x2 x3)^4", "((x1 x2 x3 x2)^2 x3)^2",
)

CORNER_WORD = "(x1 x2 x3 x2)^2"


@dataclass
class PresentationReport:
    relations: Dict[str, bool] = field(default_factory=dict)
    order: int = 0
    expected_order: int = 64
    corner: List[Tuple[int, int]] = field(default_factory=list)   # off-diagonal support of (g1 g2 g3 g2)^2
    homomorphism: Optional[bool] = None                           # tau -> g consistency, when checked
    certificate_failures: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return (all(self.relations.values()) and self.order == self.expected_order
                and self.corner == [(1, 4)] and self.homomorphism is not False
                and not self.certificate_failures)

    def summary(self) -> str:
        good = sum(self.relations.values())
        return f"{good}/{len(self.relations)} relations OK, order {self.order}"


def verify_n4_presentation() -> PresentationReport:
    identity = UnipotentMatrix.identity(4)
    report = PresentationReport()
    for rel in RELATIONS:
        report.relations[rel] = evaluate(parse_word(rel), N4_GENERATORS, identity).is_identity()
    report.order = len(closure(list(N4_GENERATORS.values()), identity))
    report.corner = evaluate(parse_word(CORNER_WORD), N4_GENERATORS, identity).off_diagonal()
    logger.info("N4(F2) presentation: %s", report.summary())
    return report


# ---------------------------------------------------------------------------
# Action on sqrt p1, sqrt p2, sqrt p3, sqrt theta_1..4
# ---------------------------------------------------------------------------

# theta_i <-> (sign of sqrt p1, sign of sqrt p3) in theta_i = X +- Y sqrt p3 and conjugates
_THETA_SIGNS = {1: (1, 1), 2: (1, -1), 3: (-1, 1), 4: (-1, -1)}
_SIGNS_THETA = {v: k for k, v in _THETA_SIGNS.items()}


@dataclass(frozen=True)
class RadicalAction:
    """
    Automorphism of K fixed by the signs e1, e3 on sqrt p1, sqrt p3 and the
    signs sigma_i in sqrt theta_i -> sigma_i sqrt theta_{pi(i)}. pi is forced by
    (e1, e3); the sign on sqrt p2 is prod sigma_i since
    sqrt theta_1 ... sqrt theta_4 = h sqrt p2.
    """
    e1: int
    e3: int
    sigma: Tuple[int, int, int, int]

    def pi(self, i: int) -> int:
        s1, s3 = _THETA_SIGNS[i]
        return _SIGNS_THETA[(s1 * self.e1, s3 * self.e3)]

    @property
    def e2(self) -> int:
        return int(np.prod(self.sigma))

    @classmethod
    def identity(cls) -> "RadicalAction":
        return cls(1, 1, (1, 1, 1, 1))

    def __mul__(self, other: "RadicalAction") -> "RadicalAction":
        """(self * other)(r) = self(other(r))."""
        sigma = tuple(other.sigma[i - 1] * self.sigma[other.pi(i) - 1] for i in range(1, 5))
        return RadicalAction(self.e1 * other.e1, self.e3 * other.e3, sigma)

    def inverse(self) -> "RadicalAction":
        result = self
        while result * self != RadicalAction.identity():
            result = result * self
        return result

    def on_theta(self, i: int) -> Tuple[int, int]:
        """sqrt theta_i -> sign * sqrt theta_j, returned as (sign, j)."""
        return self.sigma[i - 1], self.pi(i)

    def on_product(self, indices: Sequence[int]) -> Tuple[int, Tuple[int, ...]]:
        sign, image = 1, []
        for i in indices:
            s, j = self.on_theta(i)
            sign *= s
            image.append(j)
        return sign, tuple(sorted(image))

    def table(self) -> Dict[str, str]:
        out = {"sqrt_p1": _signed(self.e1, "sqrt_p1"), "sqrt_p2": _signed(self.e2, "sqrt_p2"),
               "sqrt_p3": _signed(self.e3, "sqrt_p3")}
        for pair in ((1, 2), (1, 3)):
            sign, image = self.on_product(pair)
            out[f"sqrt_t{pair[0]}t{pair[1]}"] = _signed(sign, "sqrt_" + "".join(f"t{j}" for j in image))
        for i in range(1, 5):
            sign, j = self.on_theta(i)
            out[f"sqrt_t{i}"] = _signed(sign, f"sqrt_t{j}")
        return out

    def fixes_subfield_F(self) -> bool:
        """Fixes sqrt p1, sqrt p2, sqrt p3, sqrt theta1 theta2 and sqrt theta1 theta3."""
        return (self.e1 == self.e2 == self.e3 == 1
                and self.on_product((1, 2)) == (1, (1, 2))
                and self.on_product((1, 3)) == (1, (1, 3)))


def _signed(sign: int, name: str) -> str:
    return name if sign == 1 else "-" + name


TAU: Dict[int, RadicalAction] = {
    1: RadicalAction(-1, 1, (1, 1, 1, 1)),
    2: RadicalAction(1, 1, (-1, 1, 1, 1)),
    3: RadicalAction(1, -1, (1, 1, 1, 1)),
}


def _table_matches_certificate(cert: KCertificate) -> List[str]:
    """The sign conventions behind TAU hold for the generators of cert."""
    t1, t2, t3, t4 = cert.thetas
    failures = []
    if t1.conj_m() != t3 or t2.conj_m() != t4:
        failures.append("sqrt p1 -> -sqrt p1 does not swap theta1<->theta3, theta2<->theta4")
    if t1.conj_beta() != t2 or t3.conj_beta() != t4:
        failures.append("sqrt p3 -> -sqrt p3 does not swap theta1<->theta2, theta3<->theta4")
    if not (t1 * t2 * t3 * t4).is_in_k():
        failures.append("theta1 theta2 theta3 theta4 is not rational")
    return failures


def verify_tau_action(cert: Optional[KCertificate] = None) -> PresentationReport:
    """
    Relations and closure order of <tau1, tau2, tau3>, the tau_i -> g_i
    correspondence, and the action of (tau1 tau2 tau3 tau2)^2.
    """
    report = PresentationReport()
    identity = RadicalAction.identity()
    if cert is not None:
        report.certificate_failures = _table_matches_certificate(cert)

    for rel in RELATIONS:
        report.relations[rel] = evaluate(parse_word(rel), TAU, identity) == identity
    elements = closure(list(TAU.values()), identity)
    report.order = len(elements)

    # right-multiplication BFS over pairs: tau_i -> g_i must be well defined
    mat_identity = UnipotentMatrix.identity(4)
    image = {identity: mat_identity}
    frontier = [identity]
    consistent = True
    while frontier and consistent:
        nxt = []
        for x in frontier:
            for i, tau in TAU.items():
                y, m = x * tau, image[x] * N4_GENERATORS[i]
                if y in image:
                    if image[y] != m:
                        consistent = False
                        break
                    continue
                image[y] = m
                nxt.append(y)
        frontier = nxt
    report.homomorphism = consistent and len(set(image.values())) == len(image)

    w2 = evaluate(parse_word(CORNER_WORD), TAU, identity)
    negates_all = all(w2.on_theta(i) == (-1, i) for i in range(1, 5))
    report.corner = [(1, 4)] if w2.fixes_subfield_F() and negates_all else []
    logger.info("tau action: %s, homomorphism %s", report.summary(), report.homomorphism)
    return report


# ---------------------------------------------------------------------------
# Relators of the map x_i -> g_i, x4 -> 1
# ---------------------------------------------------------------------------

RELATORS: Tuple[str, ...] = (
    "x1^2", "x2^2", "x3^2", "(x1 x3)^2", "x4",
    "(x1 x2)^4", "(x2 x3)^4", "(x1 x2 x3)^4", "((x1 x2 x3 x2)^2 x3)^2",
)

KERNEL_INDICES: Tuple[Tuple[int, ...], ...] = ((1,), (2,), (3,), (1, 2), (2, 3), (1, 2, 3))


@dataclass
class RelatorReport:
    values: Dict[str, Dict[str, int]] = field(default_factory=dict)   # relator -> I -> mu2
    corner_values: List[int] = field(default_factory=list)            # mu2((123); (x1x2x3x2)^2 R)

    @property
    def ok(self) -> bool:
        vanish = all(v == 0 for per in self.values.values() for v in per.values())
        return vanish and bool(self.corner_values) and all(v == 1 for v in self.corner_values)


def _random_word(rng: random.Random, generators: int, length: int) -> Word:
    return Word(tuple((rng.randint(1, generators), rng.choice((1, -1))) for _ in range(length)))


def conjugated_relator_product(rng: random.Random, factors: int, conj_length: int = 4) -> Word:
    """Product of random conjugates u r^(+-1) u^-1 of RELATORS."""
    parts = []
    for _ in range(factors):
        r = parse_word(rng.choice(RELATORS)) ** rng.choice((1, -1))
        u = _random_word(rng, 4, rng.randint(0, conj_length))
        parts.append(u * r * u.inverse())
    return word_product(parts)


def rho_relator_check(seed: int = 0, samples: int = 10) -> RelatorReport:
    report = RelatorReport()
    for rel in RELATORS:
        w = parse_word(rel)
        report.values[rel] = {"".join(map(str, I)): mu2(I, w) for I in KERNEL_INDICES}
    rng = random.Random(seed)
    corner = parse_word(CORNER_WORD)
    for _ in range(samples):
        f = corner * conjugated_relator_product(rng, rng.randint(1, 4))
        report.corner_values.append(mu2((1, 2, 3), f))
    return report
