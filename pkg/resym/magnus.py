"""
magnus.py - Free-group words, the mod 2 Magnus embedding and Fox calculus.

Exports used by nilgroup.py, symbol4.py and the CLI:
  - Word, parse_word(text)
  - TruncSeries, magnus(word, max_degree)
  - mu2(I, word), fox_mu2(I, word), fox_derivative(element, j)
  - proper_shuffles(I, J), shuffle_check(I, J, i, word)
  - delta2(I, e_S, lower_mu), lower_indices(I), milnor_invariant(I, word, e_S)

Coefficients live in Z/2 throughout, so a series or a group-ring element is
the set of its monomials (resp. words) with coefficient 1.
"""

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from math import comb
from typing import FrozenSet, Iterable, List, Mapping, Optional, Sequence, Set, Tuple

import pyparsing as pp

from resym.errors import InvalidInputError

logger = logging.getLogger(__name__)

MAX_DEGREE = 6

Letter = Tuple[int, int]        # (generator index >= 1, exponent +-1)
Monomial = Tuple[int, ...]      # X_{i1} ... X_{in}


# ---------------------------------------------------------------------------
# Words
# ---------------------------------------------------------------------------

def _free_reduce(letters: Iterable[Letter]) -> Tuple[Letter, ...]:
    stack: List[Letter] = []
    for i, e in letters:
        if stack and stack[-1] == (i, -e):
            stack.pop()
        else:
            stack.append((i, e))
    return tuple(stack)


@dataclass(frozen=True)
class Word:
    letters: Tuple[Letter, ...] = ()

    def __post_init__(self):
        for i, e in self.letters:
            if i < 1 or e not in (1, -1):
                raise InvalidInputError(f"bad letter {(i, e)}")
        object.__setattr__(self, "letters", _free_reduce(self.letters))

    @classmethod
    def identity(cls) -> "Word":
        return cls(())

    @classmethod
    def generator(cls, i: int, exponent: int = 1) -> "Word":
        return cls(((i, exponent),))

    @classmethod
    def of(cls, *indices: int) -> "Word":
        """Word.of(1, 2, -1) = x1 x2 x1^-1."""
        return cls(tuple((abs(i), 1 if i > 0 else -1) for i in indices))

    def __mul__(self, other: "Word") -> "Word":
        return Word(self.letters + other.letters)

    def inverse(self) -> "Word":
        return Word(tuple((i, -e) for i, e in reversed(self.letters)))

    def __pow__(self, n: int) -> "Word":
        base = self if n >= 0 else self.inverse()
        return Word(base.letters * abs(n))

    def __len__(self) -> int:
        return len(self.letters)

    def prefix(self, t: int) -> "Word":
        return Word(self.letters[:t])

    def is_identity(self) -> bool:
        return not self.letters

    def __str__(self) -> str:
        if not self.letters:
            return "1"
        return " ".join(f"x{i}" if e == 1 else f"X{i}" for i, e in self.letters)


def word_product(words: Iterable[Word]) -> Word:
    letters: List[Letter] = []
    for w in words:
        letters.extend(w.letters)
    return Word(tuple(letters))


# ---- Parsing ----

@lru_cache(maxsize=1)
def _grammar() -> pp.ParserElement:
    integer = pp.Regex(r"[+-]?\d+").set_parse_action(lambda t: int(t[0]))
    gen = pp.Regex(r"[xX][1-9]\d*").set_parse_action(
        lambda t: Word.generator(int(t[0][1:]), 1 if t[0][0] == "x" else -1))
    expr = pp.Forward()
    group = pp.Suppress("(") + expr + pp.Suppress(")")
    factor = (gen | group) + pp.Optional(pp.Suppress("^") + integer)
    factor.set_parse_action(lambda t: t[0] ** t[1] if len(t) > 1 else t[0])
    expr <<= pp.ZeroOrMore(factor)
    expr.set_parse_action(lambda t: word_product(t))
    return expr


def parse_word(text: str) -> Word:
    """
    Generators x1, x2, ...; inverse letters X1, X2, ...; integer exponents
    x1^-1, (x1 x2)^4; juxtaposition is multiplication. "" and "1" are the
    identity.
    """
    if text.strip() in ("", "1"):
        return Word.identity()
    try:
        result = _grammar().parse_string(text, parse_all=True)
    except pp.ParseException as e:
        raise InvalidInputError(f"cannot parse word {text!r}: {e.msg}", position=e.loc) from e
    return result[0] if result else Word.identity()


# ---------------------------------------------------------------------------
# Truncated series over F2
# ---------------------------------------------------------------------------

def _check_degree(max_degree: int) -> None:
    if not 1 <= max_degree <= MAX_DEGREE:
        raise InvalidInputError(f"max_degree must be in 1..{MAX_DEGREE}, got {max_degree}")


@dataclass(frozen=True)
class TruncSeries:
    """Element of F2<<X_1, ..., X_r>> modulo monomials of degree > max_degree."""
    max_degree: int
    terms: FrozenSet[Monomial] = field(default_factory=frozenset)

    def __post_init__(self):
        if any(len(m) > self.max_degree for m in self.terms):
            raise InvalidInputError("monomial beyond max_degree")

    @classmethod
    def one(cls, max_degree: int) -> "TruncSeries":
        return cls(max_degree, frozenset({()}))

    def _check(self, other: "TruncSeries") -> None:
        if other.max_degree != self.max_degree:
            raise InvalidInputError("series truncated at different degrees")

    def __add__(self, other: "TruncSeries") -> "TruncSeries":
        self._check(other)
        return TruncSeries(self.max_degree, self.terms ^ other.terms)

    def __mul__(self, other: "TruncSeries") -> "TruncSeries":
        self._check(other)
        out: Set[Monomial] = set()
        for a in self.terms:
            room = self.max_degree - len(a)
            for b in other.terms:
                if len(b) <= room:
                    out ^= {a + b}
        return TruncSeries(self.max_degree, frozenset(out))

    def times_letter(self, i: int, exponent: int) -> "TruncSeries":
        """self * M(x_i^exponent) without building the letter's series."""
        out = set(self.terms)
        for a in self.terms:
            tail: Monomial = (i,)
            while len(a) + len(tail) <= self.max_degree:
                out ^= {a + tail}
                if exponent == 1:
                    break
                tail += (i,)
        return TruncSeries(self.max_degree, frozenset(out))

    def coefficient(self, monomial: Sequence[int]) -> int:
        monomial = tuple(monomial)
        if len(monomial) > self.max_degree:
            raise InvalidInputError(f"{monomial} is beyond max_degree {self.max_degree}")
        return 1 if monomial in self.terms else 0

    def truncated(self, degree: int) -> "TruncSeries":
        return TruncSeries(degree, frozenset(m for m in self.terms if len(m) <= degree))

    def is_one(self) -> bool:
        return self.terms == frozenset({()})

    def monomials(self) -> List[Monomial]:
        return sorted(self.terms, key=lambda m: (len(m), m))

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = ["1" if not m else "".join(f"X{i}" for i in m) for m in self.monomials()]
        return " + ".join(parts)


def magnus(word: Word, max_degree: int) -> TruncSeries:
    """M2(x_i) = 1 + X_i, M2(x_i^-1) = 1 + X_i + X_i^2 + ... (mod 2)."""
    _check_degree(max_degree)
    series = TruncSeries.one(max_degree)
    for i, e in word.letters:
        series = series.times_letter(i, e)
    return series


def mu2(I: Sequence[int], word: Word) -> int:
    if not I:
        raise InvalidInputError("multi-index must be non-empty")
    return magnus(word, len(I)).coefficient(I)


# ---------------------------------------------------------------------------
# Fox calculus over F2[F]
# ---------------------------------------------------------------------------

def fox_derivative(element: Iterable[Word], j: int) -> FrozenSet[Word]:
    """
    d/dx_j of a group-ring element given as the set of its words.
    d(uv) = du + u dv, dx_j = 1, dx_j^-1 = -x_j^-1; signs vanish mod 2.
    """
    out: Set[Word] = set()
    for w in element:
        for t, (i, e) in enumerate(w.letters):
            if i != j:
                continue
            out ^= {w.prefix(t) if e == 1 else w.prefix(t + 1)}
    return frozenset(out)


def fox_mu2(I: Sequence[int], word: Word) -> int:
    """Augmentation of d^n word / dx_{i1} ... dx_{in}; the last index acts first."""
    if not I:
        raise InvalidInputError("multi-index must be non-empty")
    element: FrozenSet[Word] = frozenset({word})
    for j in reversed(tuple(I)):
        element = fox_derivative(element, j)
        if not element:
            return 0
    return len(element) % 2


# ---------------------------------------------------------------------------
# Shuffles and indeterminacy
# ---------------------------------------------------------------------------

def proper_shuffles(I: Sequence[int], J: Sequence[int]) -> List[Monomial]:
    """Order-preserving interleavings of I and J, with multiplicity."""
    I, J = tuple(I), tuple(J)
    if not I or not J:
        raise InvalidInputError("proper shuffles need two non-empty multi-indices")
    n = len(I) + len(J)
    result = []
    for slots in combinations(range(n), len(I)):
        it_i, it_j = iter(I), iter(J)
        chosen = set(slots)
        result.append(tuple(next(it_i) if k in chosen else next(it_j) for k in range(n)))
    return result


def shuffle_check(I: Sequence[int], J: Sequence[int], i: int, word: Word) -> int:
    """Sum over H in PSh(I, J) of mu2(H i; word), mod 2."""
    if len(I) + len(J) + 1 > MAX_DEGREE:
        raise InvalidInputError(f"|I| + |J| must be below {MAX_DEGREE}")
    return sum(mu2(H + (i,), word) for H in proper_shuffles(I, J)) % 2


def lower_indices(I: Sequence[int]) -> Set[Monomial]:
    """Cyclic permutations of proper subsequences of I."""
    I = tuple(I)
    out: Set[Monomial] = set()
    for length in range(1, len(I)):
        for slots in combinations(range(len(I)), length):
            sub = tuple(I[k] for k in slots)
            out.update(sub[r:] + sub[:r] for r in range(length))
    return out


def delta2(I: Sequence[int], e_S: int, lower_mu: Mapping[Monomial, int]) -> int:
    """
    Generator of the ideal of Z/2 spanned by C(2^e_S, t), 1 <= t <= min(|I|, 2^e_S - 1),
    and the supplied mu2(J) for J in lower_indices(I): 0 for the zero ideal,
    1 for all of Z/2. Missing entries of lower_mu count as 0.
    """
    n = len(I)
    if n < 1 or e_S < 0 or n > 2 ** e_S:
        raise InvalidInputError(f"need 1 <= |I| <= 2^e_S, got |I| = {n}, e_S = {e_S}")
    top = min(n, 2 ** e_S - 1)
    if any(comb(2 ** e_S, t) % 2 for t in range(1, top + 1)):
        return 1
    if any(lower_mu.get(J, 0) % 2 for J in lower_indices(I)):
        return 1
    return 0


def milnor_invariant(I: Sequence[int], word: Word, e_S: int) -> Optional[int]:
    """mu2(I; word) modulo delta2; None when the indeterminacy is all of Z/2."""
    lower = {J: mu2(J, word) for J in lower_indices(I)}
    if delta2(I, e_S, lower):
        return None
    return mu2(I, word)
