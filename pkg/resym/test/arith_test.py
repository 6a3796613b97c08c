import random
from fractions import Fraction

import pytest
from sympy import primerange

from resym.arith import (INFINITY, hilbert_symbol, is_prime, legendre_precheck, legendre_symbol,
                         local_solvability, relevant_places, sqrt_mod)
from resym.errors import InvalidInputError


# --- Legendre symbol and square roots ---

def test_legendre_small_cases():
    assert legendre_symbol(2, 7) == 1
    assert legendre_symbol(3, 7) == -1
    assert legendre_symbol(14, 7) == 0
    assert legendre_symbol(-1, 13) == 1
    assert legendre_symbol(-1, 11) == -1


def test_legendre_is_periodic_in_a():
    for a in range(-30, 30):
        assert legendre_symbol(a, 29) == legendre_symbol(a + 29, 29)


def test_legendre_is_multiplicative():
    rng = random.Random(3)
    for _ in range(500):
        p = rng.choice([7, 13, 29, 101, 449, 8081])
        a, b = rng.randint(-10**6, 10**6), rng.randint(-10**6, 10**6)
        assert legendre_symbol(a * b, p) == legendre_symbol(a, p) * legendre_symbol(b, p)


def test_legendre_matches_euler_and_reciprocity():
    primes = list(primerange(3, 500))
    for p in primes:
        for a in (2, 3, 5, p - 1):
            e = pow(a, (p - 1) // 2, p)
            assert legendre_symbol(a, p) == (0 if e == 0 else 1 if e == 1 else -1)
    for p in primes:
        for q in primes:
            if p < q:
                sign = -1 if (p - 1) * (q - 1) % 8 else 1
                assert legendre_symbol(p, q) * legendre_symbol(q, p) == sign


def test_legendre_rejects_even_modulus():
    with pytest.raises(InvalidInputError):
        legendre_symbol(3, 8)


def test_sqrt_mod_returns_smaller_root():
    assert sqrt_mod(5, 11) == 4
    assert sqrt_mod(0, 13) == 0
    assert sqrt_mod(2, 5) is None


def test_sqrt_mod_squares_back():
    p = 8081
    for a in range(1, 200):
        r = sqrt_mod(a, p)
        if legendre_symbol(a, p) == 1:
            assert r is not None and r * r % p == a and r <= (p - 1) // 2
        else:
            assert r is None


def test_sqrt_mod_exhaustive_below_200():
    for p in primerange(3, 200):
        squares = {x * x % p for x in range(p)}
        for a in range(p):
            r = sqrt_mod(a, p)
            if a in squares:
                assert r is not None and r * r % p == a and r <= (p - 1) // 2
            else:
                assert r is None


def test_is_prime():
    assert is_prime(8081)
    assert not is_prime(1)
    assert not is_prime(8083 * 8087)


# --- Hilbert symbols ---

def test_hilbert_at_infinity():
    assert hilbert_symbol(-1, -1, INFINITY) == -1
    assert hilbert_symbol(-1, 3, INFINITY) == 1


def test_hilbert_two_adic():
    # z^2 = -x^2 - y^2 has no 2-adic solution
    assert hilbert_symbol(-1, -1, 2) == -1
    assert hilbert_symbol(5, 29, 2) == 1


def test_hilbert_odd_prime_example():
    assert hilbert_symbol(2, 3, 3) == -1
    assert local_solvability(2, 3) == [2, 3]


def test_hilbert_accepts_fractions():
    assert hilbert_symbol(Fraction(5, 4), 29, 29) == hilbert_symbol(5, 29, 29)


def test_product_formula():
    for a, b in [(5, 29), (3, 7), (-1, 13), (6, 35), (13, 17)]:
        # an even number of places with symbol -1
        assert len(local_solvability(a, b)) % 2 == 0


# --- Solvability of x^2 - p1 y^2 - p2 z^2 = 0 ---

def test_precheck_accepts_split_pairs():
    assert legendre_precheck(5, 29) == []
    assert legendre_precheck(13, 17) == []
    assert legendre_precheck(5, 8081) == []


def test_precheck_lists_every_failure():
    failed = legendre_precheck(5, 13)
    assert "(p1/p2)" in failed and "(p2/p1)" in failed
    failed = legendre_precheck(7, 29)
    assert "p1 mod 4" in failed


def test_product_formula_on_random_rationals():
    rng = random.Random(17)

    def rational():
        return Fraction(rng.choice((-1, 1)) * rng.randint(1, 500), rng.randint(1, 500))

    for _ in range(200):
        a, b = rational(), rational()
        signs = [hilbert_symbol(a, b, v) for v in relevant_places(a, b)]
        assert signs.count(-1) % 2 == 0, (a, b)
