import dataclasses
from itertools import islice, permutations, product

import pytest
from sympy import primerange

from resym.arith import sqrt_mod
from resym.conic import normalize_relative_solution, solve_relative_conic
from resym.errors import InvalidInputError, InvariantViolation, PreconditionError
from resym.nilgroup import verify_tau_action
from resym.quadfield import QuadInt, class_number_is_one
from resym.redei import redei_certificate
from resym.scan import candidate_quadruple_sets, prime_pool, shuffle_partitions
from resym.symbol4 import (assemble_K, build_K, check_certificate, compositum_crosscheck,
                           cross_field_generator, evaluate_symbol, generator_characters,
                           shuffle_product, symbol4, symbol_to_record, theta_prime_characters,
                           validate_quadruple)

QUAD = (5, 8081, 101, 449)
ALPHA = QuadInt.of(241, 100, 5)


@pytest.fixture(scope="module")
def result():
    return symbol4(*QUAD)


# --- Admissibility ---

def test_known_quadruple_is_admissible():
    report = validate_quadruple(*QUAD)
    assert report.ok, report.failed


def test_validation_collects_failures():
    report = validate_quadruple(17, 8081, 101, 449)
    assert not report.ok
    assert "p1 mod 8" in report.failed


def test_symbol_refuses_inadmissible_input():
    with pytest.raises(PreconditionError) as e:
        symbol4(17, 8081, 101, 449)
    assert "p1 mod 8" in e.value.failed


# --- The field K ---

def test_generators(result):
    cert = result.certificate
    assert cert.case_tag == "Z_odd"
    assert cert.h == 1
    assert cert.thetas[0].coords4() == (100, 8, 8, 0)
    assert cert.theta_primes == ()


def test_cross_field_generator(result):
    g = cross_field_generator(result.certificate)
    assert g == QuadInt(2018, 200, 101)         # 1009 + 100 sqrt(101)
    assert g.norm() == 8081                     # p2 h^2


def test_check_certificate_accepts_built_field():
    check_certificate(build_K(5, 8081, 101, avoid={449}))


def test_check_certificate_rejects_twisted_generator(result):
    cert = result.certificate
    t1, t2, t3, t4 = cert.thetas
    bad = dataclasses.replace(cert, thetas=(t1 * 5, t2, t3, t4))
    with pytest.raises(InvariantViolation):
        check_certificate(bad)


# --- The symbol ---

def test_known_symbol_value(result):
    assert result.value == -1
    assert result.p4 == 449


def test_characters_split_F(result):
    c = result.characters
    assert len(c) == 4 and 0 not in c
    # p4 splits in the degree-32 subfield: the first three characters agree
    assert c[0] == c[1] == c[2]
    assert result.value == (1 if all(x == 1 for x in c) else -1)


def test_compositum_crosscheck(result):
    assert compositum_crosscheck(result.certificate, 10)


def test_compositum_crosscheck_detects_p1_twist(result):
    cert = result.certificate
    t1, t2, t3, t4 = cert.thetas
    twisted = dataclasses.replace(cert, thetas=(t1 * 5, t2, t3, t4))
    assert not compositum_crosscheck(twisted, 20)


def test_record(result):
    rec = symbol_to_record(result)
    assert rec.symbol == -1
    assert set(rec.embedding_roots) == {"s1", "s3"}
    assert rec.certificate.thetas[0].coords == ("100", "8", "8", "0")
    assert rec.certificate.h == "1"


def test_shuffle_product_needs_a_partition():
    with pytest.raises(InvalidInputError):
        shuffle_product(QUAD, (1,), (2, 3), 3)


# --- A Y_odd field ---
# (40 + 5 sqrt5)^2 = 761 + 4 alpha: Y = 1 odd, Z = 2 even

@pytest.fixture(scope="module")
def y_odd_cert():
    sol = normalize_relative_solution(5, 761, ALPHA, QuadInt.of(40, 5, 5),
                                      QuadInt.rational(1, 5), QuadInt.rational(2, 5))
    return assemble_K(redei_certificate(5, 8081), sol)


def test_y_odd_normalization(y_odd_cert):
    sol = y_odd_cert.relsol
    assert sol.case_tag == "Y_odd"
    assert (sol.unit, sol.order) == ("eps*theta", 1)
    assert sol.X == QuadInt.of(105, 50, 5)
    assert sol.Y == QuadInt.of(2, 1, 5)
    assert sol.Z == QuadInt.of(4, 2, 5)


def test_y_odd_generators(y_odd_cert):
    cert = y_odd_cert
    assert cert.case_tag == "Y_odd"
    assert cert.h == 4                                  # |N(4 + 2 sqrt5)|
    check_certificate(cert)
    t1, t2, t3, t4 = cert.thetas
    assert (t1 * t2 * t3 * t4).coords4() == (4 * 16 * 8081 * 4 ** 2, 0, 0, 0)
    q1, q2, _, _ = cert.theta_primes
    n12 = q1 * q2
    assert n12.is_in_k()
    assert n12.u == QuadInt.of(9, 4, 5) * 761           # p3 Y^2
    assert verify_tau_action(cert).certificate_failures == []


def test_y_odd_certificate_rejects_wrong_height(y_odd_cert):
    with pytest.raises(InvariantViolation):
        check_certificate(dataclasses.replace(y_odd_cert, h=3))


def test_y_odd_eta_and_theta_prime_characters_agree(y_odd_cert):
    checked = 0
    for q in primerange(3, 4000):
        if q in (5, 761, 8081):
            continue
        s1, s3 = sqrt_mod(5, q), sqrt_mod(761, q)
        if s1 is None or s3 is None:
            continue
        sa, sb = sqrt_mod((241 + 100 * s1) % q, q), sqrt_mod((241 - 100 * s1) % q, q)
        if sa is None or sb is None:
            continue
        eta = generator_characters(y_odd_cert, q, s1, s3)
        prime = theta_prime_characters(y_odd_cert, q, s1, sa, sb)
        assert prime[0] == prime[1] and prime[2] == prime[3]
        assert eta == (prime[0], prime[0], prime[2], prime[2])
        checked += 1
    assert checked >= 5


def test_theta_prime_characters_need_y_odd(result):
    with pytest.raises(InvalidInputError):
        theta_prime_characters(result.certificate, 449, 1, 1, 1)


def test_generator_characters_check_roots(result):
    with pytest.raises(InvalidInputError):
        generator_characters(result.certificate, 449, 2, 3)


# --- Independence of choices ---

def test_symbol_from_second_relative_solution(result):
    first = result.certificate.relsol
    second = solve_relative_conic(5, 101, first.alpha, avoid={449}, exclude=[first])
    assert second.Y * first.Z not in (second.Z * first.Y, -(second.Z * first.Y))
    cert = assemble_K(result.certificate.redei, second)
    assert evaluate_symbol(cert, 449).value == result.value == -1


def _value(chars):
    return 1 if all(c == 1 for c in chars) else -1


@pytest.fixture(scope="module")
def scanned_symbols():
    """symbol4 on every ordering of admissible sets with p1 = 5 below 2000."""
    admissible = (rest for _, rest in candidate_quadruple_sets(prime_pool(2000), p1=5)
                  if validate_quadruple(5, *rest).ok)
    out = []
    for rest in islice(admissible, 20):
        out.extend(symbol4(5, *perm) for perm in permutations(rest))
        if len(out) >= 30 and {r.value for r in out} == {1, -1}:
            break
    return out


@pytest.mark.slow
def test_scanned_symbols_ignore_root_choice(scanned_symbols):
    assert len({r.certificate.p2 for r in scanned_symbols}) >= 3
    for r in scanned_symbols:
        s1, s3 = r.embedding_roots["s1"], r.embedding_roots["s3"]
        for e1, e3 in product((1, -1), repeat=2):
            chars = generator_characters(r.certificate, r.p4, e1 * s1 % r.p4, e3 * s3 % r.p4)
            assert _value(chars) == r.value


@pytest.mark.slow
def test_scanned_symbols_take_both_values(scanned_symbols):
    assert len(scanned_symbols) >= 30
    split = [r for r in scanned_symbols if r.value == 1]
    assert split
    for r in split:
        assert r.characters == (1, 1, 1, 1)


@pytest.mark.slow
def test_shuffle_product_on_scanned_set():
    # every prime 5 mod 8 with class number one, so each reordering is admissible
    pool = [p for p in prime_pool(1000) if p % 8 == 5 and class_number_is_one(p)]
    primes = next((head, *rest) for head, rest in candidate_quadruple_sets(pool)
                  if validate_quadruple(head, *rest).ok)
    for I, J, l in shuffle_partitions():
        assert shuffle_product(primes, I, J, l) == 1
