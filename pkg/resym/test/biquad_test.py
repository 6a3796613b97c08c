import pytest

from resym.biquad import (BiquadInt, ONE, order_basis, relative_c, residue_ring, sqrt_mod4,
                          unit_order_mod4, verify_u2_structure)
from resym.errors import InvalidInputError, OrderClosureError
from resym.quadfield import QuadInt

P1, P3 = 5, 101
BETA13 = QuadInt.rational(P3, P1)
ALPHA = QuadInt.of(241, 100, P1)       # 241^2 - 5 * 100^2 = 8081


def _theta() -> BiquadInt:
    return BiquadInt.from_pair(QuadInt.of(25, 2, P1), QuadInt.rational(2, P1), BETA13)


# --- Elements ---

def test_coords4_of_theta():
    assert _theta().coords4() == (100, 8, 8, 0)


def test_from_coords4_inverts_coords4():
    t = _theta()
    assert BiquadInt.from_coords4(t.coords4(), BETA13) == t


def test_from_coords4_rejects_non_integers():
    with pytest.raises(InvalidInputError):
        BiquadInt.from_coords4((1, 0, 0, 0), BETA13)


def test_theta_times_conjugate_is_alpha():
    t = _theta()
    prod = t * t.conj_beta()
    assert prod.is_in_k()
    assert prod.u == ALPHA
    assert t.relative_norm() == ALPHA
    assert t.absolute_norm() == 8081


def test_conj_m_stays_in_k13():
    t = _theta()
    assert t.conj_m().beta == BETA13
    assert t.conj_m().coords4() == (100, -8, 8, 0)


def test_relative_c_requires_1_mod_4():
    assert relative_c(BETA13) == QuadInt.rational(25, P1)
    with pytest.raises(OrderClosureError):
        relative_c(QuadInt.rational(103, P1))


def test_mixed_orders_rejected():
    other = BiquadInt.from_k(QuadInt.rational(1, P1), ALPHA)
    with pytest.raises(InvalidInputError):
        _theta() + other


# --- Order basis and residues mod 4 ---

def test_order_basis_table():
    basis = order_basis(P1, P3)
    assert basis.table.shape == (4, 4, 4)
    # 1 * anything is itself
    for j in range(4):
        assert tuple(basis.table[0, j]) == tuple(1 if k == j else 0 for k in range(4))


def test_residue_ring_units():
    ring = residue_ring(P1, P3)
    assert ring.mul(ONE, ONE) == ONE
    assert ring.unit_count % 16 == 0
    assert ring.is_unit[ring.reduce(_theta())]


@pytest.mark.parametrize("beta", [P3, ALPHA])
def test_u2_structure(beta):
    report = verify_u2_structure(P1, beta)
    assert report.ok, report.failures
    assert report.subgroup_order == 16


SQRT5 = BiquadInt.from_k(QuadInt.of(0, 1, P1), BETA13)


@pytest.mark.parametrize("element, order", [(_theta(), 1), (SQRT5, 2)])
def test_sqrt_mod4_when_order_is_odd(element, order):
    assert unit_order_mod4(element) == order
    lam = sqrt_mod4(element)
    ring = residue_ring(P1, P3)
    if order % 2:
        assert lam is not None
        assert ring.mul(ring.reduce(lam), ring.reduce(lam)) == ring.reduce(element)
    else:
        assert lam is None
        assert ring.sqrt_exhaustive(ring.reduce(element)) is None


def test_sqrt_agrees_with_exhaustive_search():
    ring = residue_ring(P1, P3)
    for code in range(256):
        if not ring.is_unit[code] or ring.order(code) % 2 == 0:
            continue
        root = ring.sqrt(code)
        assert ring.mul(root, root) == code
        assert ring.sqrt_exhaustive(code) is not None


def test_squares_are_exactly_odd_order_units():
    ring = residue_ring(P1, P3)
    units = [c for c in range(256) if ring.is_unit[c]]
    assert len(units) == 144
    for code in units:
        is_square = ring.sqrt_exhaustive(code) is not None
        assert is_square == (ring.order(code) % 2 == 1), code


def test_sqrt_mod4_of_a_square():
    ring = residue_ring(P1, P3)
    for code in range(256):
        if not ring.is_unit[code]:
            continue
        u = ring.lift(code)
        lam = sqrt_mod4(u * u)
        assert lam is not None
        assert ring.mul(ring.reduce(lam), ring.reduce(lam)) == ring.mul(code, code)
