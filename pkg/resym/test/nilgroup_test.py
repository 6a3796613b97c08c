import random

import pytest

from resym.errors import InvalidInputError
from resym.magnus import Word, mu2, parse_word
from resym.nilgroup import (N4_GENERATORS, RELATIONS, TAU, RadicalAction, UnipotentMatrix, closure,
                            evaluate, rho_I, rho_relator_check, verify_n4_presentation,
                            verify_tau_action)

IDENTITY = UnipotentMatrix.identity(4)


# --- Matrices ---

def test_elementary_matrices_are_involutions():
    for g in N4_GENERATORS.values():
        assert (g * g).is_identity()
        assert g.inverse() == g


def test_inverse_and_hash():
    g = N4_GENERATORS[1] * N4_GENERATORS[2] * N4_GENERATORS[3]
    assert (g * g.inverse()).is_identity()
    assert len({g, g * IDENTITY, IDENTITY}) == 2


def test_rejects_non_unipotent():
    with pytest.raises(InvalidInputError):
        UnipotentMatrix([[1, 0], [1, 1]])
    with pytest.raises(InvalidInputError):
        UnipotentMatrix.elementary(4, 3, 2)


def test_closure_of_N3():
    gens = [UnipotentMatrix.elementary(3, 1, 2), UnipotentMatrix.elementary(3, 2, 3)]
    assert len(closure(gens, UnipotentMatrix.identity(3))) == 8


# --- The presentation ---

def test_presentation_of_N4():
    report = verify_n4_presentation()
    assert report.ok
    assert report.order == 64
    assert all(report.relations[r] for r in RELATIONS)
    assert report.summary() == "8/8 relations OK, order 64"


def test_corner_word_is_E14():
    g = evaluate(parse_word("(x1 x2 x3 x2)^2"), N4_GENERATORS, IDENTITY)
    assert g.off_diagonal() == [(1, 4)]


# --- rho_I ---

def test_rho_entries_are_magnus_coefficients():
    w = parse_word("(x1 x2 x3 x2)^2")
    rho = rho_I(w, (1, 2, 3, 4))
    assert rho.n == 4
    assert rho.off_diagonal() == [(1, 4)]
    assert rho.entry(1, 4) == mu2((1, 2, 3), w) == 1
    # the last index never enters
    assert rho_I(w, (1, 2, 3, 1)) == rho


def test_rho_of_a_generator():
    rho = rho_I(Word.of(1), (1, 2))
    assert rho.n == 2
    assert rho.off_diagonal() == [(1, 2)]
    assert rho_I(Word.of(2), (1, 2)).is_identity()


def test_rho_needs_two_indices():
    with pytest.raises(InvalidInputError):
        rho_I(Word.of(1), (1,))


def test_rho_is_a_homomorphism():
    I = (1, 2, 3)
    u, v = parse_word("x1 X2 x3 x3"), parse_word("x2 x1 X3")
    assert rho_I(u * v, I) == rho_I(u, I) * rho_I(v, I)
    assert rho_I(Word.identity(), I).is_identity()


def test_rho_is_a_homomorphism_on_random_pairs():
    rng = random.Random(8)
    I = (1, 2, 3, 1)
    for _ in range(200):
        u = Word(tuple((rng.randint(1, 3), rng.choice((1, -1))) for _ in range(6)))
        v = Word(tuple((rng.randint(1, 3), rng.choice((1, -1))) for _ in range(6)))
        assert rho_I(u * v, I) == rho_I(u, I) * rho_I(v, I)


def test_relators_vanish_and_corner_survives():
    report = rho_relator_check(seed=3, samples=8)
    assert report.ok
    assert report.corner_values == [1] * 8


# --- Galois action on the radicals ---

def test_tau_generators():
    for t in TAU.values():
        assert t * t == RadicalAction.identity()
    assert TAU[2].e2 == -1
    assert TAU[1].pi(1) == 3 and TAU[3].pi(1) == 2


def test_tau_action_matches_N4():
    report = verify_tau_action()
    assert report.ok
    assert report.order == 64
    assert report.homomorphism is True
    assert report.corner == [(1, 4)]


def test_corner_element_fixes_F():
    w2 = evaluate(parse_word("(x1 x2 x3 x2)^2"), TAU, RadicalAction.identity())
    assert w2.fixes_subfield_F()
    assert w2.table()["sqrt_t1"] == "-sqrt_t1"
