import dataclasses

import pytest

from resym.cache import SolutionCache
from resym.conic import (check_rational_solution, check_relative_solution, conjugate_solution,
                         rational_from_record, rational_to_record, relative_from_record,
                         relative_to_record, shift_by_unit, solve_legendre, solve_relative_conic)
from resym.errors import BudgetExhausted, InvariantViolation, PreconditionError
from resym.quadfield import QuadInt


# --- x^2 - p1 y^2 - p2 z^2 = 0 ---

@pytest.mark.parametrize("p1, p2, expected", [
    (5, 8081, (241, 100, 1)),
    (5, 29, (23, 10, 1)),
    (13, 17, (-375, 104, 1)),
])
def test_solve_legendre(p1, p2, expected):
    sol = solve_legendre(p1, p2)
    assert (sol.x, sol.y, sol.z) == expected
    assert sol.alpha == QuadInt.of(sol.x, sol.y, p1)
    assert sol.m == 1


def test_solution_side_conditions():
    for p1, p2 in [(5, 29), (13, 17), (5, 8081), (13, 61)]:
        sol = solve_legendre(p1, p2)
        assert sol.x ** 2 - p1 * sol.y ** 2 - p2 * sol.z ** 2 == 0
        assert sol.y % 2 == 0 and sol.y > 0
        assert (sol.x - sol.y) % 4 == 1


def test_precondition_lists_failures():
    with pytest.raises(PreconditionError) as e:
        solve_legendre(5, 13)
    assert "(p1/p2)" in e.value.failed
    with pytest.raises(PreconditionError) as e:
        solve_legendre(5, 5)
    assert "p1 != p2" in e.value.failed


def test_budget_exhausted():
    with pytest.raises(BudgetExhausted):
        solve_legendre(5, 29, budget=0)


def test_checker_rejects_tampered_solution():
    sol = solve_legendre(5, 29)
    bad = dataclasses.replace(sol, x=sol.x + 2, alpha=QuadInt.of(sol.x + 2, sol.y, 5))
    with pytest.raises(InvariantViolation):
        check_rational_solution(bad)


@pytest.mark.parametrize("p1, p2, other_class", [
    (5, 29, (7, 2, 1)),
    (13, 17, (-15, 4, 1)),
])
def test_conjugate_class_solution(p1, p2, other_class):
    # 23 - 10 sqrt 5 times the unit 9 + 4 sqrt 5 is 7 + 2 sqrt 5
    sol = shift_by_unit(conjugate_solution(solve_legendre(p1, p2)))
    assert (sol.x, sol.y, sol.z) == other_class
    check_rational_solution(sol)


def test_unit_shift_and_conjugate_stay_valid():
    sol = solve_legendre(5, 8081)
    shifted = shift_by_unit(sol)
    assert shifted.alpha != sol.alpha
    assert shifted.alpha.norm() == sol.alpha.norm()
    conj = conjugate_solution(sol)
    assert conj.y == -sol.y


def test_rational_record_roundtrip():
    sol = solve_legendre(13, 17)
    assert rational_from_record(rational_to_record(sol)) == sol


def test_cache_replays_solution(tmp_path):
    cache = SolutionCache(str(tmp_path / "solutions.jsonl"))
    first = solve_legendre(5, 29, cache=cache)
    assert len(cache) == 1
    reloaded = SolutionCache(str(tmp_path / "solutions.jsonl"))
    assert solve_legendre(5, 29, cache=reloaded) == first


# --- X^2 - p3 Y^2 - alpha Z^2 = 0 over Z[(1 + sqrt 5)/2] ---

ALPHA = QuadInt.of(241, 100, 5)


def test_relative_conic_first_hit():
    sol = solve_relative_conic(5, 101, ALPHA, avoid={449})
    assert sol.case_tag == "Z_odd"
    assert sol.Z in (QuadInt.rational(1, 5), QuadInt.rational(-1, 5))
    assert sol.Y in (QuadInt.rational(2, 5), QuadInt.rational(-2, 5))
    assert sol.theta().coords4() == (100, 8, 8, 0)
    assert sol.order % 2 == 1


def test_relative_solution_satisfies_equation():
    sol = solve_relative_conic(5, 101, ALPHA)
    check_relative_solution(sol)
    lhs = sol.X * sol.X - sol.Y * sol.Y * 101 - ALPHA * sol.Z * sol.Z
    assert lhs.is_zero()


def test_relative_record_roundtrip():
    sol = solve_relative_conic(5, 101, ALPHA)
    assert relative_from_record(relative_to_record(sol)) == sol


def test_relative_conic_preconditions():
    with pytest.raises(PreconditionError) as e:
        solve_relative_conic(17, 101, QuadInt.of(1, 0, 17))
    assert "p1 mod 8" in e.value.failed
    with pytest.raises(PreconditionError) as e:
        solve_relative_conic(5, 101, QuadInt.of(2, 1, 5))
    assert "alpha mod 4" in e.value.failed
