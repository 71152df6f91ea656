from __future__ import annotations

from fractions import Fraction

import pytest

from fctp.errors import BudgetExceeded, InfeasibleInstance
from fctp.model import Solution, Variant, bipartite_instance, new_instance, validate_solution
from fctp.oracle import brute_force_solve, enumerate_feasible, optimal_solutions, search_bound


def _plain_optimum(inst):
    """Straight minimum over every enumerated (x, y) pair, as an independent reference."""
    return min(s.objective for s in enumerate_feasible(inst))


def test_single_arc():
    inst = new_instance([2, 2], [(1, 2)], [-1], [1])
    sol = brute_force_solve(inst)
    assert sol.x == (2,) and sol.objective == -1


def test_enumeration_counts_y_choices():
    inst = new_instance([1, 1], [(1, 2)], [0], [0])
    assert [(s.x, s.y) for s in enumerate_feasible(inst)] == [((0,), (0,)), ((0,), (1,)), ((1,), (1,))]
    lower = inst.with_variant(Variant(link_lower=True))
    assert [(s.x, s.y) for s in enumerate_feasible(lower)] == [((0,), (0,)), ((1,), (1,))]


def test_zero_capacity_arc_enumeration():
    inst = new_instance([0, 2], [(1, 2)], [0], [0])
    assert [(s.x, s.y) for s in enumerate_feasible(inst)] == [((0,), (0,)), ((0,), (1,))]


def test_equality_customer_enumeration():
    inst = new_instance([1, 1, 1], [(1, 3), (2, 3)], [0, 0], [0, 0], Variant(frozenset({3})))
    flows = {s.x for s in enumerate_feasible(inst)}
    assert flows == {(0, 1), (1, 0)}


@pytest.mark.parametrize("variant", [Variant(), Variant(frozenset({4, 5}), False), Variant(frozenset({4}), True)])
def test_enumerated_solutions_are_feasible(variant):
    inst = bipartite_instance([2, 1, 2], [1, 2], [[-1, 0], [2, -3], [0, 1]], [[1, 2], [0, 1], [3, 0]], variant)
    sols = list(enumerate_feasible(inst))
    assert sols and all(validate_solution(inst, s) == [] for s in sols)
    assert len({(s.x, s.y) for s in sols}) == len(sols)
    assert brute_force_solve(inst).objective == min(s.objective for s in sols)


@pytest.mark.parametrize("link_lower", [False, True])
def test_memoised_search_matches_plain_enumeration(link_lower):
    inst = bipartite_instance(
        [3, 2], [2, 2, 1], [[-2, -1, 0], [-3, 1, -1]], [[1, 0, 2], [3, 1, 0]],
        Variant(frozenset({3, 4}), link_lower),
    )
    sol = brute_force_solve(inst)
    assert sol.objective == _plain_optimum(inst)
    assert validate_solution(inst, sol) == []


def test_rational_costs():
    inst = new_instance([3, 3, 1], [(1, 2), (1, 3)], ["-1/3", "-5/7"], ["1/2", 0])
    sol = brute_force_solve(inst)
    assert sol.objective == _plain_optimum(inst)
    assert isinstance(sol.objective, Fraction)


def test_lexicographic_tie_break():
    inst = new_instance([1, 1, 1], [(1, 2), (1, 3)], [-1, -1], [0, 0])
    assert brute_force_solve(inst).x == (0, 1)
    assert [s.x for s in optimal_solutions(inst)] == [(0, 1), (1, 0)]
    assert len(list(optimal_solutions(inst, max_count=1))) == 1


def test_equality_rows_infeasible():
    inst = new_instance([1, 3], [(1, 2)], [0], [0], Variant(frozenset({2})))
    with pytest.raises(InfeasibleInstance):
        brute_force_solve(inst)
    assert list(enumerate_feasible(inst)) == []


def test_budget():
    inst = bipartite_instance([5] * 3, [5] * 3, 0, 0)
    assert search_bound(inst) == 6**9
    with pytest.raises(BudgetExceeded) as err:
        brute_force_solve(inst, limit=1000)
    assert err.value.bound == 6**9


def test_reduction_yes_instance_value():
    # (3, 4, 5) with b = 12 is outside the strict 3-Partition range but the instance still solves
    inst = bipartite_instance([12], [3, 4, 5], -2, 1)
    sol = brute_force_solve(inst)
    assert sol.objective == -21 == -2 * 1 * 12 + 3 * 1
    assert sol == Solution.from_flows(inst, [3, 4, 5])
