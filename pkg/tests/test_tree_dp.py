from __future__ import annotations

from fractions import Fraction

import pytest

from fctp.errors import CorruptTables, InfeasibleFlow, UnsupportedVariant
from fctp.formulations import build_qdp, check_point, objective_value
from fctp.model import Variant, new_instance, root_tree
from fctp.oracle import optimal_solutions
from fctp.tree_dp import INF, arc_cost, encode_uv, fill_tables, recover_solution, solve_tree
from fctp.verify import alpha_cells_expected, beta_cells_expected


@pytest.mark.parametrize(
    "l, p, q, want",
    [(0, -2, 1, 0), (1, -2, 1, -1), (3, Fraction(1, 2), 5, Fraction(13, 2)), (2, -1, 1, -1)],
)
def test_arc_cost(l, p, q, want):
    assert arc_cost(l, Fraction(p), Fraction(q)) == want


def test_inf_absorbs():
    assert INF + 5 is INF and 5 + INF is INF
    assert Fraction(10**9) < INF and not INF < INF


def test_single_node():
    rt = root_tree(new_instance([4], [], [], []))
    tables, sol = solve_tree(rt)
    assert sol.x == () and sol.objective == 0 and tables.root_value == 0


def test_single_arc(single_arc):
    tables, sol = solve_tree(single_arc)
    # c over l = 0, 1, 2 is 0, 0, -1
    assert list(tables.beta[0]) == [0, 0, -1]
    assert sol.x == (2,) and sol.objective == -1


def test_star_tie_break(star):
    tables, sol = solve_tree(star)
    assert sol.objective == -1
    optimal = {s.x for s in optimal_solutions(star.instance)}
    assert optimal == {(0, 2), (2, 0), (2, 1), (1, 2)}
    # smallest total at the root, then the smallest split
    assert sol.x == (0, 2)


def test_nonnegative_costs_give_zero_flow():
    inst = new_instance([3, 2, 4, 1], [(1, 2), (1, 3), (3, 4)], [0, 1, 2], [1, 0, 3])
    _, sol = solve_tree(root_tree(inst))
    assert sol.x == (0, 0, 0) and sol.objective == 0


def test_reduction_tree_hits_yes_value():
    # one supplier with b = 6, customers 2, 2, 2: a star, yes-instance of 3-Partition
    inst = new_instance([6, 2, 2, 2], [(1, 2), (1, 3), (1, 4)], [-2] * 3, [1] * 3)
    _, sol = solve_tree(root_tree(inst))
    assert sol.objective == -2 * 6 + 3


def test_beta_bounded_by_cost(star):
    tables = fill_tables(star)
    inst = star.instance
    for e, row in tables.beta.items():
        for l, val in enumerate(row):
            assert val <= arc_cost(l, inst.p[e], inst.q[e])


def test_cell_counts(star):
    tables = fill_tables(star)
    assert tables.alpha_cell_count() == alpha_cells_expected(star) == 2 * 4
    assert tables.beta_cell_count() == beta_cells_expected(star) == 3 + 3


def test_root_choice_does_not_change_value():
    inst = new_instance(
        [3, 2, 4, 1, 2], [(1, 2), (1, 3), (3, 4), (3, 5)], [-1, -2, -3, 1], [1, 2, 0, 0]
    )
    values = {solve_tree(root_tree(inst, r))[1].objective for r in inst.nodes}
    assert len(values) == 1


def test_recover_detects_corruption(star):
    tables = fill_tables(star)
    tables.back_alpha.clear()
    with pytest.raises(CorruptTables):
        recover_solution(tables, star)


def test_variants_rejected():
    inst = new_instance([2, 2], [(1, 2)], [0], [0], Variant(link_lower=True))
    with pytest.raises(UnsupportedVariant):
        solve_tree(root_tree(inst))


def test_certificate_star(star):
    cert = encode_uv(star, [2, 1])
    pt = cert.assignment()
    assert pt["u_1_2_0_2"] == 1 and pt["u_1_3_2_3"] == 1
    assert pt["v_1_2_2_0"] == 1 and pt["v_1_3_1_0"] == 1
    model = build_qdp(star)
    assert check_point(model, pt) == []
    assert objective_value(model, pt) == cert.objective == -1


def test_certificate_zero_flow(single_arc):
    cert = encode_uv(single_arc, [0])
    assert cert.assignment()["v_1_2_0_0"] == 1
    assert cert.objective == 0


def test_certificate_matches_dp_value(star):
    tables, sol = solve_tree(star)
    cert = encode_uv(star, sol.x)
    assert check_point(build_qdp(star), cert.assignment()) == []
    assert cert.objective == tables.root_value


def test_certificate_rejects_infeasible_flow(star):
    with pytest.raises(InfeasibleFlow):
        encode_uv(star, [2, 2])
    with pytest.raises(InfeasibleFlow):
        encode_uv(star, [3, 0])
