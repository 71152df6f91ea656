"""Property tests over small random trees with rational costs."""

from __future__ import annotations

import random
from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from fctp import io
from fctp.formulations import build_ip, build_ip_z, build_qdp, build_qsn, check_point
from fctp.liftings import encode_f, lift_z, pi_map, project, random_integer_flow, sample_p_point
from fctp.lpformat import dumps_lp, loads_lp
from fctp.model import new_instance, root_tree, validate_solution
from fctp.oracle import brute_force_solve
from fctp.tree_dp import encode_uv, solve_tree

small_rational = st.fractions(min_value=-4, max_value=4, max_denominator=6)
fixed_cost = st.fractions(min_value=0, max_value=4, max_denominator=6)


@st.composite
def trees(draw, max_nodes=6, b_max=4):
    n = draw(st.integers(1, max_nodes))
    parents = [draw(st.integers(1, v)) for v in range(1, n)]
    b = draw(st.lists(st.integers(0, b_max), min_size=n, max_size=n))
    p = draw(st.lists(small_rational, min_size=n - 1, max_size=n - 1))
    q = draw(st.lists(fixed_cost, min_size=n - 1, max_size=n - 1))
    arcs = [(parents[v - 2], v) for v in range(2, n + 1)]
    return new_instance(b, arcs, p, q)


@settings(max_examples=150, deadline=None)
@given(trees(), st.data())
def test_dp_matches_oracle_from_any_root(inst, data):
    root = data.draw(st.integers(1, inst.num_nodes))
    rt = root_tree(inst, root)
    tables, sol = solve_tree(rt)
    assert sol.objective == brute_force_solve(inst).objective == tables.root_value
    assert validate_solution(inst, sol) == []


@settings(max_examples=100, deadline=None)
@given(trees(), st.randoms(use_true_random=False))
def test_projection_consistency(inst, rnd):
    rt = root_tree(inst)
    x = random_integer_flow(inst, random.Random(rnd.random()))
    want = (tuple(Fraction(v) for v in x), tuple(Fraction(int(v > 0)) for v in x))
    f = encode_f(rt, x)
    uv = encode_uv(rt, x)
    assert check_point(build_qsn(rt), f.values) == []
    assert check_point(build_qdp(rt), uv.assignment()) == []
    assert project(f) == want
    assert pi_map(rt, f).values == uv.assignment()


@settings(max_examples=100, deadline=None)
@given(trees(), st.randoms(use_true_random=False))
def test_sampled_relaxation_points_lift(inst, rnd):
    x, y = sample_p_point(inst, random.Random(rnd.random()))
    pt = lift_z(inst, x, y)
    assert check_point(build_ip_z(inst), pt.values) == []
    assert project(pt) == (tuple(x), tuple(y))


@settings(max_examples=60, deadline=None)
@given(trees())
def test_lp_and_json_round_trips(inst):
    for model in (build_ip(inst), build_ip_z(inst), build_qsn(root_tree(inst), with_z=True)):
        text = dumps_lp(model)
        assert dumps_lp(loads_lp(text)) == text
    assert io.loads_instance(io.dumps_instance(inst)) == inst
