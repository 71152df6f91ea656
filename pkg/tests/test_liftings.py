from __future__ import annotations

import random
from fractions import Fraction

import pytest

from fctp.errors import InfeasibleFlow, NotInP, NotInQsn, ZeroCapacityArcWithFlow
from fctp.formulations import build_ip_z, build_qdp, build_qsn, check_point
from fctp.liftings import Space, check_in_p, combine, encode_f, lift_z, pi_map, project, sample_p_point
from fctp.model import new_instance, root_tree
from fctp.tree_dp import encode_uv

F = Fraction


def test_lift_integral_top_level():
    inst = new_instance([2, 2], [(1, 2)], [0], [0])
    pt = lift_z(inst, [2], [1])
    assert pt.values["z_1_2_2"] == 1 and pt.values.get("z_1_2_0", 0) == 0


def test_lift_half_point():
    inst = new_instance([2, 2], [(1, 2)], [0], [0])
    pt = lift_z(inst, [F(1)], [F(1, 2)])
    assert pt.values["z_1_2_2"] == F(1, 2) and pt.values["z_1_2_0"] == F(1, 2)
    model = build_ip_z(inst)
    assert check_point(model, pt.values) == []
    yz = {c.name: c for c in model.constraints}["yz_1_2"]
    assert sum(c * pt.values.get(n, 0) for n, c in yz.coeffs) == yz.rhs  # tight
    assert project(pt) == ((F(1),), (F(1, 2),))


def test_lift_zero_capacity_arc():
    inst = new_instance([0, 2], [(1, 2)], [0], [0])
    pt = lift_z(inst, [0], [F(1, 3)])
    assert {k: v for k, v in pt.values.items() if k.startswith("z_")} == {"z_1_2_0": 1}
    with pytest.raises(ZeroCapacityArcWithFlow):
        lift_z(inst, [F(1, 2)], [1])


def test_lift_rejects_points_outside_p():
    inst = new_instance([2, 2], [(1, 2)], [0], [0])
    with pytest.raises(NotInP):
        lift_z(inst, [2], [F(1, 2)])
    with pytest.raises(NotInP):
        check_in_p(inst, [3], [1])


def test_project_z_space():
    inst = new_instance([2, 2], [(1, 2)], [0], [0])
    pt = lift_z(inst, [1], [F(1, 2)])
    assert pt.space is Space.Z and pt.consistent()


def test_sampled_points_lift():
    inst = new_instance([3, 2, 4, 1], [(1, 2), (1, 3), (3, 4)], [0] * 3, [0] * 3)
    model = build_ip_z(inst)
    rng = random.Random(4)
    for _ in range(50):
        x, y = sample_p_point(inst, rng)
        pt = lift_z(inst, x, y)
        assert check_point(model, pt.values) == []


def test_encode_f_zero_flow(star):
    f = encode_f(star, [0, 0])
    assert all(name.split("_")[3] == name.split("_")[4] for name in f.values)
    assert project(f) == ((0, 0), (0, 0))


def test_encode_f_rejects_infeasible(star):
    with pytest.raises(InfeasibleFlow):
        encode_f(star, [2, 2])


def test_pi_single_arc():
    rt = root_tree(new_instance([2, 2], [(1, 2)], [0], [0]))
    uv = pi_map(rt, encode_f(rt, [2]))
    assert uv.values["v_1_2_2_0"] == 1
    assert uv.space is Space.UV


def test_pi_matches_dp_certificate(star):
    uv = pi_map(star, encode_f(star, [2, 1]))
    assert uv.values == encode_uv(star, [2, 1]).assignment()
    assert project(uv) == ((2, 1), (1, 1))


def test_pi_midpoint_is_linear(star):
    f1, f2 = encode_f(star, [2, 1]), encode_f(star, [0, 2])
    mid = combine(F(1, 2), f1, f2)
    assert check_point(build_qsn(star), mid.values) == []
    image = pi_map(star, mid)
    assert image.values == combine(F(1, 2), pi_map(star, f1), pi_map(star, f2)).values
    assert check_point(build_qdp(star), image.values) == []


def test_pi_rejects_points_outside_qsn(star):
    f = encode_f(star, [2, 1])
    broken = combine(F(1), f, f)
    broken.values.pop("f_1_0_3_3")
    with pytest.raises(NotInQsn):
        pi_map(star, broken)
    with pytest.raises(NotInQsn):
        pi_map(star, lift_z(star.instance, [0, 0], [0, 0]))


def test_pi_accepts_z_encoding(star):
    fz = encode_f(star, [1, 2], with_z=True)
    assert check_point(build_qsn(star, with_z=True), fz.values) == []
    assert pi_map(star, fz).values == encode_uv(star, [1, 2]).assignment()
