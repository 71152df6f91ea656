from __future__ import annotations

import math
from fractions import Fraction

import pytest

from fctp import io
from fctp.errors import InvalidThreePartition, TooLarge, UnreachableTarget, ValidationError
from fctp.generators import (
    GenConfig,
    ThreePartitionInput,
    balance,
    check_3partition,
    gen_bipartite,
    gen_tree,
    make_rng,
    reduce_3partition,
)
from fctp.model import Sense, root_tree


def _supplies_demands(inst, n):
    return list(inst.b[:n]), list(inst.b[n:])


def test_rng_stream_is_pinned():
    # PCG64 + Lemire bounded integers; a change here silently changes every instance
    assert [int(v) for v in make_rng(0).integers(1, 20, size=5, endpoint=True)] == [18, 13, 11, 6, 7]


def test_bipartite_full_ratio():
    inst = gen_bipartite(GenConfig(20, 20, Fraction(1), seed=7))
    c, d = _supplies_demands(inst, 20)
    assert sum(d) == sum(c)
    assert inst.num_nodes == 40 and inst.num_arcs == 400
    assert all(a == min(c[i], d[j]) for (i, j), a in zip(((i, j) for i in range(20) for j in range(20)), inst.a))


def test_bipartite_ratio_and_bounds():
    cfg = GenConfig(30, 40, Fraction(9, 10), seed=1)
    inst = gen_bipartite(cfg)
    c, d = _supplies_demands(inst, 30)
    assert sum(d) == math.ceil(Fraction(9, 10) * sum(c))
    assert all(1 <= v <= 40 for v in c + d)
    assert all(200 <= q <= 800 for q in inst.q) and all(p == 0 for p in inst.p)
    assert all(inst.variant.sense(j) is Sense.EQ for j in range(31, 61))
    assert all(inst.variant.sense(i) is Sense.LE for i in range(1, 31))


def test_bipartite_smallest():
    inst = gen_bipartite(GenConfig(1, 1, Fraction(1)))
    assert inst.b == (1, 1) and inst.num_arcs == 1


def test_bipartite_is_deterministic():
    cfg = GenConfig(20, 60, Fraction(19, 20), seed=123)
    assert io.dumps_instance(gen_bipartite(cfg)) == io.dumps_instance(gen_bipartite(cfg))
    other = GenConfig(20, 60, Fraction(19, 20), seed=124)
    assert io.dumps_instance(gen_bipartite(cfg)) != io.dumps_instance(gen_bipartite(other))


def test_balance_can_raise_supplies():
    c, d = [1, 1], [5, 5]
    balance(c, d, 5, Fraction(1))
    assert sum(d) == sum(c) == 10


def test_balance_unreachable():
    with pytest.raises(UnreachableTarget):
        balance([1], [5, 5], 5, Fraction(1, 2))


def test_config_validation():
    with pytest.raises(ValidationError):
        GenConfig(0, 5, Fraction(1))
    with pytest.raises(ValidationError):
        GenConfig(3, 5, Fraction(3, 2))
    assert GenConfig(3, 5, "19/20").r == Fraction(19, 20)


@pytest.mark.parametrize("n", [1, 2, 8, 30])
def test_tree_shape(n):
    inst = gen_tree(n, 5, seed=9)
    assert inst.num_arcs == n - 1
    rt = root_tree(inst)
    assert len(rt.order) == n
    assert all(0 <= b <= 5 for b in inst.b)
    assert all(-3 <= p <= 3 for p in inst.p) and all(0 <= q <= 5 for q in inst.q)


def test_tree_deterministic():
    assert gen_tree(8, 5, 42) == gen_tree(8, 5, 42)


def test_three_partition_validation():
    with pytest.raises(InvalidThreePartition):
        ThreePartitionInput((3, 4, 5), 12)  # 3 is not strictly above 12/4
    with pytest.raises(InvalidThreePartition):
        ThreePartitionInput((4, 5), 9)
    with pytest.raises(InvalidThreePartition):
        ThreePartitionInput((4, 5, 7), 15)
    inp = ThreePartitionInput((2, 2, 2), 6)
    assert inp.n == 1 and inp.yes_value == -9


def test_three_partition_reduction_shape():
    inp = ThreePartitionInput((4, 4, 5, 5, 6, 6), 15)
    inst = reduce_3partition(inp)
    assert inst.num_nodes == 8 and inst.num_arcs == 12
    assert set(inst.p) == {-2} and set(inst.q) == {1}


@pytest.mark.parametrize(
    "numbers, b, answer",
    [
        ((4, 4, 5, 5, 6, 6), 15, True),
        ((4, 4, 4, 6, 6, 6), 15, False),
        ((3, 3, 3, 3, 3, 3, 3, 3, 3), 9, True),
    ],
)
def test_check_3partition(numbers, b, answer):
    assert check_3partition(ThreePartitionInput(numbers, b)) is answer


def test_check_3partition_size_limit():
    with pytest.raises(TooLarge):
        check_3partition(ThreePartitionInput((3,) * 15, 9))
