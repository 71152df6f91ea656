"""Pseudo-polynomial dynamic program for trees.

For an arc ``(i, j)`` with ``i`` the parent, ``beta[e][l]`` is the cheapest
cost of the subtree hanging below ``i`` through ``j`` when ``x_ij = l``.
For the ``s``-th child of ``i``, ``alpha[(i, s)][k]`` is the cheapest cost of
the first ``s + 1`` child subtrees of ``i`` when they receive ``k`` units in
total. Both tables are exact; unreachable cells hold :data:`INF`.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from fractions import Fraction

from .errors import CorruptTables, InfeasibleFlow, UnsupportedVariant
from .model import RootedTree, Solution, validate_solution


@functools.total_ordering
class _Infinity:
    """Absorbing +infinity that compares above every rational."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __add__(self, other):
        return self

    __radd__ = __add__

    def __eq__(self, other):
        return other is self

    def __lt__(self, other):
        return False

    def __hash__(self):
        return hash("fctp-inf")

    def __repr__(self):
        return "INF"


INF = _Infinity()
Value = Fraction | _Infinity


def arc_cost(l: int, p: Fraction, q: Fraction) -> Fraction:
    """Cost of sending ``l`` units on an arc: zero when closed, ``l*p + q`` otherwise."""
    if l < 0:
        raise ValueError("flow level must be nonnegative")
    if l == 0:
        return Fraction(0)
    return l * Fraction(p) + Fraction(q)


@dataclass(frozen=True)
class DpTables:
    beta: dict[int, tuple[Value, ...]]
    alpha: dict[tuple[int, int], tuple[Value, ...]]
    back_alpha: dict[tuple[int, int], tuple[int | None, ...]]
    back_beta: dict[int, tuple[int | None, ...]]
    root_value: Fraction
    root_back: int | None

    def alpha_cell_count(self) -> int:
        return sum(len(row) for row in self.alpha.values())

    def beta_cell_count(self) -> int:
        return sum(len(row) for row in self.beta.values())


@dataclass(frozen=True)
class DpCertificate:
    """Integral point of the dual of the DP's linear program.

    ``u`` is keyed ``(i, j, k_prev, k)`` and ``v`` is keyed ``(i, j, l, k)``
    with ``i`` the parent of ``j``; the root's pseudo-arc uses ``i = 0``.
    """

    u: dict[tuple[int, int, int, int], Fraction]
    v: dict[tuple[int, int, int, int], Fraction]
    objective: Fraction

    def assignment(self) -> dict[str, Fraction]:
        out = {f"u_{i}_{j}_{kp}_{k}": val for (i, j, kp, k), val in self.u.items()}
        out.update({f"v_{i}_{j}_{l}_{k}": val for (i, j, l, k), val in self.v.items()})
        return out


def _check_variant(rt: RootedTree) -> None:
    if not rt.instance.variant.is_default:
        raise UnsupportedVariant("the tree DP only covers all-<= rows without the y <= x link")


def _argmin(values) -> tuple[Value, int | None]:
    best, arg = INF, None
    for idx, val in values:
        if val < best:
            best, arg = val, idx
    return best, arg


def fill_tables(rt: RootedTree) -> DpTables:
    """Run the alpha/beta recursions bottom-up (children before parents)."""
    _check_variant(rt)
    inst = rt.instance
    beta: dict[int, tuple[Value, ...]] = {}
    back_beta: dict[int, tuple[int | None, ...]] = {}
    alpha: dict[tuple[int, int], tuple[Value, ...]] = {}
    back_alpha: dict[tuple[int, int], tuple[int | None, ...]] = {}

    for i in reversed(rt.order):
        kids = rt.children[i]
        b_i = inst.cap(i)
        prev: tuple[Value, ...] | None = None
        for s, j in enumerate(kids):
            e = rt.arc_of[(i, j)]
            a_e = inst.a[e]
            row: list[Value] = []
            back: list[int | None] = []
            for k in range(b_i + 1):
                if prev is None:
                    row.append(beta[e][k] if k <= a_e else INF)
                    back.append(0 if k <= a_e else None)
                    continue
                val, arg = _argmin(
                    (kp, prev[kp] + beta[e][k - kp]) for kp in range(max(0, k - a_e), k + 1)
                )
                row.append(val)
                back.append(arg)
            alpha[(i, s)] = prev = tuple(row)
            back_alpha[(i, s)] = tuple(back)

        par = rt.parent[i]
        if par == 0:
            continue
        e = rt.arc_of[(par, i)]
        p, q = inst.p[e], inst.q[e]
        b_j = inst.cap(i)
        row, back = [], []
        for l in range(inst.a[e] + 1):
            assert l <= b_j, "arc capacity cannot exceed the child's capacity"
            cost = arc_cost(l, p, q)
            if not kids:
                row.append(cost)
                back.append(None)
                continue
            last = alpha[(i, len(kids) - 1)]
            val, arg = _argmin((k, last[k]) for k in range(b_j - l + 1))
            row.append(val + cost)
            back.append(arg)
        beta[e] = tuple(row)
        back_beta[e] = tuple(back)

    root = rt.root
    if rt.children[root]:
        last = alpha[(root, len(rt.children[root]) - 1)]
        root_value, root_back = _argmin(enumerate(last))
    else:
        root_value, root_back = Fraction(0), None
    if root_value is INF:
        raise CorruptTables("root value is infinite although zero flow is always feasible")
    return DpTables(beta, alpha, back_alpha, back_beta, root_value, root_back)


def recover_solution(tables: DpTables, rt: RootedTree) -> Solution:
    """Follow back-pointers from the root to an optimal integer flow."""
    inst = rt.instance
    x = [0] * inst.num_arcs
    stack: list[tuple[int, int | None]] = [(rt.root, tables.root_back)]
    while stack:
        i, k = stack.pop()
        kids = rt.children[i]
        if not kids:
            continue
        if k is None:
            raise CorruptTables(f"missing back-pointer into node {i}")
        for s in range(len(kids) - 1, -1, -1):
            key = (i, s)
            if key not in tables.back_alpha or not 0 <= k < len(tables.back_alpha[key]):
                raise CorruptTables(f"alpha cell {key}[{k}] does not exist")
            kp = tables.back_alpha[key][k]
            if kp is None or tables.alpha[key][k] is INF:
                raise CorruptTables(f"back-pointer chain reaches infeasible cell {key}[{k}]")
            if s == 0:
                kp = 0
            e = rt.arc_of[(i, kids[s])]
            l = k - kp
            if not 0 <= l <= inst.a[e]:
                raise CorruptTables(f"recovered flow {l} outside arc capacity")
            x[e] = l
            k = kp
        for j in kids:
            if rt.children[j]:
                e = rt.arc_of[(i, j)]
                stack.append((j, tables.back_beta[e][x[e]]))

    sol = Solution.from_flows(inst, x)
    if sol.objective != tables.root_value:
        raise CorruptTables(f"recovered objective {sol.objective} != table value {tables.root_value}")
    return sol


def solve_tree(rt: RootedTree) -> tuple[DpTables, Solution]:
    tables = fill_tables(rt)
    sol = recover_solution(tables, rt)
    assert not validate_solution(rt.instance, sol)
    return tables, sol


def _child_totals(rt: RootedTree, x) -> dict[int, int]:
    return {i: sum(x[rt.arc_of[(i, j)]] for j in rt.children[i]) for i in rt.order}


def check_tree_flow(rt: RootedTree, x) -> None:
    """Raise :class:`InfeasibleFlow` unless ``x`` is an integer flow of the tree instance."""
    inst = rt.instance
    if len(x) != inst.num_arcs:
        raise InfeasibleFlow("flow vector has the wrong length")
    if any(Fraction(v).denominator != 1 for v in x):
        raise InfeasibleFlow("flows must be integers")
    sol = Solution.from_flows(inst, [int(v) for v in x])
    bad = validate_solution(inst, sol)
    if bad:
        raise InfeasibleFlow("; ".join(map(str, bad)))


def encode_uv(rt: RootedTree, x) -> DpCertificate:
    """0/1 point of the DP dual that encodes the integer flow ``x``."""
    _check_variant(rt)
    check_tree_flow(rt, x)
    x = [int(v) for v in x]
    inst = rt.instance
    one = Fraction(1)
    totals = _child_totals(rt, x)
    u: dict[tuple[int, int, int, int], Fraction] = {}
    v: dict[tuple[int, int, int, int], Fraction] = {}
    for i in rt.order:
        prefix = 0
        for j in rt.children[i]:
            e = rt.arc_of[(i, j)]
            u[(i, j, prefix, prefix + x[e])] = one
            prefix += x[e]
            v[(i, j, x[e], totals[j])] = one
    v[(0, rt.root, 0, totals[rt.root])] = one
    objective = sum(
        (arc_cost(x[e], inst.p[e], inst.q[e]) for e in range(inst.num_arcs)), Fraction(0)
    )
    return DpCertificate(u, v, objective)
