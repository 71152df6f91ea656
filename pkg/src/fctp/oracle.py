"""Exhaustive exact solver for small instances of any variant.

Flows are enumerated arc by arc in instance order, ``x_e = 0, 1, ..., a_e``,
and a branch is abandoned as soon as an endpoint capacity is exceeded (or an
equality row can no longer be met). :func:`brute_force_solve` walks the same
search tree but memoises the best completion of each suffix: the remaining
problem only depends on the arc position and the residual capacities of
nodes that still have unvisited arcs, so equal states are solved once.
"""

from __future__ import annotations

from collections.abc import Iterator
from fractions import Fraction
from math import prod

from .errors import BudgetExceeded, InfeasibleInstance
from .model import Instance, Sense, Solution
from .rational import denominator_lcm

DEFAULT_LIMIT = 10**7


def search_bound(inst: Instance) -> int:
    return prod(a + 1 for a in inst.a)


def _check_budget(inst: Instance, limit: int) -> None:
    bound = search_bound(inst)
    if bound > limit:
        raise BudgetExceeded(bound, limit)


class _Frontier:
    """Per-position bookkeeping: which nodes are still open and how much they can still take."""

    def __init__(self, inst: Instance) -> None:
        self.inst = inst
        n_arcs = inst.num_arcs
        # potential[e][v]: total capacity of arcs >= e incident to v
        self.potential: list[dict[int, int]] = [dict() for _ in range(n_arcs + 1)]
        for e in range(n_arcs - 1, -1, -1):
            pot = dict(self.potential[e + 1])
            i, j = inst.arcs[e]
            pot[i] = pot.get(i, 0) + inst.a[e]
            pot[j] = pot.get(j, 0) + inst.a[e]
            self.potential[e] = pot
        # open nodes after position e has been fixed, in a fixed order
        self.open_after: list[tuple[int, ...]] = [
            tuple(sorted(self.potential[e + 1])) for e in range(n_arcs)
        ]
        self.eq = {v for v in inst.nodes if inst.variant.sense(v) is Sense.EQ}

    def dead(self, residual: dict[int, int], e: int) -> bool:
        """True if no completion from position ``e`` can satisfy the equality rows."""
        pot = self.potential[e]
        for v in self.eq:
            if residual[v] > pot.get(v, 0):
                return True
        return False


def enumerate_feasible(inst: Instance, limit: int = DEFAULT_LIMIT) -> Iterator[Solution]:
    """Yield every integer-feasible ``(x, y)`` once, lexicographically in ``(x, y)``."""
    _check_budget(inst, limit)
    fr = _Frontier(inst)
    residual = {v: inst.cap(v) for v in inst.nodes}
    if fr.dead(residual, 0):
        return
    n_arcs = inst.num_arcs
    x = [0] * n_arcs

    def y_choices(xs: list[int]) -> Iterator[tuple[int, ...]]:
        options = []
        for xe in xs:
            if xe > 0:
                options.append((1,))
            elif inst.variant.link_lower:
                options.append((0,))
            else:
                options.append((0, 1))
        yield from _product(options)

    def rec(e: int) -> Iterator[Solution]:
        if e == n_arcs:
            for y in y_choices(x):
                yield Solution(tuple(x), y, inst.objective(x, y))
            return
        i, j = inst.arcs[e]
        top = min(inst.a[e], residual[i], residual[j])
        for val in range(top + 1):
            x[e] = val
            residual[i] -= val
            residual[j] -= val
            if not fr.dead(residual, e + 1):
                yield from rec(e + 1)
            residual[i] += val
            residual[j] += val
        x[e] = 0

    yield from rec(0)


def _product(options: list[tuple[int, ...]]) -> Iterator[tuple[int, ...]]:
    if not options:
        yield ()
        return
    head, rest = options[0], options[1:]
    for h in head:
        for tail in _product(rest):
            yield (h, *tail)


class _Memo:
    """Best completion values for every reachable suffix state.

    Costs are multiplied by the LCM of their denominators so the search runs
    on Python ints; :meth:`value` converts back.
    """

    def __init__(self, inst: Instance) -> None:
        self.inst = inst
        self.fr = _Frontier(inst)
        self.scale = denominator_lcm(list(inst.p) + list(inst.q))
        self.cost = [
            [0] + [int((l * inst.p[e] + inst.q[e]) * self.scale) for l in range(1, inst.a[e] + 1)]
            for e in range(inst.num_arcs)
        ]
        self.table: dict[tuple, int | None] = {}
        # per position: (node, clamp) for every open node; EQ nodes are never clamped
        self.key_spec: list[list[tuple[int, int | None]]] = [[]] + [
            [
                (v, None if v in self.fr.eq else self.fr.potential[e][v])
                for v in self.fr.open_after[e - 1]
            ]
            for e in range(1, inst.num_arcs + 1)
        ]

    def key(self, e: int, residual: dict[int, int]) -> tuple:
        if e == 0:
            return (0,)
        # residual beyond what the remaining arcs can use is irrelevant for <= rows
        return (e,) + tuple(
            [residual[v] if cap is None else min(residual[v], cap) for v, cap in self.key_spec[e]]
        )

    def value(self, scaled: int) -> Fraction:
        return Fraction(scaled, self.scale)

    def best(self, e: int, residual: dict[int, int]) -> int | None:
        """Cheapest scaled completion of arcs ``e..`` (``None`` if there is none)."""
        inst = self.inst
        if e == inst.num_arcs:
            return 0
        k = self.key(e, residual)
        if k in self.table:
            return self.table[k]
        i, j = inst.arcs[e]
        top = min(inst.a[e], residual[i], residual[j])
        out: int | None = None
        for val in range(top + 1):
            residual[i] -= val
            residual[j] -= val
            if not self.fr.dead(residual, e + 1):
                rest = self.best(e + 1, residual)
                if rest is not None:
                    total = self.cost[e][val] + rest
                    if out is None or total < out:
                        out = total
            residual[i] += val
            residual[j] += val
        self.table[k] = out
        return out

    def optimal_moves(self, e: int, residual: dict[int, int]) -> list[int]:
        """Every value of ``x_e`` that starts an optimal completion, increasing."""
        target = self.best(e, residual)
        inst = self.inst
        i, j = inst.arcs[e]
        moves = []
        for val in range(min(inst.a[e], residual[i], residual[j]) + 1):
            residual[i] -= val
            residual[j] -= val
            if not self.fr.dead(residual, e + 1):
                rest = self.best(e + 1, residual)
                if rest is not None and self.cost[e][val] + rest == target:
                    moves.append(val)
            residual[i] += val
            residual[j] += val
        return moves


def _start(inst: Instance, limit: int) -> tuple[_Memo, dict[int, int]]:
    _check_budget(inst, limit)
    memo = _Memo(inst)
    residual = {v: inst.cap(v) for v in inst.nodes}
    if memo.fr.dead(residual, 0) or memo.best(0, residual) is None:
        raise InfeasibleInstance("no integer flow satisfies the equality rows")
    return memo, residual


def brute_force_solve(inst: Instance, limit: int = DEFAULT_LIMIT) -> Solution:
    """Exact optimum over all integer flows; ties go to the lexicographically smallest ``x``.

    With ``q >= 0`` the indicator ``y = [x > 0]`` is optimal for every flow
    and is feasible in every variant, so only flows are searched.
    """
    memo, residual = _start(inst, limit)
    x = []
    for e in range(inst.num_arcs):
        val = memo.optimal_moves(e, residual)[0]
        i, j = inst.arcs[e]
        residual[i] -= val
        residual[j] -= val
        x.append(val)
    sol = Solution.from_flows(inst, x)
    assert sol.objective == memo.value(memo.best(0, {v: inst.cap(v) for v in inst.nodes}))
    return sol


def optimal_solutions(inst: Instance, limit: int = DEFAULT_LIMIT, max_count: int | None = None) -> Iterator[Solution]:
    """Every optimal flow (with ``y = [x > 0]``), in lexicographic order."""
    memo, residual = _start(inst, limit)
    x: list[int] = []
    emitted = 0

    def rec(e: int) -> Iterator[Solution]:
        nonlocal emitted
        if max_count is not None and emitted >= max_count:
            return
        if e == inst.num_arcs:
            emitted += 1
            yield Solution.from_flows(inst, x)
            return
        i, j = inst.arcs[e]
        for val in memo.optimal_moves(e, residual):
            residual[i] -= val
            residual[j] -= val
            x.append(val)
            yield from rec(e + 1)
            x.pop()
            residual[i] += val
            residual[j] += val

    yield from rec(0)
