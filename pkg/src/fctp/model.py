"""Instances, rooted trees, solutions and exact feasibility checking."""

from __future__ import annotations

import enum
from collections import deque
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import (
    DuplicateArc,
    NegativeFixedCost,
    NonIntegerCapacity,
    NotATree,
    SelfLoop,
    ValidationError,
)
from .rational import as_fraction

Arc = tuple[int, int]


class Sense(str, enum.Enum):
    LE = "LE"
    EQ = "EQ"


@dataclass(frozen=True)
class Variant:
    """Per-node constraint senses plus the optional ``y <= x`` link.

    Only nodes whose capacity row is an equality are listed in ``eq_nodes``;
    every other node keeps the ``<=`` sense.
    """

    eq_nodes: frozenset[int] = frozenset()
    link_lower: bool = False

    @classmethod
    def from_senses(cls, senses: Mapping[int, Sense | str], link_lower: bool = False) -> Variant:
        eq = frozenset(int(i) for i, s in senses.items() if Sense(s) is Sense.EQ)
        return cls(eq, link_lower)

    def sense(self, node: int) -> Sense:
        return Sense.EQ if node in self.eq_nodes else Sense.LE

    @property
    def is_default(self) -> bool:
        return not self.eq_nodes and not self.link_lower

    def relaxed(self) -> Variant:
        """Same variant with every node row turned back into ``<=``."""
        return Variant(frozenset(), self.link_lower)


DEFAULT_VARIANT = Variant()


@dataclass(frozen=True)
class Instance:
    """A capacitated graph with per-unit and fixed arc costs.

    Nodes are ``1..len(b)``; ``b[i - 1]`` is the capacity of node ``i``.
    Arc ``e`` joins ``arcs[e] = (i, j)`` with ``i < j`` and has capacity
    ``a[e] = min(b_i, b_j)``.
    """

    b: tuple[int, ...]
    arcs: tuple[Arc, ...]
    p: tuple[Fraction, ...]
    q: tuple[Fraction, ...]
    a: tuple[int, ...]
    variant: Variant = DEFAULT_VARIANT

    @property
    def nodes(self) -> range:
        return range(1, len(self.b) + 1)

    @property
    def num_nodes(self) -> int:
        return len(self.b)

    @property
    def num_arcs(self) -> int:
        return len(self.arcs)

    def cap(self, node: int) -> int:
        return self.b[node - 1]

    def arc_index(self) -> dict[Arc, int]:
        return {arc: e for e, arc in enumerate(self.arcs)}

    def incident(self) -> dict[int, list[int]]:
        """Node -> indices of incident arcs, in arc order."""
        out: dict[int, list[int]] = {i: [] for i in self.nodes}
        for e, (i, j) in enumerate(self.arcs):
            out[i].append(e)
            out[j].append(e)
        return out

    def objective(self, x: Sequence[int | Fraction], y: Sequence[int | Fraction]) -> Fraction:
        return sum((p * xi + q * yi for p, q, xi, yi in zip(self.p, self.q, x, y)), Fraction(0))

    def with_variant(self, variant: Variant) -> Instance:
        return Instance(self.b, self.arcs, self.p, self.q, self.a, variant)


def new_instance(
    b: Sequence[int],
    arcs: Iterable[Arc],
    p: Sequence[object],
    q: Sequence[object],
    variant: Variant | None = None,
) -> Instance:
    """Validate raw data and build an :class:`Instance`.

    Costs may be ints, Fractions or ``"num/den"`` strings. Arcs are stored
    as ``(min, max)``; input order is kept so ``p``/``q`` stay aligned.
    """
    caps: list[int] = []
    for i, value in enumerate(b, start=1):
        if isinstance(value, bool) or not isinstance(value, int):
            if isinstance(value, Fraction) and value.denominator == 1:
                value = int(value)
            else:
                raise NonIntegerCapacity(f"capacity of node {i} is not an integer: {value!r}")
        if value < 0:
            raise NonIntegerCapacity(f"capacity of node {i} is negative: {value}")
        caps.append(value)

    arc_list = [tuple(arc) for arc in arcs]
    if len(p) != len(arc_list) or len(q) != len(arc_list):
        raise ValidationError(
            f"cost vectors have lengths {len(p)}/{len(q)} but there are {len(arc_list)} arcs"
        )
    n = len(caps)
    canon: list[Arc] = []
    seen: set[Arc] = set()
    for i, j in arc_list:
        i, j = int(i), int(j)
        if i == j:
            raise SelfLoop(f"self-loop on node {i}")
        for node in (i, j):
            if not 1 <= node <= n:
                raise ValidationError(f"arc ({i}, {j}) references unknown node {node}")
        arc = (i, j) if i < j else (j, i)
        if arc in seen:
            raise DuplicateArc(f"duplicate arc {arc}")
        seen.add(arc)
        canon.append(arc)

    try:
        pv = tuple(as_fraction(v) for v in p)
        qv = tuple(as_fraction(v) for v in q)
    except (TypeError, ValueError) as exc:
        raise ValidationError(str(exc)) from exc
    for arc, qe in zip(canon, qv):
        if qe < 0:
            raise NegativeFixedCost(f"fixed cost of arc {arc} is negative: {qe}")

    variant = variant or DEFAULT_VARIANT
    for node in variant.eq_nodes:
        if not 1 <= node <= n:
            raise ValidationError(f"variant references unknown node {node}")
    a = tuple(min(caps[i - 1], caps[j - 1]) for i, j in canon)
    return Instance(tuple(caps), tuple(canon), pv, qv, a, variant)


def _matrix(value: object, n: int, m: int, label: str) -> list[list[object]]:
    if isinstance(value, (list, tuple)):
        if len(value) != n or any(len(row) != m for row in value):
            raise ValidationError(f"{label} must be a {n}x{m} matrix")
        return [list(row) for row in value]
    return [[value] * m for _ in range(n)]


def bipartite_instance(
    c: Sequence[int],
    d: Sequence[int],
    p: object,
    q: object,
    variant: Variant | None = None,
) -> Instance:
    """Complete bipartite instance: suppliers ``1..n``, customers ``n+1..n+m``.

    ``p`` and ``q`` are ``n x m`` matrices or a scalar applied to every pair.
    Arcs are listed supplier-major: ``(1, n+1), (1, n+2), ..., (n, n+m)``.
    """
    n, m = len(c), len(d)
    if n < 1 or m < 1:
        raise ValidationError("need at least one supplier and one customer")
    pm = _matrix(p, n, m, "p")
    qm = _matrix(q, n, m, "q")
    arcs = [(i + 1, n + j + 1) for i in range(n) for j in range(m)]
    pv = [pm[i][j] for i in range(n) for j in range(m)]
    qv = [qm[i][j] for i in range(n) for j in range(m)]
    return new_instance(list(c) + list(d), arcs, pv, qv, variant)


@dataclass(frozen=True)
class RootedTree:
    """A tree instance viewed from a root.

    ``children[i]`` lists the children of ``i`` in breadth-first order, so
    the children of every node receive consecutive BFS numbers
    (``bfs_index``). Node ids everywhere else are the instance's own ids.
    """

    instance: Instance
    root: int
    parent: Mapping[int, int]
    children: Mapping[int, tuple[int, ...]]
    arc_of: Mapping[Arc, int]
    order: tuple[int, ...]
    bfs_index: Mapping[int, int] = field(repr=False)

    def is_leaf(self, node: int) -> bool:
        return not self.children[node]

    def parent_arc(self, node: int) -> int | None:
        """Index of the arc joining ``node`` to its parent (``None`` at the root)."""
        par = self.parent[node]
        return None if par == 0 else self.arc_of[(par, node)]

    def oriented_arcs(self) -> list[Arc]:
        """Arcs in instance order, written ``(parent, child)``."""
        out: list[Arc] = [(0, 0)] * self.instance.num_arcs
        for (i, j), e in self.arc_of.items():
            out[e] = (i, j)
        return out

    def subtree_capacity(self, node: int) -> int:
        """Largest total flow ``node`` can send to its children."""
        inst = self.instance
        return sum(inst.a[self.arc_of[(node, c)]] for c in self.children[node])


def root_tree(instance: Instance, root: int = 1) -> RootedTree:
    if not 1 <= root <= instance.num_nodes:
        raise ValidationError(f"root {root} is not a node")
    n = instance.num_nodes
    if instance.num_arcs != n - 1:
        raise NotATree(f"{n} nodes need {n - 1} arcs to form a tree, got {instance.num_arcs}")
    adj: dict[int, list[int]] = {i: [] for i in instance.nodes}
    for i, j in instance.arcs:
        adj[i].append(j)
        adj[j].append(i)
    index = instance.arc_index()

    parent = {root: 0}
    children: dict[int, tuple[int, ...]] = {}
    arc_of: dict[Arc, int] = {}
    order = []
    queue = deque([root])
    while queue:
        i = queue.popleft()
        order.append(i)
        kids = []
        for j in sorted(adj[i]):
            if j == parent[i]:
                continue
            if j in parent:
                raise NotATree(f"cycle through arc ({i}, {j})")
            parent[j] = i
            kids.append(j)
            arc_of[(i, j)] = index[(min(i, j), max(i, j))]
            queue.append(j)
        children[i] = tuple(kids)
    if len(order) != n:
        raise NotATree("graph is disconnected")
    bfs_index = {node: pos + 1 for pos, node in enumerate(order)}
    return RootedTree(instance, root, parent, children, arc_of, tuple(order), bfs_index)


@dataclass(frozen=True)
class Solution:
    x: tuple[int, ...]
    y: tuple[int, ...]
    objective: Fraction

    @classmethod
    def from_flows(cls, instance: Instance, x: Sequence[int], y: Sequence[int] | None = None) -> Solution:
        """Build a solution, defaulting ``y`` to the indicator of positive flow."""
        xs = tuple(int(v) for v in x)
        ys = tuple(int(v) for v in y) if y is not None else tuple(int(v > 0) for v in xs)
        return cls(xs, ys, instance.objective(xs, ys))


@dataclass(frozen=True)
class Violation:
    """A row ``lhs <sense> rhs`` that does not hold (all values exact)."""

    constraint: str
    lhs: Fraction
    sense: str
    rhs: Fraction

    def __str__(self) -> str:
        return f"{self.constraint}: {self.lhs} {self.sense} {self.rhs} violated"


def validate_solution(instance: Instance, sol: Solution) -> list[Violation]:
    """Every violated row of the instance's integer program, empty iff feasible."""
    out: list[Violation] = []
    if len(sol.x) != instance.num_arcs or len(sol.y) != instance.num_arcs:
        raise ValidationError("solution dimensions do not match the instance")
    zero = Fraction(0)
    load = {i: zero for i in instance.nodes}
    for e, (i, j) in enumerate(instance.arcs):
        x, y = Fraction(sol.x[e]), Fraction(sol.y[e])
        tag = f"{i}_{j}"
        if x.denominator != 1:
            out.append(Violation(f"xint_{tag}", x, "in", zero))
        if x < 0:
            out.append(Violation(f"xnonneg_{tag}", x, ">=", zero))
        if y not in (0, 1):
            out.append(Violation(f"ybin_{tag}", y, "in", Fraction(1)))
        if x - instance.a[e] * y > 0:
            out.append(Violation(f"link_{tag}", x - instance.a[e] * y, "<=", zero))
        if instance.variant.link_lower and y - x > 0:
            out.append(Violation(f"lower_{tag}", y - x, "<=", zero))
        load[i] += x
        load[j] += x
    for i in instance.nodes:
        cap = Fraction(instance.cap(i))
        if instance.variant.sense(i) is Sense.EQ:
            if load[i] != cap:
                out.append(Violation(f"cap_{i}", load[i], "=", cap))
        elif load[i] > cap:
            out.append(Violation(f"cap_{i}", load[i], "<=", cap))
    expected = instance.objective(sol.x, sol.y)
    if sol.objective != expected:
        out.append(Violation("objective", sol.objective, "=", expected))
    return out
