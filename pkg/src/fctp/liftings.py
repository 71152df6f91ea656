"""Maps between the (x, y) space and the extended variable spaces.

Three lifted spaces are handled: the unary expansion ``z`` of the
``ipz`` model, the per-node assignment variables ``f`` of the ``qsn``
models, and the DP dual ``(u, v)`` of the ``qdp`` model.
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass
from fractions import Fraction

from .errors import NotInP, NotInQsn, ZeroCapacityArcWithFlow
from .formulations import Assignment, Model, build_qsn, check_point
from .model import Instance, RootedTree, Sense
from .tree_dp import _check_variant, check_tree_flow

ZERO = Fraction(0)
ONE = Fraction(1)


class Space(str, enum.Enum):
    Z = "Z"
    F = "F"
    UV = "UV"


@dataclass(frozen=True)
class LiftedPoint:
    """Sparse point of a lifted space plus its ``(x, y)`` image.

    ``arcs`` lists each instance arc in the orientation the space's variable
    names use: ``(min, max)`` for Z, ``(parent, child)`` for F and UV.
    For Z the values also carry the ``x_*``/``y_*`` coordinates, since the
    unary model keeps them as variables.
    """

    space: Space
    values: dict[str, Fraction]
    arcs: tuple[tuple[int, int], ...]
    x: tuple[Fraction, ...]
    y: tuple[Fraction, ...]

    def assignment(self) -> Assignment:
        return dict(self.values)

    def consistent(self) -> bool:
        return project(self) == (self.x, self.y)


def _split(name: str) -> tuple[str, tuple[int, ...]]:
    head, *rest = name.split("_")
    return head, tuple(int(t) for t in rest)


def project(pt: LiftedPoint) -> tuple[tuple[Fraction, ...], tuple[Fraction, ...]]:
    """Recompute ``(x, y)`` from the lifted coordinates alone."""
    pos = {arc: e for e, arc in enumerate(pt.arcs)}
    x = [ZERO] * len(pt.arcs)
    y = [ZERO] * len(pt.arcs)
    for name, val in pt.values.items():
        kind, idx = _split(name)
        if pt.space is Space.Z:
            if kind == "z":
                x[pos[idx[:2]]] += idx[2] * val
            elif kind == "y":
                y[pos[idx]] += val
        elif pt.space is Space.UV:
            if kind == "v" and idx[:2] in pos and idx[2] > 0:
                e = pos[idx[:2]]
                x[e] += idx[2] * val
                y[e] += val
        elif kind == "f" and idx[:2] in pos and idx[3] > idx[2]:
            e = pos[idx[:2]]
            x[e] += (idx[3] - idx[2]) * val
            y[e] += val
    return tuple(x), tuple(y)


def _make(space: Space, values: dict[str, Fraction], arcs) -> LiftedPoint:
    values = {k: v for k, v in values.items() if v != 0}
    probe = LiftedPoint(space, values, tuple(arcs), (), ())
    x, y = project(probe)
    return LiftedPoint(space, values, tuple(arcs), x, y)


def check_in_p(inst: Instance, x, y) -> None:
    """Raise :class:`NotInP` unless ``(x, y)`` satisfies the LP relaxation exactly."""
    if len(x) != inst.num_arcs or len(y) != inst.num_arcs:
        raise NotInP("dimension mismatch")
    x = [Fraction(v) for v in x]
    y = [Fraction(v) for v in y]
    load = {i: ZERO for i in inst.nodes}
    for e, (i, j) in enumerate(inst.arcs):
        if inst.a[e] == 0 and x[e] != 0:
            raise ZeroCapacityArcWithFlow(f"arc ({i}, {j}) has capacity 0 but flow {x[e]}")
        if x[e] < 0:
            raise NotInP(f"xnonneg_{i}_{j}: {x[e]} >= 0 violated")
        if not 0 <= y[e] <= 1:
            raise NotInP(f"ybound_{i}_{j}: 0 <= {y[e]} <= 1 violated")
        if x[e] > inst.a[e] * y[e]:
            raise NotInP(f"link_{i}_{j}: {x[e]} <= {inst.a[e] * y[e]} violated")
        if inst.variant.link_lower and y[e] > x[e]:
            raise NotInP(f"lower_{i}_{j}: {y[e]} <= {x[e]} violated")
        load[i] += x[e]
        load[j] += x[e]
    for i in inst.nodes:
        cap = inst.cap(i)
        if inst.variant.sense(i) is Sense.EQ and load[i] != cap:
            raise NotInP(f"cap_{i}: {load[i]} = {cap} violated")
        if load[i] > cap:
            raise NotInP(f"cap_{i}: {load[i]} <= {cap} violated")


def lift_z(inst: Instance, x, y) -> LiftedPoint:
    """Put all of an arc's flow mass on its top level: ``z_a = x/a``, ``z_0 = 1 - x/a``."""
    check_in_p(inst, x, y)
    values: dict[str, Fraction] = {}
    for e, (i, j) in enumerate(inst.arcs):
        xe, ye = Fraction(x[e]), Fraction(y[e])
        values[f"x_{i}_{j}"] = xe
        values[f"y_{i}_{j}"] = ye
        a = inst.a[e]
        if a == 0:
            values[f"z_{i}_{j}_0"] = ONE
            continue
        top = xe / a
        values[f"z_{i}_{j}_{a}"] = top
        values[f"z_{i}_{j}_0"] = ONE - top
    return _make(Space.Z, values, inst.arcs)


def encode_f(rt: RootedTree, x, with_z: bool = False) -> LiftedPoint:
    """0/1 assignment variables describing the integer flow ``x`` at every node.

    ``f_i_j_kp_k = 1`` when the children of ``i`` before ``j`` receive ``kp``
    units and ``j`` receives ``k - kp``; the parent entry continues the scan
    from the children's total. With ``with_z`` the unary ``z`` variables of
    the linked model are included.
    """
    _check_variant(rt)
    check_tree_flow(rt, x)
    x = [int(v) for v in x]
    values: dict[str, Fraction] = {}
    for i in rt.order:
        prefix = 0
        for j in rt.children[i]:
            flow = x[rt.arc_of[(i, j)]]
            values[f"f_{i}_{j}_{prefix}_{prefix + flow}"] = ONE
            prefix += flow
        par = rt.parent[i]
        up = 0 if par == 0 else x[rt.parent_arc(i)]
        values[f"f_{i}_{par}_{prefix}_{prefix + up}"] = ONE
    if with_z:
        for e, (i, j) in enumerate(rt.instance.arcs):
            values[f"z_{i}_{j}_{x[e]}"] = ONE
    return _make(Space.F, values, rt.oriented_arcs())


def pi_map(rt: RootedTree, f: LiftedPoint, model: Model | None = None) -> LiftedPoint:
    """Map a point of the assignment formulation into the DP dual.

    Child-side assignment variables become ``u`` unchanged, and the child's
    parent-side variable ``f_j_i_k_(k+l)`` becomes ``v_i_j_l_k``. ``model``
    may pass in the matching ``build_qsn`` output to skip rebuilding it.
    """
    if f.space is not Space.F:
        raise NotInQsn(f"expected an F-space point, got {f.space.value}")
    if model is None:
        with_z = any(name.startswith("z_") for name in f.values)
        model = build_qsn(rt, with_z=with_z)
    try:
        bad = check_point(model, f.values)
    except KeyError as exc:
        raise NotInQsn(str(exc)) from exc
    if bad:
        raise NotInQsn("; ".join(map(str, bad[:5])))

    values: dict[str, Fraction] = {}
    for name, val in f.values.items():
        kind, idx = _split(name)
        if kind != "f":
            continue
        i, j, kp, k = idx
        if j == 0:
            values[f"v_0_{i}_0_{kp}"] = val
        elif rt.parent[i] == j:
            values[f"v_{j}_{i}_{k - kp}_{kp}"] = val
        else:
            values[f"u_{i}_{j}_{kp}_{k}"] = val
    return _make(Space.UV, values, rt.oriented_arcs())


def combine(lam: Fraction, first: LiftedPoint, second: LiftedPoint) -> LiftedPoint:
    """Convex combination ``lam * first + (1 - lam) * second`` of two points of one space."""
    if first.space is not second.space or first.arcs != second.arcs:
        raise ValueError("points live in different spaces")
    lam = Fraction(lam)
    names = dict.fromkeys(list(first.values) + list(second.values))
    values = {
        n: lam * first.values.get(n, ZERO) + (1 - lam) * second.values.get(n, ZERO) for n in names
    }
    return _make(first.space, values, first.arcs)


def sample_p_point(inst: Instance, rng: random.Random, inflate: bool = True) -> tuple[list[Fraction], list[Fraction]]:
    """Draw a (generally fractional) point of the LP relaxation of an all-``<=`` instance.

    Integer pseudo-flows ``w <= a`` are drawn, each arc is shrunk by the
    tighter of its two endpoint factors ``min(1, b/load)`` and by a random
    rational, and ``y`` starts at the smallest feasible ``x/a`` before being
    pushed part of the way towards its upper limit.
    """
    if inst.variant.eq_nodes:
        raise ValueError("the sampler only supports all-<= node rows")
    w = [rng.randint(0, a) for a in inst.a]
    load = {i: 0 for i in inst.nodes}
    for e, (i, j) in enumerate(inst.arcs):
        load[i] += w[e]
        load[j] += w[e]
    shrink = {i: ONE if load[i] <= inst.cap(i) else Fraction(inst.cap(i), load[i]) for i in inst.nodes}
    x: list[Fraction] = []
    y: list[Fraction] = []
    for e, (i, j) in enumerate(inst.arcs):
        scale = min(shrink[i], shrink[j]) * Fraction(rng.randint(0, 12), 12)
        xe = w[e] * scale
        ye = xe / inst.a[e] if inst.a[e] > 0 else ZERO
        if inflate:
            cap = min(ONE, xe) if inst.variant.link_lower else ONE
            ye += Fraction(rng.randint(0, 6), 6) * max(ZERO, cap - ye)
        x.append(xe)
        y.append(ye)
    return x, y


def random_integer_flow(inst: Instance, rng: random.Random) -> list[int]:
    """A random integer flow respecting every ``<=`` node capacity."""
    residual = {i: inst.cap(i) for i in inst.nodes}
    order = list(range(inst.num_arcs))
    rng.shuffle(order)
    flows = [0] * inst.num_arcs
    for e in order:
        i, j = inst.arcs[e]
        top = min(inst.a[e], residual[i], residual[j])
        flows[e] = rng.randint(0, top) if rng.random() < 0.8 else 0
        residual[i] -= flows[e]
        residual[j] -= flows[e]
    return flows

