"""Solver-agnostic linear/integer models and their builders.

Variable names follow a fixed grammar so exported files are reproducible:
``x_i_j``, ``y_i_j``, ``z_i_j_l`` (``i < j``) and ``u_i_j_kp_k``,
``v_i_j_l_k``, ``f_i_j_kp_k`` where ``i``/``j`` are original node ids and
``0`` stands for the root's missing parent.
"""

from __future__ import annotations

import enum
import hashlib
import json
from collections.abc import Mapping
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import UnknownVariable, UnsupportedVariant, ValidationError
from .model import Instance, RootedTree, Sense, Violation
from .rational import to_json_rational
from .tree_dp import arc_cost

Assignment = dict[str, Fraction]
Row = tuple[tuple[str, Fraction], ...]


class VarType(str, enum.Enum):
    CONTINUOUS = "continuous"
    BINARY = "binary"
    INTEGER = "integer"


@dataclass(frozen=True)
class Variable:
    name: str
    lower: Fraction | None = Fraction(0)  # None means -inf
    upper: Fraction | None = None  # None means +inf
    vtype: VarType = VarType.CONTINUOUS


@dataclass(frozen=True)
class Constraint:
    name: str
    coeffs: Row
    sense: str  # "<=", "=" or ">="
    rhs: Fraction


@dataclass(frozen=True)
class Model:
    """An ordered, immutable minimisation model.

    ``metadata`` (formulation tag, instance fingerprint, projection maps) is
    excluded from equality so a model read back from a file compares equal
    to the one that was written.
    """

    name: str
    variables: tuple[Variable, ...]
    constraints: tuple[Constraint, ...]
    objective: Row
    metadata: Mapping[str, object] = field(default_factory=dict, compare=False)

    def variable_names(self) -> list[str]:
        return [v.name for v in self.variables]

    def count(self, prefix: str) -> int:
        return sum(1 for v in self.variables if v.name.startswith(prefix))


class ModelBuilder:
    def __init__(self, name: str) -> None:
        self.name = name
        self._vars: dict[str, Variable] = {}
        self._rows: list[Constraint] = []
        self._row_names: set[str] = set()
        self._obj: dict[str, Fraction] = {}

    def var(self, name: str, lower=Fraction(0), upper=None, vtype=VarType.CONTINUOUS) -> str:
        if name in self._vars:
            raise ValidationError(f"variable {name} declared twice")
        lo = None if lower is None else Fraction(lower)
        up = None if upper is None else Fraction(upper)
        self._vars[name] = Variable(name, lo, up, vtype)
        return name

    def has(self, name: str) -> bool:
        return name in self._vars

    def row(self, name: str, terms, sense: str, rhs=0) -> None:
        """Add a row, merging repeated names and dropping zero coefficients.

        Rows left without any term are skipped: they carry no information.
        """
        if name in self._row_names:
            raise ValidationError(f"row {name} declared twice")
        merged: dict[str, Fraction] = {}
        for var, coef in terms:
            if var not in self._vars:
                raise UnknownVariable(f"row {name} references undeclared variable {var}")
            merged[var] = merged.get(var, Fraction(0)) + Fraction(coef)
        coeffs = tuple((v, c) for v, c in merged.items() if c != 0)
        if not coeffs:
            return
        self._row_names.add(name)
        self._rows.append(Constraint(name, coeffs, sense, Fraction(rhs)))

    def obj(self, var: str, coef) -> None:
        coef = Fraction(coef)
        self._obj[var] = self._obj.get(var, Fraction(0)) + coef

    def build(self, **metadata) -> Model:
        objective = tuple((v, c) for v, c in self._obj.items() if c != 0)
        return Model(self.name, tuple(self._vars.values()), tuple(self._rows), objective, metadata)


def fingerprint(inst: Instance) -> str:
    """Short stable hash of an instance's data (costs, capacities, variant)."""
    doc = {
        "b": list(inst.b),
        "arcs": [list(a) for a in inst.arcs],
        "p": [to_json_rational(v) for v in inst.p],
        "q": [to_json_rational(v) for v in inst.q],
        "eq": sorted(inst.variant.eq_nodes),
        "link_lower": inst.variant.link_lower,
    }
    blob = json.dumps(doc, separators=(",", ":"), sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def _ip_rows(mb: ModelBuilder, inst: Instance) -> None:
    for e, (i, j) in enumerate(inst.arcs):
        mb.var(f"x_{i}_{j}", 0, inst.a[e])
    for i, j in inst.arcs:
        mb.var(f"y_{i}_{j}", 0, 1, VarType.BINARY)
    for e, (i, j) in enumerate(inst.arcs):
        mb.obj(f"x_{i}_{j}", inst.p[e])
        mb.obj(f"y_{i}_{j}", inst.q[e])

    incident = inst.incident()
    for node in inst.nodes:
        sense = "=" if inst.variant.sense(node) is Sense.EQ else "<="
        terms = [(f"x_{inst.arcs[e][0]}_{inst.arcs[e][1]}", 1) for e in incident[node]]
        mb.row(f"cap_{node}", terms, sense, inst.cap(node))
    for e, (i, j) in enumerate(inst.arcs):
        mb.row(f"link_{i}_{j}", [(f"x_{i}_{j}", 1), (f"y_{i}_{j}", -inst.a[e])], "<=", 0)
    if inst.variant.link_lower:
        for i, j in inst.arcs:
            mb.row(f"lower_{i}_{j}", [(f"y_{i}_{j}", 1), (f"x_{i}_{j}", -1)], "<=", 0)


def _projection_xy(inst: Instance) -> dict[str, dict[str, dict[str, int]]]:
    return {
        "x": {f"x_{i}_{j}": {f"x_{i}_{j}": 1} for i, j in inst.arcs},
        "y": {f"y_{i}_{j}": {f"y_{i}_{j}": 1} for i, j in inst.arcs},
    }


def build_ip(inst: Instance) -> Model:
    """Standard formulation: node capacities and ``x <= a*y`` forcing rows."""
    mb = ModelBuilder("ip")
    _ip_rows(mb, inst)
    return mb.build(tag="ip", fingerprint=fingerprint(inst), projection=_projection_xy(inst))


def build_ip_z(inst: Instance) -> Model:
    """Standard formulation plus a unary expansion ``z_l = [x == l]`` of every flow."""
    mb = ModelBuilder("ipz")
    _ip_rows(mb, inst)
    for e, (i, j) in enumerate(inst.arcs):
        for l in range(inst.a[e] + 1):
            mb.var(f"z_{i}_{j}_{l}", 0, 1, VarType.BINARY)
    for e, (i, j) in enumerate(inst.arcs):
        zs = [f"z_{i}_{j}_{l}" for l in range(inst.a[e] + 1)]
        mb.row(f"xz_{i}_{j}", [(z, l) for l, z in enumerate(zs)] + [(f"x_{i}_{j}", -1)], "=", 0)
        mb.row(f"yz_{i}_{j}", [(z, 1) for z in zs[1:]] + [(f"y_{i}_{j}", -1)], "<=", 0)
        mb.row(f"zsum_{i}_{j}", [(z, 1) for z in zs], "=", 1)
    return mb.build(tag="ipz", fingerprint=fingerprint(inst), projection=_projection_xy(inst))


def _require_default(rt: RootedTree) -> None:
    if not rt.instance.variant.is_default:
        raise UnsupportedVariant("tree extended formulations only cover the default variant")


def _child_levels(rt: RootedTree, i: int, s: int):
    """``(k_prev, k)`` pairs scanned at the ``s``-th child of ``i``."""
    inst = rt.instance
    j = rt.children[i][s]
    a_e = inst.a[rt.arc_of[(i, j)]]
    if s == 0:
        return [(0, k) for k in range(a_e + 1)]
    b_i = inst.cap(i)
    return [(kp, k) for k in range(b_i + 1) for kp in range(max(0, k - a_e), k + 1)]


def _v_levels(rt: RootedTree, j: int, a_e: int):
    """``(l, k)`` pairs of the dual variables attached to the arc into ``j``."""
    b_j = rt.instance.cap(j)
    if rt.is_leaf(j):
        return [(l, 0) for l in range(a_e + 1)]
    return [(l, k) for l in range(a_e + 1) for k in range(b_j - l + 1)]


def _root_levels(rt: RootedTree) -> range:
    return range(rt.instance.cap(rt.root) + 1) if rt.children[rt.root] else range(1)


def build_qdp(rt: RootedTree) -> Model:
    """Dual of the tree DP's linear program, in ``(u, v)`` variables."""
    _require_default(rt)
    inst = rt.instance
    r = rt.root
    mb = ModelBuilder("qdp")
    for i in rt.order:
        for s, j in enumerate(rt.children[i]):
            for kp, k in _child_levels(rt, i, s):
                mb.var(f"u_{i}_{j}_{kp}_{k}")
    for k in _root_levels(rt):
        mb.var(f"v_0_{r}_0_{k}")
    for i in rt.order:
        for j in rt.children[i]:
            e = rt.arc_of[(i, j)]
            for l, k in _v_levels(rt, j, inst.a[e]):
                name = mb.var(f"v_{i}_{j}_{l}_{k}")
                mb.obj(name, arc_cost(l, inst.p[e], inst.q[e]))

    for i in rt.order:
        kids = rt.children[i]
        b_i = inst.cap(i)
        for s, j in enumerate(kids):
            e = rt.arc_of[(i, j)]
            a_e = inst.a[e]
            for k in range(b_i + 1):
                lhs = [
                    (f"u_{i}_{j}_{kp}_{k}", 1)
                    for kp in range(max(0, k - a_e), k + 1)
                    if mb.has(f"u_{i}_{j}_{kp}_{k}")
                ]
                if s + 1 < len(kids):
                    nxt = kids[s + 1]
                    a_n = inst.a[rt.arc_of[(i, nxt)]]
                    rhs = [
                        (f"u_{i}_{nxt}_{k}_{kn}", -1)
                        for kn in range(k, min(b_i, k + a_n) + 1)
                        if mb.has(f"u_{i}_{nxt}_{k}_{kn}")
                    ]
                else:
                    par = rt.parent[i]
                    rhs = [
                        (f"v_{par}_{i}_{l}_{k}", -1)
                        for l in range(b_i - k + 1)
                        if mb.has(f"v_{par}_{i}_{l}_{k}")
                    ]
                mb.row(f"flow_{i}_{j}_{k}", lhs + rhs, "=", 0)
    for i in rt.order:
        for s, j in enumerate(rt.children[i]):
            e = rt.arc_of[(i, j)]
            levels = _child_levels(rt, i, s)
            for l in range(inst.a[e] + 1):
                vs = [(f"v_{i}_{j}_{l}_{k}", 1) for ll, k in _v_levels(rt, j, inst.a[e]) if ll == l]
                us = [(f"u_{i}_{j}_{kp}_{k}", -1) for kp, k in levels if k - kp == l]
                mb.row(f"rev_{i}_{j}_{l}", vs + us, "=", 0)
    mb.row("unit", [(f"v_0_{r}_0_{k}", 1) for k in _root_levels(rt)], "=", 1)

    proj_x: dict[str, dict[str, int]] = {}
    proj_y: dict[str, dict[str, int]] = {}
    for i in rt.order:
        for j in rt.children[i]:
            e = rt.arc_of[(i, j)]
            key = "{}_{}".format(*inst.arcs[e])
            levels = _v_levels(rt, j, inst.a[e])
            proj_x[f"x_{key}"] = {f"v_{i}_{j}_{l}_{k}": l for l, k in levels if l > 0}
            proj_y[f"y_{key}"] = {f"v_{i}_{j}_{l}_{k}": 1 for l, k in levels if l > 0}
    return mb.build(
        tag="qdp", fingerprint=fingerprint(inst), root=r, projection={"x": proj_x, "y": proj_y}
    )


def _parent_levels(rt: RootedTree, i: int):
    """``(k_prev, k)`` pairs of the parent-side assignment variables of ``i``."""
    inst = rt.instance
    b_i = inst.cap(i)
    if rt.parent[i] == 0:
        if rt.is_leaf(i):
            return [(0, 0)]
        return [(k, k) for k in range(b_i + 1)]
    a_e = inst.a[rt.parent_arc(i)]
    if rt.is_leaf(i):
        return [(0, k) for k in range(a_e + 1)]
    return [(kp, k) for k in range(b_i + 1) for kp in range(max(0, k - a_e), k + 1)]


def build_qsn(rt: RootedTree, with_z: bool = False) -> Model:
    """Per-node flow-assignment formulations glued together by linking rows.

    Every node ``i`` scans its children and then its parent (the root scans
    a zero-capacity pseudo-arc to ``0``). With ``with_z`` the two sides of an
    arc are linked through shared binaries ``z_i_j_l`` instead of directly.
    """
    _require_default(rt)
    inst = rt.instance
    mb = ModelBuilder("qsnz" if with_z else "qsn")
    scans: dict[int, list[tuple[int, list[tuple[int, int]]]]] = {}
    for i in rt.order:
        scan = [(j, _child_levels(rt, i, s)) for s, j in enumerate(rt.children[i])]
        scan.append((rt.parent[i], _parent_levels(rt, i)))
        scans[i] = scan
        for j, levels in scan:
            for kp, k in levels:
                mb.var(f"f_{i}_{j}_{kp}_{k}")
    if with_z:
        for e, (i, j) in enumerate(inst.arcs):
            for l in range(inst.a[e] + 1):
                mb.var(f"z_{i}_{j}_{l}", 0, 1, VarType.BINARY)

    for i in rt.order:
        b_i = inst.cap(i)
        scan = scans[i]
        for pos in range(len(scan) - 1):
            j, levels = scan[pos]
            nxt, nxt_levels = scan[pos + 1]
            for k in range(b_i + 1):
                lhs = [(f"f_{i}_{j}_{kp}_{kk}", 1) for kp, kk in levels if kk == k]
                rhs = [(f"f_{i}_{nxt}_{kk}_{kn}", -1) for kk, kn in nxt_levels if kk == k]
                mb.row(f"flow_{i}_{j}_{k}", lhs + rhs, "=", 0)
    for i in rt.order:
        par, levels = scans[i][-1]
        mb.row(f"unit_{i}", [(f"f_{i}_{par}_{kp}_{k}", 1) for kp, k in levels], "=", 1)

    for i in rt.order:
        for s, j in enumerate(rt.children[i]):
            e = rt.arc_of[(i, j)]
            down = _child_levels(rt, i, s)
            up = _parent_levels(rt, j)
            lo, hi = inst.arcs[e]
            for l in range(inst.a[e] + 1):
                side_i = [(f"f_{i}_{j}_{kp}_{k}", 1) for kp, k in down if k - kp == l]
                side_j = [(f"f_{j}_{i}_{kp}_{k}", 1) for kp, k in up if k - kp == l]
                if with_z:
                    z = (f"z_{lo}_{hi}_{l}", -1)
                    mb.row(f"linkz_{i}_{j}_{l}", side_i + [z], "=", 0)
                    mb.row(f"linkz_{j}_{i}_{l}", side_j + [z], "=", 0)
                else:
                    neg = [(name, -c) for name, c in side_j]
                    mb.row(f"link_{i}_{j}_{l}", side_i + neg, "=", 0)

    proj_x: dict[str, dict[str, int]] = {}
    proj_y: dict[str, dict[str, int]] = {}
    for i in rt.order:
        for s, j in enumerate(rt.children[i]):
            e = rt.arc_of[(i, j)]
            key = "{}_{}".format(*inst.arcs[e])
            levels = _child_levels(rt, i, s)
            for kp, k in levels:
                if k > kp:
                    mb.obj(f"f_{i}_{j}_{kp}_{k}", arc_cost(k - kp, inst.p[e], inst.q[e]))
            proj_x[f"x_{key}"] = {f"f_{i}_{j}_{kp}_{k}": k - kp for kp, k in levels if k > kp}
            proj_y[f"y_{key}"] = {f"f_{i}_{j}_{kp}_{k}": 1 for kp, k in levels if k > kp}
    return mb.build(
        tag=mb.name,
        fingerprint=fingerprint(inst),
        root=rt.root,
        projection={"x": proj_x, "y": proj_y},
    )


_SENSES = {
    "<=": lambda lhs, rhs: lhs <= rhs,
    "=": lambda lhs, rhs: lhs == rhs,
    ">=": lambda lhs, rhs: lhs >= rhs,
}


def check_point(model: Model, pt: Mapping[str, object], integral: bool = False) -> list[Violation]:
    """Exactly evaluate every bound and row of ``model`` at ``pt``.

    Variables missing from ``pt`` are zero. Integrality of binary and
    general variables is only checked when ``integral`` is set.
    """
    known = {v.name for v in model.variables}
    for name in pt:
        if name not in known:
            raise UnknownVariable(f"point assigns unknown variable {name}")
    val = {name: Fraction(value) for name, value in pt.items()}
    zero = Fraction(0)
    out: list[Violation] = []
    for var in model.variables:
        x = val.get(var.name, zero)
        if var.lower is not None and x < var.lower:
            out.append(Violation(f"bound:{var.name}", x, ">=", var.lower))
        if var.upper is not None and x > var.upper:
            out.append(Violation(f"bound:{var.name}", x, "<=", var.upper))
        if integral and var.vtype is not VarType.CONTINUOUS and x.denominator != 1:
            out.append(Violation(f"integer:{var.name}", x, "in", Fraction(x.numerator // x.denominator)))
    for row in model.constraints:
        lhs = sum((c * val.get(name, zero) for name, c in row.coeffs), zero)
        if not _SENSES[row.sense](lhs, row.rhs):
            out.append(Violation(row.name, lhs, row.sense, row.rhs))
    return out


def objective_value(model: Model, pt: Mapping[str, object]) -> Fraction:
    zero = Fraction(0)
    return sum((c * Fraction(pt.get(name, zero)) for name, c in model.objective), zero)


def project_point(model: Model, pt: Mapping[str, object]) -> tuple[dict[str, Fraction], dict[str, Fraction]]:
    """Apply the model's recorded projection maps to get ``x_i_j``/``y_i_j`` values."""
    proj = model.metadata["projection"]
    zero = Fraction(0)
    out = []
    for part in ("x", "y"):
        out.append(
            {
                key: sum((c * Fraction(pt.get(name, zero)) for name, c in terms.items()), zero)
                for key, terms in proj[part].items()
            }
        )
    return out[0], out[1]


def solution_assignment(inst: Instance, x, y) -> Assignment:
    """``x_i_j``/``y_i_j`` assignment for a flow/indicator pair."""
    out: Assignment = {}
    for e, (i, j) in enumerate(inst.arcs):
        out[f"x_{i}_{j}"] = Fraction(x[e])
        out[f"y_{i}_{j}"] = Fraction(y[e])
    return out


def unary_assignment(inst: Instance, x) -> Assignment:
    """``z_i_j_l = [x_ij == l]`` for an integer flow."""
    out: Assignment = {}
    for e, (i, j) in enumerate(inst.arcs):
        out[f"z_{i}_{j}_{int(x[e])}"] = Fraction(1)
    return out
