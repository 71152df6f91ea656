"""JSON documents for instances, solutions and sparse assignments.

Rationals are written as JSON integers when integral and as ``"num/den"``
strings otherwise; they are never routed through floats.
"""

from __future__ import annotations

import json
from collections.abc import Mapping
from fractions import Fraction
from pathlib import Path

from .errors import ParseError, ValidationError
from .model import Instance, Sense, Solution, Variant, new_instance
from .rational import as_fraction, to_json_rational

FORMAT_VERSION = 1


def instance_to_dict(inst: Instance, provenance: Mapping | None = None) -> dict:
    variant = inst.variant
    senses: str | dict = "LE"
    if variant.eq_nodes:
        senses = {str(i): Sense.EQ.value for i in sorted(variant.eq_nodes)}
    doc = {
        "version": FORMAT_VERSION,
        "nodes": [{"id": i, "b": inst.cap(i)} for i in inst.nodes],
        "arcs": [
            {"i": i, "j": j, "p": to_json_rational(p), "q": to_json_rational(q)}
            for (i, j), p, q in zip(inst.arcs, inst.p, inst.q)
        ],
        "variant": {"node_sense": senses, "link_lower": variant.link_lower},
    }
    if provenance is not None:
        doc["provenance"] = dict(provenance)
    return doc


def dumps_instance(inst: Instance, provenance: Mapping | None = None) -> str:
    return json.dumps(instance_to_dict(inst, provenance), indent=2) + "\n"


def _field(doc: Mapping, key: str, where: str):
    if not isinstance(doc, Mapping) or key not in doc:
        raise ParseError(f"missing field {key!r}", field=f"{where}{key}")
    return doc[key]


def _rational(value, where: str) -> Fraction:
    if isinstance(value, float):
        raise ParseError("floating-point numbers are not accepted; use 'num/den'", field=where)
    try:
        return as_fraction(value)
    except (TypeError, ValueError) as exc:
        raise ParseError(str(exc), field=where) from exc


def instance_from_dict(doc: Mapping) -> Instance:
    version = _field(doc, "version", "")
    if version != FORMAT_VERSION:
        raise ParseError(f"unsupported version {version!r}", field="version")
    nodes = _field(doc, "nodes", "")
    if not isinstance(nodes, list):
        raise ParseError("nodes must be a list", field="nodes")
    b: list[int] = []
    for pos, node in enumerate(nodes):
        node_id = _field(node, "id", f"nodes[{pos}].")
        if node_id != pos + 1:
            raise ParseError(f"node ids must be 1..n in order, found {node_id!r}", field=f"nodes[{pos}].id")
        cap = _field(node, "b", f"nodes[{pos}].")
        if isinstance(cap, bool) or not isinstance(cap, int):
            raise ValidationError(f"nodes[{pos}].b must be an integer, got {cap!r}")
        b.append(cap)

    arcs, p, q = [], [], []
    for pos, arc in enumerate(_field(doc, "arcs", "")):
        where = f"arcs[{pos}]."
        i, j = _field(arc, "i", where), _field(arc, "j", where)
        if not all(isinstance(v, int) and not isinstance(v, bool) for v in (i, j)):
            raise ParseError("arc endpoints must be integers", field=f"{where}i")
        arcs.append((i, j))
        p.append(_rational(_field(arc, "p", where), f"{where}p"))
        q.append(_rational(_field(arc, "q", where), f"{where}q"))

    raw = doc.get("variant", {})
    senses = raw.get("node_sense", "LE")
    if senses == "LE":
        eq: frozenset[int] = frozenset()
    elif isinstance(senses, Mapping):
        try:
            eq = frozenset(int(k) for k, v in senses.items() if Sense(v) is Sense.EQ)
        except ValueError as exc:
            raise ParseError(str(exc), field="variant.node_sense") from exc
    else:
        raise ParseError("node_sense must be 'LE' or a map", field="variant.node_sense")
    variant = Variant(eq, bool(raw.get("link_lower", False)))
    return new_instance(b, arcs, p, q, variant)


def loads_instance(text: str) -> Instance:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno) from exc
    return instance_from_dict(doc)


def read_instance(path: str | Path) -> Instance:
    return loads_instance(Path(path).read_text())


def read_provenance(path: str | Path) -> dict | None:
    return json.loads(Path(path).read_text()).get("provenance")


def write_instance(inst: Instance, path: str | Path, provenance: Mapping | None = None) -> None:
    Path(path).write_text(dumps_instance(inst, provenance))


def assignment_to_dict(values: Mapping[str, Fraction]) -> dict[str, int | str]:
    return {name: to_json_rational(Fraction(v)) for name, v in values.items()}


def assignment_from_dict(doc: Mapping) -> dict[str, Fraction]:
    return {name: _rational(v, name) for name, v in doc.items()}


def write_assignment(values: Mapping[str, Fraction], path: str | Path, **extra) -> None:
    doc = {**{k: _jsonable(v) for k, v in extra.items()}, "values": assignment_to_dict(values)}
    Path(path).write_text(json.dumps(doc, indent=2) + "\n")


def read_assignment(path: str | Path) -> dict[str, Fraction]:
    doc = json.loads(Path(path).read_text())
    return assignment_from_dict(doc.get("values", doc))


def _jsonable(value):
    if isinstance(value, Fraction):
        return to_json_rational(value)
    return value


def solution_to_dict(inst: Instance, sol: Solution) -> dict:
    return {
        "objective": to_json_rational(sol.objective),
        "arcs": [
            {"i": i, "j": j, "x": x, "y": y}
            for (i, j), x, y in zip(inst.arcs, sol.x, sol.y)
        ],
    }


def write_solution(inst: Instance, sol: Solution, path: str | Path) -> None:
    Path(path).write_text(json.dumps(solution_to_dict(inst, sol), indent=2) + "\n")


def read_solution(inst: Instance, path: str | Path) -> Solution:
    doc = json.loads(Path(path).read_text())
    index = inst.arc_index()
    x = [0] * inst.num_arcs
    y = [0] * inst.num_arcs
    for pos, arc in enumerate(doc["arcs"]):
        key = (min(arc["i"], arc["j"]), max(arc["i"], arc["j"]))
        if key not in index:
            raise ParseError(f"unknown arc {key}", field=f"arcs[{pos}]")
        x[index[key]] = arc["x"]
        y[index[key]] = arc["y"]
    return Solution(tuple(x), tuple(y), _rational(doc["objective"], "objective"))
