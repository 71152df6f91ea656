"""LP- and MPS-format writers and an LP-format reader for :class:`Model`.

Coefficients are written as exact decimals. A row (or the objective) that
contains a rational without a finite decimal expansion is multiplied through
by the LCM of its denominators first, which leaves the row's solution set
unchanged; the objective scale factor is recorded in a comment.
"""

from __future__ import annotations

import re
from fractions import Fraction
from functools import lru_cache
from pathlib import Path

from .errors import ModelFormatError, NameTooLong, ParseError
from .formulations import Constraint, Model, Variable, VarType
from .rational import decimal_str, denominator_lcm, is_terminating

MAX_NAME = 255
LINE_WIDTH = 78
_NAME_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_.]*$")


def scale_row(coeffs, rhs: Fraction | None = None) -> tuple[list[tuple[str, Fraction]], Fraction | None, int]:
    """Return the row multiplied by the LCM of its denominators when it is not decimal-exact."""
    values = [c for _, c in coeffs] + ([rhs] if rhs is not None else [])
    if all(is_terminating(v) for v in values):
        return list(coeffs), rhs, 1
    factor = denominator_lcm(values)
    scaled = [(name, c * factor) for name, c in coeffs]
    return scaled, (rhs * factor if rhs is not None else None), factor


def _check_name(name: str) -> None:
    if len(name) > MAX_NAME:
        raise NameTooLong(f"name longer than {MAX_NAME} characters: {name[:40]}...")
    if not _NAME_RE.match(name):
        raise ModelFormatError(f"name {name!r} is not valid in LP/MPS files")


def _terms(coeffs) -> list[str]:
    out = []
    for pos, (name, c) in enumerate(coeffs):
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        body = name if mag == 1 else f"{decimal_str(mag)} {name}"
        out.append(f"- {body}" if sign == "-" else (body if pos == 0 else f"+ {body}"))
    return out


def _wrap(head: str, pieces: list[str]) -> list[str]:
    lines, cur = [], head
    for piece in pieces:
        if len(cur) + 1 + len(piece) > LINE_WIDTH and cur.strip():
            lines.append(cur)
            cur = "   " + piece
        else:
            cur = f"{cur} {piece}" if cur else piece
    lines.append(cur)
    return lines


def _bound_line(var: Variable) -> str:
    lo, up = var.lower, var.upper
    if lo is None and up is None:
        return f" {var.name} free"
    for value in (lo, up):
        if value is not None and not is_terminating(value):
            raise ModelFormatError(f"bound {value} of {var.name} has no exact decimal form")
    lo_s = "-inf" if lo is None else decimal_str(lo)
    if up is None:
        return f" {var.name} >= {lo_s}"
    return f" {lo_s} <= {var.name} <= {decimal_str(up)}"


def dumps_lp(model: Model) -> str:
    for var in model.variables:
        _check_name(var.name)
    lines = [f"\\ Problem: {model.name}"]
    for key in ("tag", "fingerprint", "root"):
        if key in model.metadata:
            lines.append(f"\\ {key}: {model.metadata[key]}")
    obj, _, factor = scale_row(model.objective)
    if factor != 1:
        lines.append(f"\\ objective scaled by {factor}")
    lines.append("Minimize")
    lines.extend(_wrap(" obj:", _terms(obj)))
    lines.append("Subject To")
    for row in model.constraints:
        _check_name(row.name)
        coeffs, rhs, _ = scale_row(row.coeffs, row.rhs)
        lines.extend(_wrap(f" {row.name}:", _terms(coeffs) + [row.sense, decimal_str(rhs)]))
    lines.append("Bounds")
    lines.extend(_bound_line(v) for v in model.variables)
    for title, vtype in (("Binaries", VarType.BINARY), ("Generals", VarType.INTEGER)):
        names = [v.name for v in model.variables if v.vtype is vtype]
        if names:
            lines.append(title)
            lines.extend(_wrap("", names) if names else [])
    lines.append("End")
    return "\n".join(lines) + "\n"


def write_model_lp(model: Model, path: str | Path) -> None:
    try:
        Path(path).write_text(dumps_lp(model))
    except OSError as exc:
        raise ModelFormatError(f"cannot write {path}: {exc}") from exc


_SECTION = {
    "minimize": "obj",
    "minimise": "obj",
    "min": "obj",
    "subject to": "rows",
    "such that": "rows",
    "st": "rows",
    "s.t.": "rows",
    "bounds": "bounds",
    "binaries": "bin",
    "binary": "bin",
    "generals": "gen",
    "general": "gen",
    "end": "end",
}
_TOKEN = re.compile(r"<=|>=|=<|=>|=|[+-]|:|[^\s+\-:<>=]+")


@lru_cache(maxsize=4096)
def _number(tok: str) -> Fraction | None:
    # files repeat a handful of coefficients; Fractions are immutable, so caching is safe
    if tok[0] not in "0123456789.+-":
        return None
    try:
        return Fraction(tok)
    except ValueError:
        return None


def _parse_expr(tokens: list[str], line: int) -> list[tuple[str, Fraction]]:
    terms: list[tuple[str, Fraction]] = []
    sign, coef = 1, None
    for tok in tokens:
        if tok in "+-":
            sign = -1 if tok == "-" else 1
            continue
        num = _number(tok)
        if num is not None and coef is None:
            coef = num
            continue
        if num is not None:
            raise ParseError(f"unexpected number {tok}", line=line)
        terms.append((tok, sign * (coef if coef is not None else Fraction(1))))
        sign, coef = 1, None
    return terms


def _inf(tok: str) -> bool:
    return tok.lstrip("+-").lower() in ("inf", "infinity")


def loads_lp(text: str) -> Model:
    """Parse the LP dialect written by :func:`dumps_lp`.

    Line breaks inside a row are insignificant: a row ends at its right-hand
    side. Variables are ordered as they appear in the Bounds section. A
    recorded objective scale factor is divided back out; scaled rows are
    kept as written since scaling does not change their solution set.
    """
    section = None
    name = "model"
    obj_scale = 1
    meta: dict[str, object] = {}
    chunks: dict[str, list[tuple[int, list[str]]]] = {k: [] for k in ("obj", "rows", "bounds", "bin", "gen")}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if stripped.startswith("\\"):
            body = stripped[1:].strip()
            if body.startswith("objective scaled by "):
                obj_scale = int(body.rsplit(" ", 1)[1])
            elif ":" in body:
                key, value = (s.strip() for s in body.split(":", 1))
                if key == "Problem":
                    name = value
                elif key in ("tag", "fingerprint"):
                    meta[key] = value
                elif key == "root":
                    meta[key] = int(value)
            continue
        if not stripped:
            continue
        if stripped.lower() in _SECTION:
            section = _SECTION[stripped.lower()]
            continue
        if section is None:
            raise ParseError("content before the objective section", line=lineno)
        if section == "end":
            raise ParseError("content after End", line=lineno)
        chunks[section].append((lineno, _TOKEN.findall(stripped)))

    obj_tokens = [t for _, toks in chunks["obj"] for t in toks]
    if obj_tokens[:2] and len(obj_tokens) >= 2 and obj_tokens[1] == ":":
        obj_tokens = obj_tokens[2:]
    objective = tuple(
        (v, c / obj_scale) for v, c in _parse_expr(obj_tokens, chunks["obj"][0][0] if chunks["obj"] else 0)
    )

    rows: list[Constraint] = []
    pending: list[str] = []
    start = 0
    stream = [(ln, t) for ln, toks in chunks["rows"] for t in toks]
    idx = 0
    while idx < len(stream):
        ln, tok = stream[idx]
        if not pending:
            start = ln
        pending.append(tok)
        idx += 1
        if tok in ("<=", ">=", "=", "=<", "=>"):
            if idx >= len(stream):
                raise ParseError("row without right-hand side", line=ln)
            rhs_tok = stream[idx][1]
            idx += 1
            rsign = 1
            if rhs_tok in "+-":
                rsign = -1 if rhs_tok == "-" else 1
                rhs_tok = stream[idx][1]
                idx += 1
            rhs = _number(rhs_tok)
            if rhs is None:
                raise ParseError(f"bad right-hand side {rhs_tok!r}", line=ln)
            if len(pending) < 3 or pending[1] != ":":
                raise ParseError("rows must be named", line=start)
            sense = {"=<": "<=", "=>": ">="}.get(tok, tok)
            rows.append(Constraint(pending[0], tuple(_parse_expr(pending[2:-1], start)), sense, rsign * rhs))
            pending = []
    if pending:
        raise ParseError("unterminated row", line=start)

    integrality: dict[str, VarType] = {}
    for section, vtype in (("bin", VarType.BINARY), ("gen", VarType.INTEGER)):
        for _, toks in chunks[section]:
            for tok in toks:
                integrality[tok] = vtype

    variables: list[Variable] = []
    for ln, toks in chunks["bounds"]:
        variables.append(_parse_bound(toks, ln, integrality))
    declared = {v.name for v in variables}
    used = [n for n, _ in objective] + [n for r in rows for n, _ in r.coeffs] + list(integrality)
    for n in used:
        if n not in declared:
            declared.add(n)
            vtype = integrality.get(n, VarType.CONTINUOUS)
            upper = Fraction(1) if vtype is VarType.BINARY else None
            variables.append(Variable(n, Fraction(0), upper, vtype))
    return Model(name, tuple(variables), tuple(rows), objective, meta)


def _parse_bound(toks: list[str], line: int, integrality: dict[str, VarType]) -> Variable:
    def value(tok: str, sign: int = 1) -> Fraction | None:
        if _inf(tok):
            return None
        num = _number(tok)
        if num is None:
            raise ParseError(f"bad bound value {tok!r}", line=line)
        return sign * num

    # merge unary signs into the following number
    merged: list[str] = []
    for tok in toks:
        if merged and merged[-1] in "+-" and (len(merged) == 1 or merged[-2] in ("<=", ">=", "=")):
            merged[-1] = merged[-1] + tok
        else:
            merged.append(tok)
    lower: Fraction | None = Fraction(0)
    upper: Fraction | None = None
    if len(merged) == 2 and merged[1].lower() == "free":
        name, lower = merged[0], None
    elif len(merged) == 5 and merged[1] == "<=" and merged[3] == "<=":
        name, lower, upper = merged[2], value(merged[0]), value(merged[4])
    elif len(merged) == 3 and merged[1] in (">=", "<="):
        name = merged[0]
        if merged[1] == ">=":
            lower = value(merged[2])
        else:
            upper = value(merged[2])
    elif len(merged) == 3 and merged[1] == "=":
        name = merged[0]
        lower = upper = value(merged[2])
    else:
        raise ParseError(f"unsupported bound {' '.join(toks)!r}", line=line)
    return Variable(name, lower, upper, integrality.get(name, VarType.CONTINUOUS))


def read_model_lp(path: str | Path) -> Model:
    return loads_lp(Path(path).read_text())


def dumps_mps(model: Model) -> str:
    """Free-format MPS. Binaries are written as integer columns with ``BV`` bounds."""
    _check_name(model.name)
    for var in model.variables:
        _check_name(var.name)
    rows = []
    for row in model.constraints:
        _check_name(row.name)
        coeffs, rhs, _ = scale_row(row.coeffs, row.rhs)
        rows.append((row.name, row.sense, coeffs, rhs))
    obj, _, factor = scale_row(model.objective)

    column: dict[str, list[tuple[str, Fraction]]] = {v.name: [] for v in model.variables}
    for name, c in obj:
        column[name].append(("obj", c))
    for rname, _, coeffs, _ in rows:
        for name, c in coeffs:
            column[name].append((rname, c))

    lines = [f"NAME {model.name}"]
    if factor != 1:
        lines.insert(0, f"* objective scaled by {factor}")
    lines += ["ROWS", " N obj"]
    kind = {"<=": "L", ">=": "G", "=": "E"}
    lines += [f" {kind[sense]} {rname}" for rname, sense, _, _ in rows]
    lines.append("COLUMNS")
    in_int = False
    marker = 0
    for var in model.variables:
        is_int = var.vtype is not VarType.CONTINUOUS
        if is_int != in_int:
            tag = "INTORG" if is_int else "INTEND"
            lines.append(f" MARKER{marker} 'MARKER' '{tag}'")
            marker += 1
            in_int = is_int
        entries = column[var.name] or [("obj", Fraction(0))]
        lines += [f" {var.name} {rname} {decimal_str(c)}" for rname, c in entries]
    if in_int:
        lines.append(f" MARKER{marker} 'MARKER' 'INTEND'")
    lines.append("RHS")
    lines += [f" RHS {rname} {decimal_str(rhs)}" for rname, _, _, rhs in rows if rhs != 0]
    lines.append("BOUNDS")
    for var in model.variables:
        lines += _mps_bounds(var)
    lines.append("ENDATA")
    return "\n".join(lines) + "\n"


def _mps_bounds(var: Variable) -> list[str]:
    if var.vtype is VarType.BINARY and var.lower == 0 and var.upper == 1:
        return [f" BV BND {var.name}"]
    if var.lower is None and var.upper is None:
        return [f" FR BND {var.name}"]
    out = []
    if var.lower is None:
        out.append(f" MI BND {var.name}")
    elif var.lower != 0:
        out.append(f" LO BND {var.name} {decimal_str(var.lower)}")
    if var.upper is not None:
        out.append(f" UP BND {var.name} {decimal_str(var.upper)}")
    elif var.vtype is VarType.INTEGER:
        out.append(f" PL BND {var.name}")
    return out


def write_model_mps(model: Model, path: str | Path) -> None:
    try:
        Path(path).write_text(dumps_mps(model))
    except OSError as exc:
        raise ModelFormatError(f"cannot write {path}: {exc}") from exc
