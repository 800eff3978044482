"""CPLEX LP text export and a parser for reading it back."""

from __future__ import annotations

import re
from fractions import Fraction

from .formulation import Constraint, MilpInstance, Variable

_WRAP = 200


def _num(x) -> str:
    if isinstance(x, Fraction):
        x = float(x) if x.denominator != 1 else int(x)
    if isinstance(x, float) and x.is_integer() and abs(x) < 1e15:
        x = int(x)
    return repr(x)


def _expr(coeffs) -> list[str]:
    terms = []
    for i, (name, c) in enumerate(coeffs):
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        body = name if mag == 1 else f"{_num(mag)} {name}"
        terms.append(body if (i == 0 and sign == "+") else f"{sign} {body}")
    return terms or ["0"]


def _wrapped(head: str, terms: list[str], tail: str) -> list[str]:
    lines, cur = [], head
    for t in terms:
        if len(cur) + len(t) + 1 > _WRAP:
            lines.append(cur)
            cur = "   "
        cur += " " + t
    cur += tail
    lines.append(cur)
    return lines


def export_milp(inst: MilpInstance) -> str:
    out = [f"\\ minimum-slot pairing schedule: K={inst.K}, T_bar={inst.t_bar}, UEs={len(inst.ues)}"]
    for w in inst.warnings:
        out.append(f"\\ warning: {w}")
    out.append("Minimize")
    out += _wrapped(" obj:", _expr(list(inst.objective.items())), "")
    out.append("Subject To")
    for con in inst.constraints:
        out += _wrapped(f" {con.name}:", _expr(con.coeffs), f" {con.sense} {_num(con.rhs)}")
    out.append("Bounds")
    for var in inst.variables.values():
        if var.kind == "binary":
            continue
        if var.ub is None:
            out.append(f" {var.name} >= {_num(var.lb)}")
        else:
            out.append(f" {_num(var.lb)} <= {var.name} <= {_num(var.ub)}")
    generals = [v.name for v in inst.variables.values() if v.kind == "integer"]
    binaries = [v.name for v in inst.variables.values() if v.kind == "binary"]
    if generals:
        out.append("Generals")
        out += [f" {n}" for n in generals]
    if binaries:
        out.append("Binary")
        out += [f" {n}" for n in binaries]
    out.append("End")
    return "\n".join(out) + "\n"


_SECTIONS = {
    "minimize": "obj", "minimum": "obj", "min": "obj",
    "subject to": "st", "such that": "st", "st": "st", "s.t.": "st",
    "bounds": "bounds", "bound": "bounds",
    "generals": "gen", "general": "gen", "gen": "gen",
    "binary": "bin", "binaries": "bin", "bin": "bin",
    "end": "end",
}
_TERM = re.compile(r"([+-])?\s*(\d+(?:\.\d*)?(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)?\s*([A-Za-z_][\w.]*)")
_NUMBER = re.compile(r"[+-]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?|[+-]?inf(?:inity)?", re.I)


def _parse_number(s: str):
    s = s.strip()
    if re.fullmatch(r"[+-]?\d+", s):
        return int(s)
    return float(s)


def _parse_expr(text: str) -> list[tuple[str, object]]:
    coeffs, pos = [], 0
    text = text.strip()
    while pos < len(text):
        m = _TERM.match(text, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse linear expression near {text[pos:pos + 30]!r}")
        sign, coef, name = m.groups()
        c = _parse_number(coef) if coef else 1
        coeffs.append((name, -c if sign == "-" else c))
        pos = m.end()
        while pos < len(text) and text[pos].isspace():
            pos += 1
    return coeffs


def parse_lp(text: str) -> MilpInstance:
    """Read an LP document produced by :func:`export_milp` (and similar hand-written ones)."""
    section = None
    chunks: dict[str, list[str]] = {"obj": [], "st": [], "bounds": [], "gen": [], "bin": []}
    for raw in text.splitlines():
        line = raw.split("\\", 1)[0].strip()
        if not line:
            continue
        key = line.lower()
        if key in _SECTIONS:
            section = _SECTIONS[key]
            if section == "end":
                break
            continue
        if section is None:
            raise ValueError(f"content before any section: {line!r}")
        chunks[section].append(line)

    def statements(lines):
        # a statement ends once it carries a comparison; objective is a single statement
        stmts, cur = [], ""
        for line in lines:
            if cur and re.match(r"^[A-Za-z_][\w.]*\s*:", line):
                stmts.append(cur)
                cur = ""
            cur = f"{cur} {line}".strip()
        if cur:
            stmts.append(cur)
        return stmts

    objective: dict[str, object] = {}
    obj_text = " ".join(chunks["obj"])
    if ":" in obj_text:
        obj_text = obj_text.split(":", 1)[1]
    for name, c in _parse_expr(obj_text):
        objective[name] = objective.get(name, 0) + c

    constraints = []
    for stmt in statements(chunks["st"]):
        name, body = stmt.split(":", 1)
        m = re.search(r"(<=|>=|=<|=>|=|<|>)", body)
        if not m:
            raise ValueError(f"constraint {name.strip()} has no comparison")
        sense = {"=<": "<=", "<": "<=", "=>": ">=", ">": ">="}.get(m.group(1), m.group(1))
        constraints.append(
            Constraint(name.strip(), tuple(_parse_expr(body[:m.start()])), sense, _parse_number(body[m.end():]))
        )

    bounds: dict[str, list] = {}
    for line in chunks["bounds"]:
        parts = re.split(r"\s*(<=|>=)\s*", line)
        if len(parts) == 5:
            lb, _, name, _, ub = parts
            bounds[name] = [_parse_number(lb), _parse_number(ub)]
        elif len(parts) == 3 and parts[1] == ">=":
            bounds.setdefault(parts[0], [0, None])[0] = _parse_number(parts[2])
        elif len(parts) == 3 and parts[1] == "<=":
            bounds.setdefault(parts[0], [0, None])[1] = _parse_number(parts[2])
        else:
            raise ValueError(f"unsupported bound line {line!r}")

    generals = {tok for line in chunks["gen"] for tok in line.split()}
    binaries = {tok for line in chunks["bin"] for tok in line.split()}
    names: list[str] = []
    seen: set[str] = set()
    for name in list(objective) + [v for c in constraints for v, _ in c.coeffs] + list(bounds) + sorted(generals | binaries):
        if name not in seen:
            seen.add(name)
            names.append(name)
    variables = {}
    for name in names:
        if name in binaries:
            variables[name] = Variable(name, "binary", 0, 1)
            continue
        lb, ub = bounds.get(name, [0, None])
        variables[name] = Variable(name, "integer" if name in generals else "continuous", lb, ub)
    return MilpInstance(variables, constraints, objective)
