"""Render declarations back to RSL text.

Output re-parses to a structurally identical declaration; comments and
source locations are not reproduced.
"""

from __future__ import annotations

from reqlens.formula import path_text, pretty
from reqlens.model import (
    Body, Call, ClassDecl, Clause, Conditional, FeatureDecl, Loop,
    OpaqueStatement,
)

INDENT = "    "


def format_call(call: Call) -> str:
    head = path_text(call.target + (call.name,))
    if call.args:
        return f"{head} ({', '.join(path_text(a) for a in call.args)})"
    return head


def format_clause(clause: Clause) -> str:
    text = pretty(clause.formula)
    return f"{clause.label}: {text}" if clause.label else text


def format_declarations(decls) -> str:
    return "; ".join(f"{name}: {type_}" for name, type_ in decls)


def _body_lines(body: Body, depth: int) -> list[str]:
    pad = INDENT * depth
    lines = []
    for stmt in body:
        if isinstance(stmt, Call):
            lines.append(pad + format_call(stmt))
        elif isinstance(stmt, OpaqueStatement):
            lines.append(pad + stmt.text)
        elif isinstance(stmt, Conditional):
            lines.append(f"{pad}if {pretty(stmt.condition)} then")
            lines += _body_lines(stmt.then_branch, depth + 1)
            if stmt.else_branch is not None:
                lines.append(pad + "else")
                lines += _body_lines(stmt.else_branch, depth + 1)
            lines.append(pad + "end")
        elif isinstance(stmt, Loop):
            lines.append(pad + "from")
            lines += _body_lines(stmt.init, depth + 1)
            lines.append(f"{pad}until {pretty(stmt.until)}")
            lines.append(pad + "loop")
            lines += _body_lines(stmt.body, depth + 1)
            lines.append(pad + "end")
        else:
            raise TypeError(f"unknown statement {stmt!r}")
    return lines


def feature_lines(feature: FeatureDecl, depth: int = 1) -> list[str]:
    pad = INDENT * depth
    inner = INDENT * (depth + 1)
    deeper = INDENT * (depth + 2)
    if feature.is_attribute:
        return [f"{pad}{feature.name}: {feature.result_type}"]
    head = feature.name
    if feature.formals:
        head += f" ({format_declarations(feature.formals)})"
    if feature.result_type:
        head += f": {feature.result_type}"
    lines = [pad + head]
    if feature.notes:
        lines.append(inner + "note")
        lines += [f"{deeper}{key}: {value}" for key, value in feature.notes]
    if feature.require:
        lines.append(inner + "require")
        lines += [deeper + format_clause(c) for c in feature.require]
    if feature.locals:
        lines.append(inner + "local")
        lines += [f"{deeper}{name}: {type_}" for name, type_ in feature.locals]
    if feature.is_deferred:
        lines.append(inner + "deferred")
    else:
        lines.append(inner + "do")
        lines += _body_lines(feature.body or Body(), depth + 2)
    if feature.ensure:
        lines.append(inner + "ensure")
        lines += [deeper + format_clause(c) for c in feature.ensure]
    lines.append(inner + "end")
    return lines


def format_feature(feature: FeatureDecl, depth: int = 1) -> str:
    return "\n".join(feature_lines(feature, depth)) + "\n"


def format_class(cls: ClassDecl) -> str:
    lines = []
    if cls.notes:
        lines.append("note")
        lines += [f"{INDENT}{key}: {value}" for key, value in cls.notes]
    lines.append(f"class {cls.name}")
    if cls.parents:
        lines.append("inherit")
        lines.append(INDENT + " ".join(cls.parents))
    lines.append("feature")
    for feature in cls.features:
        lines += feature_lines(feature)
    if cls.invariant:
        lines.append("invariant")
        lines += [INDENT + format_clause(c) for c in cls.invariant]
    lines.append("end")
    return "\n".join(lines) + "\n"
