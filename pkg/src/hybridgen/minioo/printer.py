"""Canonical MiniOO formatting: two-space indent, one statement per line."""

from __future__ import annotations

from typing import List, Optional

from .syntax import (
    Assert,
    Assign,
    Binary,
    Call,
    ClassDecl,
    EnumDecl,
    ExprStmt,
    FieldAccess,
    FieldDecl,
    ForEach,
    If,
    ListLit,
    Lit,
    MethodDecl,
    Name,
    New,
    Program,
    Raise,
    Return,
    This,
    Unary,
    VarDecl,
    While,
)

INDENT = "  "

_PREC = {
    "||": 1,
    "&&": 2,
    "==": 3,
    "!=": 3,
    "<": 4,
    "<=": 4,
    ">": 4,
    ">=": 4,
    "+": 5,
    "-": 5,
    "*": 6,
    "/": 6,
    "%": 6,
}
_UNARY_PREC = 7
_POSTFIX_PREC = 8


def quote(text: str) -> str:
    text = text.replace("\\", "\\\\").replace('"', '\\"')
    return '"' + text.replace("\n", "\\n").replace("\t", "\\t") + '"'


def format_float(value: float) -> str:
    text = repr(float(value))
    if not any(ch in text for ch in ".e") or text.startswith("-"):
        raise ValueError(f"float {value!r} has no MiniOO literal form")
    return text


def format_expr(e, parent: int = 0, right: bool = False) -> str:
    if isinstance(e, Lit):
        if e.kind == "int":
            return str(e.value)
        if e.kind == "float":
            return format_float(e.value)
        if e.kind == "string":
            return quote(e.value)
        if e.kind == "bool":
            return "true" if e.value else "false"
        return "null"
    if isinstance(e, Name):
        return e.id
    if isinstance(e, This):
        return "this"
    if isinstance(e, New):
        return f"new {e.cls}()"
    if isinstance(e, ListLit):
        return "[" + ", ".join(format_expr(x) for x in e.items) + "]"
    if isinstance(e, FieldAccess):
        return f"{format_expr(e.obj, _POSTFIX_PREC)}.{e.name}"
    if isinstance(e, Call):
        args = ", ".join(format_expr(a) for a in e.args)
        if e.obj is None:
            return f"{e.name}({args})"
        return f"{format_expr(e.obj, _POSTFIX_PREC)}.{e.name}({args})"
    if isinstance(e, Unary):
        text = e.op + format_expr(e.operand, _UNARY_PREC)
        return f"({text})" if _UNARY_PREC < parent else text
    if isinstance(e, Binary):
        p = _PREC[e.op]
        text = f"{format_expr(e.left, p)} {e.op} {format_expr(e.right, p, right=True)}"
        if p < parent or (p == parent and right):
            return f"({text})"
        return text
    raise TypeError(f"not an expression: {e!r}")


def format_doc(doc: Optional[str], indent: str) -> List[str]:
    if doc is None:
        return []
    return [f"{indent}/**{doc}*/"]


def format_block(stmts, indent: str) -> List[str]:
    out: List[str] = []
    for s in stmts:
        out.extend(format_stmt(s, indent))
    return out


def format_stmt(s, indent: str) -> List[str]:
    inner = indent + INDENT
    if isinstance(s, VarDecl):
        init = f" = {format_expr(s.init)}" if s.init is not None else ""
        return [f"{indent}var {s.name}: {s.type}{init};"]
    if isinstance(s, Assign):
        return [f"{indent}{format_expr(s.target)} = {format_expr(s.value)};"]
    if isinstance(s, ExprStmt):
        return [f"{indent}{format_expr(s.expr)};"]
    if isinstance(s, Return):
        return [f"{indent}return;" if s.value is None else f"{indent}return {format_expr(s.value)};"]
    if isinstance(s, Raise):
        return [f"{indent}raise {s.label}({format_expr(s.message)});"]
    if isinstance(s, Assert):
        msg = f", {format_expr(s.message)}" if s.message is not None else ""
        return [f"{indent}assert {format_expr(s.cond)}{msg};"]
    if isinstance(s, While):
        return [f"{indent}while ({format_expr(s.cond)}) {{", *format_block(s.body, inner), f"{indent}}}"]
    if isinstance(s, ForEach):
        head = f"{indent}for ({s.var} in {format_expr(s.iterable)}) {{"
        return [head, *format_block(s.body, inner), f"{indent}}}"]
    if isinstance(s, If):
        return _format_if(s, indent, f"{indent}if")
    raise TypeError(f"not a statement: {s!r}")


def _format_if(s: If, indent: str, lead: str) -> List[str]:
    inner = indent + INDENT
    lines = [f"{lead} ({format_expr(s.cond)}) {{", *format_block(s.then, inner)]
    if s.orelse is None:
        lines.append(f"{indent}}}")
    elif len(s.orelse) == 1 and isinstance(s.orelse[0], If):
        lines.extend(_format_if(s.orelse[0], indent, f"{indent}}} else if"))
    else:
        lines.append(f"{indent}}} else {{")
        lines.extend(format_block(s.orelse, inner))
        lines.append(f"{indent}}}")
    return lines


def format_signature(m: MethodDecl) -> str:
    params = ", ".join(f"{n}: {t}" for n, t in m.params)
    return f"def {m.name}({params}): {m.ret}"


def format_method(m: MethodDecl, indent: str = INDENT) -> List[str]:
    return [
        *format_doc(m.docstring, indent),
        f"{indent}{format_signature(m)} {{",
        *format_block(m.body, indent + INDENT),
        f"{indent}}}",
    ]


def format_field(f: FieldDecl, indent: str = INDENT) -> List[str]:
    init = f" = {format_expr(f.init)}" if f.init is not None else ""
    return [*format_doc(f.docstring, indent), f"{indent}var {f.name}: {f.type}{init};"]


def format_class(c: ClassDecl) -> List[str]:
    head = ("abstract " if c.is_abstract else "") + f"class {c.name}"
    if c.super_name:
        head += f" extends {c.super_name}"
    lines = [*format_doc(c.docstring, ""), head + " {"]
    for f in c.fields:
        lines.extend(format_field(f))
    for i, m in enumerate(c.methods):
        if i > 0 or c.fields:
            lines.append("")
        lines.extend(format_method(m))
    lines.append("}")
    return lines


def format_enum(e: EnumDecl) -> List[str]:
    body = f" {', '.join(e.literals)} " if e.literals else " "
    return [*format_doc(e.docstring, ""), f"enum {e.name} {{{body}}}"]


def print_program(p: Program) -> str:
    """Render ``p``; ``parse_program(print_program(p)) == p``."""
    chunks: List[List[str]] = []
    if p.imports:
        chunks.append([f"import {i.name};" for i in p.imports])
    for d in p.decls:
        chunks.append(format_class(d) if isinstance(d, ClassDecl) else format_enum(d))
    if p.stmts:
        chunks.append(format_block(p.stmts, ""))
    if not chunks:
        return ""
    return "\n\n".join("\n".join(c) for c in chunks) + "\n"
