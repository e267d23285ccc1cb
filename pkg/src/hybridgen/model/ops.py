"""Queries and edits over a model: annotation, related classes, PlantUML."""

from __future__ import annotations

import dataclasses
import logging
import re
from typing import List

from .types import (
    ClassDef,
    InvalidModel,
    MethodSpec,
    ModelPackage,
    TypeRef,
    UnknownClass,
    UnknownOperation,
)
from .validate import superclass_chain, validate_model

log = logging.getLogger(__name__)

_OP_ID = re.compile(r"^\s*(\w+)\.(\w+)\s*(?:\(\s*(\d+)\s*\))?\s*$")


def find_operation(m: ModelPackage, op_id: str):
    """Resolve ``Class.op`` or ``Class.op(arity)`` to ``(class, op)``."""
    match = _OP_ID.match(op_id)
    if not match:
        raise UnknownOperation(op_id)
    cname, oname, arity = match.group(1), match.group(2), match.group(3)
    cls = m.class_named(cname)
    if cls is None:
        raise UnknownOperation(op_id)
    hits = [o for o in cls.operations if o.name == oname and (arity is None or o.arity == int(arity))]
    if len(hits) != 1:
        raise UnknownOperation(op_id)
    return cls, hits[0]


def attach_spec(m: ModelPackage, op_id: str, spec: MethodSpec) -> ModelPackage:
    """Return a copy of ``m`` with ``spec`` on the operation.

    Input entries naming no declared parameter are dropped with a warning.
    """
    cls, op = find_operation(m, op_id)
    if not spec.summary.strip():
        raise ValueError(f"{op_id}: a specification needs a summary")
    declared = {n for n, _ in op.params}
    extras = [n for n, _ in spec.inputs if n not in declared]
    if extras:
        log.warning("%s: dropping inputs for undeclared parameters %s", op_id, ", ".join(extras))
        spec = dataclasses.replace(spec, inputs=tuple(i for i in spec.inputs if i[0] in declared))
    new_ops = tuple(dataclasses.replace(o, spec=spec) if o is op else o for o in cls.operations)
    new_cls = dataclasses.replace(cls, operations=new_ops)
    return dataclasses.replace(m, classes=tuple(new_cls if c is cls else c for c in m.classes))


def _class_names_in(t: TypeRef):
    while t.kind == "List":
        t = t.elem
    if t.kind == "Class":
        yield t.name


def related_classes(m: ModelPackage, cls_name: str) -> List[ClassDef]:
    """Superclass chain, then reference targets, then classes used in operation signatures."""
    cls = m.class_named(cls_name)
    if cls is None:
        raise UnknownClass(cls_name)
    names: List[str] = [c.name for c in superclass_chain(m, cls)]
    names += [r.target for r in cls.references]
    for op in cls.operations:
        for _, t in op.params:
            names.extend(_class_names_in(t))
        names.extend(_class_names_in(op.return_type))
    out, seen = [], {cls_name}
    for n in names:
        c = m.class_named(n)
        if c is not None and n not in seen:
            seen.add(n)
            out.append(c)
    return out


def emit_plantuml(m: ModelPackage) -> str:
    violations = validate_model(m)
    if violations:
        raise InvalidModel(violations)
    lines = ["@startuml", f"package {m.name} {{"]
    for e in m.enums:
        lines.append(f"enum {e.name} {{")
        lines.extend(e.literals)
        lines.append("}")
    for c in m.classes:
        lines.append(("abstract class " if c.is_abstract else "class ") + c.name + " {")
        for a in c.attributes:
            t = f"{a.type}[*]" if a.is_many else str(a.type)
            lines.append(f"+{a.name} : {t}")
        for o in c.operations:
            params = ", ".join(f"{n} : {t}" for n, t in o.params)
            lines.append(f"+{o.name}({params}) : {o.return_type}")
        lines.append("}")
    for c in m.classes:
        if c.super_class:
            lines.append(f"{c.name} --|> {c.super_class}")
    for c in m.classes:
        for r in c.references:
            arrow = "*-->" if r.is_containment else "-->"
            mult = "0..*" if r.is_many else "0..1"
            lines.append(f'{c.name} {arrow} "{mult}" {r.target} : {r.name}')
    lines.append("}")
    lines.append("@enduml")
    return "\n".join(lines) + "\n"
