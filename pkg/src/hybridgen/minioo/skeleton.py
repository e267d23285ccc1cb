"""Template generation of MiniOO source from an annotated class model."""

from __future__ import annotations

import re
import textwrap
from typing import List

from ..model import ClassDef, MethodSpec, ModelPackage, OperationDef, TypeRef, factory_name, superclass_chain
from .syntax import (
    Assign,
    ClassDecl,
    EnumDecl,
    FieldAccess,
    FieldDecl,
    Lit,
    ListLit,
    MethodDecl,
    Name,
    New,
    Return,
    This,
    TypeNode,
    Unary,
    trap_body,
)

_WRAP = 76


def type_node(t: TypeRef) -> TypeNode:
    if t.kind == "List":
        return TypeNode("List", type_node(t.elem))
    if t.kind in ("Class", "Enum"):
        return TypeNode(t.name)
    return TypeNode(t.kind)


def feature_type(t: TypeNode, many: bool) -> TypeNode:
    return TypeNode("List", t) if many else t


def _words(name: str) -> str:
    """``hireDate`` -> ``Hire Date``."""
    parts = re.findall(r"[A-Z]?[a-z0-9]+|[A-Z]+(?![a-z])", name)
    return " ".join(p[:1].upper() + p[1:] for p in parts) or name


def _cap(name: str) -> str:
    return name[:1].upper() + name[1:]


def _doc(lines: List[str], indent: str) -> str:
    """Docstring body (the text between ``/**`` and ``*/``)."""
    out = []
    for line in lines:
        line = line.replace("*/", "* /")
        out.append(f"{indent} * {line}".rstrip())
    return "\n" + "\n".join(out) + f"\n{indent} "


def _wrap(text: str, prefix: str = "") -> List[str]:
    lines: List[str] = []
    for para in text.split("\n"):
        wrapped = textwrap.wrap(para, _WRAP - len(prefix)) or [""]
        lines.extend(prefix + w for w in wrapped)
    return lines


def render_spec(spec: MethodSpec) -> List[str]:
    """Labeled docstring sections for an operation annotation."""
    lines = ["<!-- begin-user-doc -->", "<!-- end-user-doc -->", "<!-- begin-model-doc -->"]
    lines += _labeled("Summary", spec.summary)
    if spec.algorithm:
        lines += _labeled("Algorithm", spec.algorithm)
    if spec.inputs:
        lines.append("Input:")
        for pname, desc in spec.inputs:
            lines += _wrap(f"{pname}: {desc}", "  - ")
    if spec.outputs:
        lines += _labeled("Output", spec.outputs)
    for label, items in (("Preconditions", spec.preconditions), ("Postconditions", spec.postconditions)):
        if items:
            lines.append(f"{label}:")
            for item in items:
                lines += _wrap(item, "  - ")
    lines.append("<!-- end-model-doc -->")
    return lines


def _labeled(label: str, text: str) -> List[str]:
    if "\n" not in text and len(label) + len(text) + 2 <= _WRAP:
        return [f"{label}: {text}"]
    return [f"{label}:"] + _wrap(text, "  ")


def _getter_doc(feature: str, kind: str, owner: str) -> List[str]:
    words = _words(feature)
    return [
        f"Returns the value of the '<em>{words}</em>' {kind}.",
        "<!-- begin-user-doc -->",
        "<p>",
        f"If the meaning of the '<em>{words}</em>' {kind} isn't clear,",
        "there really should be more of a description here...",
        "</p>",
        "<!-- end-user-doc -->",
        f"@return the value of the '<em>{words}</em>' {kind}.",
        f"@see {owner}#{feature}",
        "@generated",
    ]


def _setter_doc(feature: str, kind: str, owner: str, getter: str) -> List[str]:
    words = _words(feature)
    return [
        f"Sets the value of the '{{@link {owner}#{getter} <em>{words}</em>}}' {kind}.",
        "<!-- begin-user-doc -->",
        "<!-- end-user-doc -->",
        f"@param value the new value of the '<em>{words}</em>' {kind}.",
        f"@see #{getter}()",
        "@generated",
    ]


def _default_init(t: TypeRef, default, many: bool):
    if many:
        return ListLit([])
    if default is None:
        return None
    if t.kind == "Enum":
        return FieldAccess(Name(t.name), default)
    if t.kind == "Bool":
        return Lit(bool(default), "bool")
    if t.kind == "String":
        return Lit(default, "string")
    lit = Lit(abs(float(default)), "float") if t.kind == "Float" else Lit(abs(int(default)), "int")
    return Unary("-", lit) if default < 0 else lit


def accessor_methods(cls: ClassDef, with_docs: bool = True) -> List[MethodDecl]:
    methods = []
    features = [(a.name, type_node(a.type), a.is_many, a.type.kind, "attribute") for a in cls.attributes]
    features += [(r.name, TypeNode(r.target), r.is_many, "Class", "reference") for r in cls.references]
    for name, t, many, kind, label in features:
        ftype = feature_type(t, many)
        getter = ("is" if kind == "Bool" and not many else "get") + _cap(name)
        methods.append(
            MethodDecl(
                getter,
                [],
                ftype,
                [Return(FieldAccess(This(), name))],
                _doc(_getter_doc(name, label, cls.name), "  ") if with_docs else None,
            )
        )
        if not many:
            methods.append(
                MethodDecl(
                    "set" + _cap(name),
                    [("value", ftype)],
                    TypeNode("Void"),
                    [Assign(FieldAccess(This(), name), Name("value"))],
                    _doc(_setter_doc(name, label, cls.name, getter), "  ") if with_docs else None,
                )
            )
    return methods


def operation_method(op: OperationDef, with_docs: bool = True) -> MethodDecl:
    doc = None
    if with_docs:
        doc = _doc(render_spec(op.spec) + ["@generated"], "  ")
    return MethodDecl(
        op.name,
        [(n, type_node(t)) for n, t in op.params],
        type_node(op.return_type),
        trap_body(),
        doc,
    )


def class_decl(m: ModelPackage, cls: ClassDef, with_docs: bool = True) -> ClassDecl:
    fields = [
        FieldDecl(a.name, feature_type(type_node(a.type), a.is_many), _default_init(a.type, a.default, a.is_many))
        for a in cls.attributes
    ]
    fields += [
        FieldDecl(r.name, feature_type(TypeNode(r.target), r.is_many), ListLit([]) if r.is_many else None)
        for r in cls.references
    ]
    methods = accessor_methods(cls, with_docs) + [operation_method(op, with_docs) for op in cls.operations]
    doc = None
    if with_docs:
        lines = [
            f"An implementation of the model object '<em><b>{cls.name}</b></em>'.",
            "<!-- begin-user-doc -->",
            "<!-- end-user-doc -->",
        ]
        if cls.attributes or cls.references:
            lines += ["<p>", "The following features are implemented:", "</p>", "<ul>"]
            getters = [m.name for m in methods if m.name[:3] == "get" or m.name[:2] == "is"]
            lines += [f"  <li>{{@link {cls.name}#{g} <em>{_words(f)}</em>}}</li>" for f, g in zip(cls.feature_names(), getters)]
            lines += ["</ul>"]
        lines.append("@generated")
        doc = _doc(lines, "")
    return ClassDecl(cls.name, cls.super_class, cls.is_abstract, fields, methods, doc)


def factory_decl(m: ModelPackage) -> ClassDecl:
    name = factory_name(m.name)
    methods = []
    for c in m.classes:
        if c.is_abstract:
            continue
        methods.append(
            MethodDecl(
                "create" + c.name,
                [],
                TypeNode(c.name),
                [Return(New(c.name))],
                _doc([f"Returns a new object of class '<em>{c.name}</em>'.", "@generated"], "  "),
            )
        )
    doc = _doc([f"The <b>Factory</b> for the model package '{m.name}'.", "@generated"], "")
    return ClassDecl(name, None, False, [], methods, doc)


def enum_decl(name: str, literals) -> EnumDecl:
    return EnumDecl(name, list(literals), _doc([f"A representation of the literals of the enumeration '<em><b>{name}</b></em>'.", "@generated"], ""))


def visible_signatures(m: ModelPackage, cls: ClassDef) -> List[MethodDecl]:
    """Accessors and operations callable on ``cls``, own ones first, then inherited."""
    out: List[MethodDecl] = []
    seen = set()
    for c in [cls] + superclass_chain(m, cls):
        for meth in accessor_methods(c, with_docs=False) + [operation_method(o, with_docs=False) for o in c.operations]:
            if meth.key not in seen:
                seen.add(meth.key)
                out.append(meth)
    return out


def unit_path(name: str, suffix: str = ".mo") -> str:
    return f"src/{name}{suffix}"
