"""Structural validation of class models."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional

from .types import PRIMITIVES, ClassDef, ModelPackage, TypeRef

# Words that cannot name model elements because generated code would not
# compile: MiniOO keywords and built-in type/module names.
RESERVED = frozenset(
    """
    class abstract extends enum var def return if else while for in raise
    assert new this null true false import
    Int Float Bool String Date Void List Math
    """.split()
)


@dataclass(frozen=True)
class Violation:
    kind: str
    location: str
    message: str

    def __str__(self) -> str:
        return f"{self.kind} at {self.location}: {self.message}"


def factory_name(pkg_name: str) -> str:
    return pkg_name[:1].upper() + pkg_name[1:] + "Factory"


def accessor_names(name: str, type_kind: Optional[str], is_many: bool):
    """Generated accessor ``(name, arity)`` pairs for a feature."""
    cap = name[:1].upper() + name[1:]
    getter = ("is" if type_kind == "Bool" and not is_many else "get") + cap
    out = [(getter, 0)]
    if not is_many:
        out.append(("set" + cap, 1))
    return out


def superclass_chain(m: ModelPackage, cls: ClassDef) -> List[ClassDef]:
    """Ancestors nearest-first; stops at a repeated class or a dangling name."""
    chain, seen = [], {cls.name}
    cur = cls
    while cur.super_class is not None:
        sup = m.class_named(cur.super_class)
        if sup is None or sup.name in seen:
            break
        chain.append(sup)
        seen.add(sup.name)
        cur = sup
    return chain


def _cyclic_classes(m: ModelPackage) -> Dict[str, List[str]]:
    """Map each class on an inheritance cycle to its cycle (canonical order)."""
    out: Dict[str, List[str]] = {}
    for c in m.classes:
        path, cur = [], c
        while cur is not None and cur.name not in path:
            path.append(cur.name)
            cur = m.class_named(cur.super_class) if cur.super_class else None
        if cur is not None and cur.name == c.name:
            out[c.name] = path
    return out


def _type_problems(m: ModelPackage, t: TypeRef, where: str, allow_void: bool) -> List[Violation]:
    v = []
    if t.kind == "Void":
        if not allow_void:
            v.append(Violation("VoidMisuse", where, "Void is only valid as a return type"))
    elif t.kind == "List":
        if t.depth() > 2:
            v.append(Violation("ListNesting", where, f"{t} nests lists deeper than 2"))
        inner = t
        while inner.kind == "List":
            inner = inner.elem
        v.extend(_type_problems(m, inner, where, allow_void=False))
    elif t.kind == "Class":
        if m.class_named(t.name) is None:
            v.append(Violation("UnresolvedType", where, f"unknown class {t.name}"))
    elif t.kind == "Enum":
        if m.enum_named(t.name) is None:
            v.append(Violation("UnresolvedType", where, f"unknown enum {t.name}"))
    elif t.kind not in PRIMITIVES:
        v.append(Violation("UnresolvedType", where, f"unknown type {t.kind}"))
    return v


def _default_ok(m: ModelPackage, t: TypeRef, value) -> bool:
    if t.kind == "Bool":
        return isinstance(value, bool)
    if t.kind in ("Int", "Date"):
        return isinstance(value, int) and not isinstance(value, bool) and -(2**63) <= value < 2**63
    if t.kind == "Float":
        return isinstance(value, (int, float)) and not isinstance(value, bool)
    if t.kind == "String":
        return isinstance(value, str)
    if t.kind == "Enum":
        e = m.enum_named(t.name)
        return isinstance(value, str) and e is not None and value in e.literals
    return False


def validate_model(m: ModelPackage) -> List[Violation]:
    """Return every invariant violation in ``m``; empty means valid."""
    v: List[Violation] = []

    names: Dict[str, int] = {}
    for decl in list(m.classes) + list(m.enums):
        names[decl.name] = names.get(decl.name, 0) + 1
        if decl.name in RESERVED:
            v.append(Violation("ReservedName", decl.name, f"{decl.name!r} is reserved"))
    for name, count in names.items():
        if count > 1:
            v.append(Violation("DuplicateName", name, f"{name} declared {count} times"))
    if factory_name(m.name) in names:
        v.append(Violation("DuplicateName", factory_name(m.name), "clashes with the generated factory class"))

    for e in m.enums:
        if len(set(e.literals)) != len(e.literals):
            v.append(Violation("DuplicateName", e.name, "duplicate enum literal"))

    cycles = _cyclic_classes(m)
    reported = set()
    for cname, cycle in cycles.items():
        key = frozenset(cycle)
        if key in reported:
            continue
        reported.add(key)
        v.append(Violation("CyclicInheritance", cname, " -> ".join(cycle + [cycle[0]])))

    for c in m.classes:
        v.extend(_class_violations(m, c, cname_cyclic=c.name in cycles))
    return v


def _class_violations(m: ModelPackage, c: ClassDef, cname_cyclic: bool) -> List[Violation]:
    v: List[Violation] = []
    if c.super_class is not None and m.class_named(c.super_class) is None:
        v.append(Violation("UnresolvedType", c.name, f"unknown superclass {c.super_class}"))

    chain = [] if cname_cyclic else superclass_chain(m, c)
    inherited = set()
    for anc in chain:
        inherited.update(anc.feature_names())
    own = set()
    for fname in c.feature_names():
        loc = f"{c.name}.{fname}"
        if fname in RESERVED:
            v.append(Violation("ReservedName", loc, f"{fname!r} is reserved"))
        if fname in own or fname in inherited:
            v.append(Violation("DuplicateFeature", loc, f"feature {fname} already declared"))
        own.add(fname)

    for a in c.attributes:
        loc = f"{c.name}.{a.name}"
        if a.type.kind not in PRIMITIVES and a.type.kind != "Enum":
            v.append(Violation("AttributeType", loc, f"attribute type {a.type} must be primitive or enum"))
        else:
            v.extend(_type_problems(m, a.type, loc, allow_void=False))
        if a.default is not None:
            if a.is_many:
                v.append(Violation("ManyWithDefault", loc, "multi-valued attribute cannot carry a default"))
            elif not _default_ok(m, a.type, a.default):
                v.append(Violation("InvalidDefault", loc, f"default {a.default!r} is not a {a.type}"))

    for r in c.references:
        loc = f"{c.name}.{r.name}"
        target = m.class_named(r.target)
        if target is None:
            v.append(Violation("UnresolvedType", loc, f"unknown reference target {r.target}"))
            continue
        if r.opposite is None:
            continue
        back = _find_reference(m, target, r.opposite)
        if back is None or back.opposite != r.name or back.target != c.name:
            v.append(Violation("OppositeAsymmetry", loc, f"{r.target}.{r.opposite} does not point back to {r.name}"))
        elif r.is_containment and back.is_containment:
            v.append(Violation("ContainmentOpposite", loc, "both ends of an opposite pair are containments"))

    accessors = {}
    for cls in [c] + chain:
        for a in cls.attributes:
            for key in accessor_names(a.name, a.type.kind, a.is_many):
                accessors[key] = f"{cls.name}.{a.name}"
        for r in cls.references:
            for key in accessor_names(r.name, None, r.is_many):
                accessors[key] = f"{cls.name}.{r.name}"
    inherited_ops = {}
    for anc in reversed(chain):
        for o in anc.operations:
            inherited_ops[(o.name, o.arity)] = o

    seen_ops = set()
    for o in c.operations:
        loc = f"{c.name}.{o.name}"
        key = (o.name, o.arity)
        if o.name in RESERVED:
            v.append(Violation("ReservedName", loc, f"{o.name!r} is reserved"))
        if key in seen_ops:
            v.append(Violation("DuplicateOperation", loc, f"{o.name}/{o.arity} declared twice"))
        seen_ops.add(key)
        if key in accessors:
            v.append(Violation("AccessorClash", loc, f"clashes with generated accessor of {accessors[key]}"))
        pnames = [p for p, _ in o.params]
        if len(set(pnames)) != len(pnames):
            v.append(Violation("DuplicateParameter", loc, "parameter names repeat"))
        for p, t in o.params:
            if p in RESERVED:
                v.append(Violation("ReservedName", f"{loc}.{p}", f"{p!r} is reserved"))
            v.extend(_type_problems(m, t, f"{loc}.{p}", allow_void=False))
        v.extend(_type_problems(m, o.return_type, loc, allow_void=True))
        base = inherited_ops.get(key)
        if base is not None and (
            [t for _, t in base.params] != [t for _, t in o.params] or base.return_type != o.return_type
        ):
            v.append(Violation("OverrideMismatch", loc, "redefines an inherited operation with a different signature"))
    return v


def _find_reference(m: ModelPackage, cls: ClassDef, name: str):
    for c in [cls] + superclass_chain(m, cls):
        for r in c.references:
            if r.name == name:
                return r
    return None
