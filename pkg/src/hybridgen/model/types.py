"""Immutable value types for the class model."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple, Union

PRIMITIVES = ("Int", "Float", "Bool", "String", "Date")


class ModelError(Exception):
    """Base class for model-level failures."""


class ModelSyntaxError(ModelError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line
        self.message = message


class UnresolvedType(ModelError):
    def __init__(self, name: str):
        super().__init__(f"unresolved type: {name}")
        self.name = name


class DuplicateName(ModelError):
    def __init__(self, name: str):
        super().__init__(f"duplicate name: {name}")
        self.name = name


class UnknownOperation(ModelError):
    def __init__(self, op_id: str):
        super().__init__(f"unknown operation: {op_id}")
        self.op_id = op_id


class UnknownClass(ModelError):
    def __init__(self, name: str):
        super().__init__(f"unknown class: {name}")
        self.name = name


class InvalidModel(ModelError):
    def __init__(self, violations):
        lines = "; ".join(str(v) for v in violations)
        super().__init__(f"invalid model: {lines}")
        self.violations = list(violations)


@dataclass(frozen=True)
class TypeRef:
    """A model type.

    ``kind`` is one of the primitive names, ``"Void"``, ``"Class"``,
    ``"Enum"`` or ``"List"``. ``name`` is set for class/enum references and
    ``elem`` for lists.
    """

    kind: str
    name: Optional[str] = None
    elem: Optional["TypeRef"] = None

    @classmethod
    def prim(cls, name: str) -> "TypeRef":
        return cls(name)

    @classmethod
    def cls_(cls, name: str) -> "TypeRef":
        return cls("Class", name)

    @classmethod
    def enum(cls, name: str) -> "TypeRef":
        return cls("Enum", name)

    @classmethod
    def list_of(cls, elem: "TypeRef") -> "TypeRef":
        return cls("List", None, elem)

    @property
    def is_primitive(self) -> bool:
        return self.kind in PRIMITIVES

    @property
    def is_void(self) -> bool:
        return self.kind == "Void"

    def depth(self) -> int:
        return 1 + self.elem.depth() if self.kind == "List" else 0

    def __str__(self) -> str:
        if self.kind in ("Class", "Enum"):
            return self.name
        if self.kind == "List":
            return f"List<{self.elem}>"
        return self.kind


VOID = TypeRef("Void")

Literal = Union[int, float, bool, str]


@dataclass(frozen=True)
class MethodSpec:
    summary: str
    algorithm: str = ""
    inputs: Tuple[Tuple[str, str], ...] = ()
    outputs: str = ""
    preconditions: Tuple[str, ...] = ()
    postconditions: Tuple[str, ...] = ()

    @classmethod
    def fallback(cls, requirement: str) -> "MethodSpec":
        return cls(summary=requirement)


@dataclass(frozen=True)
class AttributeDef:
    name: str
    type: TypeRef
    is_many: bool = False
    default: Optional[Literal] = None


@dataclass(frozen=True)
class ReferenceDef:
    name: str
    target: str
    is_many: bool = False
    is_containment: bool = False
    opposite: Optional[str] = None


@dataclass(frozen=True)
class OperationDef:
    name: str
    params: Tuple[Tuple[str, TypeRef], ...] = ()
    return_type: TypeRef = VOID
    spec: Optional[MethodSpec] = None

    @property
    def arity(self) -> int:
        return len(self.params)


@dataclass(frozen=True)
class ClassDef:
    name: str
    is_abstract: bool = False
    super_class: Optional[str] = None
    attributes: Tuple[AttributeDef, ...] = ()
    references: Tuple[ReferenceDef, ...] = ()
    operations: Tuple[OperationDef, ...] = ()

    def feature_names(self):
        return [a.name for a in self.attributes] + [r.name for r in self.references]


@dataclass(frozen=True)
class EnumDef:
    name: str
    literals: Tuple[str, ...] = ()


@dataclass(frozen=True)
class ModelPackage:
    name: str
    classes: Tuple[ClassDef, ...] = ()
    enums: Tuple[EnumDef, ...] = ()

    def class_named(self, name: str) -> Optional[ClassDef]:
        for c in self.classes:
            if c.name == name:
                return c
        return None

    def enum_named(self, name: str) -> Optional[EnumDef]:
        for e in self.enums:
            if e.name == name:
                return e
        return None

    def operations(self):
        """Yield ``(class, operation)`` pairs in declaration order."""
        for c in self.classes:
            for op in c.operations:
                yield c, op


def qualified_name(cls: ClassDef, op: OperationDef) -> str:
    """Canonical operation id, e.g. ``Employee.computeBonus(1)``."""
    return f"{cls.name}.{op.name}({op.arity})"
