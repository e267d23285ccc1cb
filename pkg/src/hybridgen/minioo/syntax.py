"""MiniOO syntax tree.

Source positions (``line``, offsets) are excluded from equality so that two
trees compare equal when they differ only in layout.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Tuple, Union


def _pos(default=0):
    return field(default=default, compare=False, repr=False)


@dataclass
class TypeNode:
    name: str
    arg: Optional["TypeNode"] = None
    line: int = _pos(1)

    def __str__(self) -> str:
        return f"{self.name}<{self.arg}>" if self.arg is not None else self.name


# expressions


@dataclass
class Lit:
    value: object
    kind: str  # int | float | string | bool | null
    line: int = _pos(1)


@dataclass
class Name:
    id: str
    line: int = _pos(1)


@dataclass
class This:
    line: int = _pos(1)


@dataclass
class FieldAccess:
    obj: "Expr"
    name: str
    line: int = _pos(1)


@dataclass
class Call:
    obj: Optional["Expr"]
    name: str
    args: List["Expr"]
    line: int = _pos(1)


@dataclass
class New:
    cls: str
    line: int = _pos(1)


@dataclass
class ListLit:
    items: List["Expr"]
    line: int = _pos(1)


@dataclass
class Unary:
    op: str
    operand: "Expr"
    line: int = _pos(1)


@dataclass
class Binary:
    op: str
    left: "Expr"
    right: "Expr"
    line: int = _pos(1)


Expr = Union[Lit, Name, This, FieldAccess, Call, New, ListLit, Unary, Binary]


# statements


@dataclass
class VarDecl:
    name: str
    type: TypeNode
    init: Optional[Expr]
    line: int = _pos(1)


@dataclass
class Assign:
    target: Expr
    value: Expr
    line: int = _pos(1)


@dataclass
class If:
    cond: Expr
    then: List["Stmt"]
    orelse: Optional[List["Stmt"]] = None
    line: int = _pos(1)


@dataclass
class While:
    cond: Expr
    body: List["Stmt"]
    line: int = _pos(1)


@dataclass
class ForEach:
    var: str
    iterable: Expr
    body: List["Stmt"]
    line: int = _pos(1)


@dataclass
class Return:
    value: Optional[Expr]
    line: int = _pos(1)


@dataclass
class Raise:
    label: str
    message: Expr
    line: int = _pos(1)


@dataclass
class ExprStmt:
    expr: Expr
    line: int = _pos(1)


@dataclass
class Assert:
    cond: Expr
    message: Optional[Expr] = None
    line: int = _pos(1)


Stmt = Union[VarDecl, Assign, If, While, ForEach, Return, Raise, ExprStmt, Assert]


# declarations


@dataclass
class Span:
    start: int = 0
    end: int = 0


@dataclass
class FieldDecl:
    name: str
    type: TypeNode
    init: Optional[Expr] = None
    docstring: Optional[str] = None
    line: int = _pos(1)


@dataclass
class MethodDecl:
    name: str
    params: List[Tuple[str, TypeNode]]
    ret: TypeNode
    body: List[Stmt]
    docstring: Optional[str] = None
    line: int = _pos(1)
    end_line: int = _pos(1)
    # whole method incl. docstring, and the body braces (offsets of "{" and "}")
    span: Span = _pos(None)
    body_span: Span = _pos(None)

    @property
    def arity(self) -> int:
        return len(self.params)

    @property
    def key(self) -> Tuple[str, int]:
        return (self.name, len(self.params))


@dataclass
class ClassDecl:
    name: str
    super_name: Optional[str] = None
    is_abstract: bool = False
    fields: List[FieldDecl] = field(default_factory=list)
    methods: List[MethodDecl] = field(default_factory=list)
    docstring: Optional[str] = None
    line: int = _pos(1)
    end_line: int = _pos(1)
    span: Span = _pos(None)
    # offset of the closing brace
    close: int = _pos(0)

    def method(self, name: str, arity: int) -> Optional[MethodDecl]:
        for m in self.methods:
            if m.name == name and m.arity == arity:
                return m
        return None


@dataclass
class EnumDecl:
    name: str
    literals: List[str]
    docstring: Optional[str] = None
    line: int = _pos(1)
    span: Span = _pos(None)


@dataclass
class Import:
    name: str
    line: int = _pos(1)
    span: Span = _pos(None)


@dataclass
class Program:
    imports: List[Import] = field(default_factory=list)
    decls: List[Union[ClassDecl, EnumDecl]] = field(default_factory=list)
    stmts: List[Stmt] = field(default_factory=list)

    @property
    def classes(self) -> List[ClassDecl]:
        return [d for d in self.decls if isinstance(d, ClassDecl)]

    @property
    def enums(self) -> List[EnumDecl]:
        return [d for d in self.decls if isinstance(d, EnumDecl)]

    def class_named(self, name: str) -> Optional[ClassDecl]:
        for c in self.classes:
            if c.name == name:
                return c
        return None


TRAP_LABEL = "Unsupported"
TRAP_MESSAGE = "not implemented"


def trap_body() -> List[Stmt]:
    """The unsupported-operation placeholder body."""
    return [Raise(TRAP_LABEL, Lit(TRAP_MESSAGE, "string"))]


def is_trap(body: List[Stmt]) -> bool:
    return (
        len(body) == 1
        and isinstance(body[0], Raise)
        and body[0].label == TRAP_LABEL
    )
