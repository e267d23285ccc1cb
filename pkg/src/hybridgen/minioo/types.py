"""Static types of MiniOO and the built-in library's signatures."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional


@dataclass(frozen=True)
class Ty:
    kind: str
    name: Optional[str] = None
    elem: Optional["Ty"] = None

    def __str__(self) -> str:
        if self.kind in ("Class", "Enum"):
            return self.name
        if self.kind == "List":
            return f"List<{self.elem}>"
        if self.kind == "EmptyList":
            return "List<?>"
        if self.kind == "EnumType":
            return f"enum {self.name}"
        if self.kind == "Module":
            return self.name
        return self.kind


INT = Ty("Int")
FLOAT = Ty("Float")
BOOL = Ty("Bool")
STRING = Ty("String")
DATE = Ty("Date")
VOID = Ty("Void")
NULL = Ty("Null")
EMPTY_LIST = Ty("EmptyList")
# stands in for an expression that already produced a diagnostic
ERROR = Ty("Error")

PRIMITIVE_TYPES = {"Int": INT, "Float": FLOAT, "Bool": BOOL, "String": STRING, "Date": DATE, "Void": VOID}
BUILTIN_MODULES = ("Math",)


def list_of(elem: Ty) -> Ty:
    return Ty("List", None, elem)


def is_numeric(t: Ty) -> bool:
    return t.kind in ("Int", "Float")


# (name, arity) -> (param types, return type)
BUILTIN_FUNCTIONS = {
    ("date", 3): ((INT, INT, INT), DATE),
    ("daysBetween", 2): ((DATE, DATE), INT),
    ("addDays", 2): ((DATE, INT), DATE),
    ("year", 1): ((DATE,), INT),
}

STRING_METHODS = {
    ("length", 0): ((), INT),
    ("concat", 1): ((STRING,), STRING),
    ("contains", 1): ((STRING,), BOOL),
}


def list_methods(elem: Ty):
    return {
        ("add", 1): ((elem,), VOID),
        ("get", 1): ((INT,), elem),
        ("size", 0): ((), INT),
        ("remove", 1): ((INT,), elem),
    }


MATH_FUNCTIONS = ("min", "max", "abs")
