"""Tree-walking interpreter for checked MiniOO programs."""

from __future__ import annotations

import datetime
import math
import sys
from typing import Dict, List, Optional, Sequence

from ..backend.contract import TestOutcome
from .checker import ClassTable, ParsedUnit
from .parser import INT_MAX, INT_MIN
from .syntax import (
    TRAP_LABEL,
    Assert,
    Assign,
    Binary,
    Call,
    ExprStmt,
    FieldAccess,
    ForEach,
    If,
    ListLit,
    Lit,
    Name,
    New,
    Raise,
    Return,
    This,
    TypeNode,
    Unary,
    VarDecl,
    While,
)

DEFAULT_STEP_BUDGET = 1_000_000
MAX_CALL_DEPTH = 200
_EPOCH = datetime.date(1970, 1, 1)


class MiniRaise(Exception):
    """An uncaught ``raise`` or runtime fault inside MiniOO code."""

    def __init__(self, label: str, message: str, line: int):
        super().__init__(f"{label}: {message}")
        self.label = label
        self.message = message
        self.line = line

    def describe(self) -> str:
        if self.label == TRAP_LABEL:
            return f"unsupported operation: {self.message} (line {self.line})"
        return f"uncaught {self.label}: {self.message} (line {self.line})"


class AssertionFailed(Exception):
    def __init__(self, line: int, message: str):
        super().__init__(message)
        self.line = line
        self.message = message


class BudgetExceeded(Exception):
    pass


class Obj:
    __slots__ = ("cls", "fields")

    def __init__(self, cls: str, fields: Dict[str, object]):
        self.cls = cls
        self.fields = fields

    def __repr__(self):
        return f"<{self.cls}>"


class EnumVal:
    __slots__ = ("enum", "name")

    def __init__(self, enum: str, name: str):
        self.enum = enum
        self.name = name

    def __eq__(self, other):
        return isinstance(other, EnumVal) and (self.enum, self.name) == (other.enum, other.name)

    def __hash__(self):
        return hash((self.enum, self.name))


class _Return:
    __slots__ = ("value",)

    def __init__(self, value):
        self.value = value


class _Frame:
    __slots__ = ("this", "cls", "scopes")

    def __init__(self, this: Optional[Obj], cls: Optional[str]):
        self.this = this
        self.cls = cls
        self.scopes: List[Dict[str, object]] = [{}]

    def find(self, name: str) -> Optional[Dict[str, object]]:
        for scope in reversed(self.scopes):
            if name in scope:
                return scope
        return None


def _check_int(value: int, line: int) -> int:
    if value < INT_MIN or value > INT_MAX:
        raise MiniRaise("RuntimeError", "integer overflow", line)
    return value


def _default_value(t: TypeNode):
    return {"Int": 0, "Float": 0.0, "Bool": False, "String": "", "Date": 0}.get(t.name)


def date_from_days(days: int, line: int) -> datetime.date:
    try:
        return _EPOCH + datetime.timedelta(days=days)
    except OverflowError:
        raise MiniRaise("RuntimeError", "date out of range", line) from None


class Interpreter:
    def __init__(self, table: ClassTable, widen: set, step_budget: int = DEFAULT_STEP_BUDGET):
        self.table = table
        self.widen = widen
        self.budget = step_budget
        self.steps = 0
        self.depth = 0

    def tick(self):
        self.steps += 1
        if self.steps > self.budget:
            raise BudgetExceeded()

    # objects

    def instantiate(self, cls: str) -> Obj:
        obj = Obj(cls, {})
        # ancestors first so subclass initializers see a complete object
        for info in reversed(self.table.chain(cls)):
            for f in info.decl.fields:
                if f.init is not None:
                    frame = _Frame(obj, info.decl.name)
                    obj.fields[f.name] = self.eval(frame, f.init)
                    if f.type.name == "Float":
                        obj.fields[f.name] = float(obj.fields[f.name])
                elif f.type.name == "List":
                    obj.fields[f.name] = []
                else:
                    obj.fields[f.name] = _default_value(f.type)
        return obj

    def invoke(self, receiver: Obj, name: str, args: List[object], line: int):
        sig = self.table.method(receiver.cls, name, len(args))
        decl = sig.decl
        self.depth += 1
        if self.depth > MAX_CALL_DEPTH:
            raise MiniRaise("RuntimeError", "call depth exceeded", line)
        try:
            frame = _Frame(receiver, sig.owner)
            for (pname, ptype), value in zip(decl.params, args):
                frame.scopes[0][pname] = float(value) if ptype.name == "Float" else value
            result = self.exec_block(frame, decl.body)
            if isinstance(result, _Return):
                value = result.value
                return float(value) if decl.ret.name == "Float" and value is not None else value
            return None
        finally:
            self.depth -= 1

    # statements

    def exec_block(self, frame: _Frame, stmts, scope: bool = False):
        if scope:
            frame.scopes.append({})
        try:
            for s in stmts:
                result = self.exec(frame, s)
                if result is not None:
                    return result
            return None
        finally:
            if scope:
                frame.scopes.pop()

    def exec(self, frame: _Frame, s):
        self.tick()
        if isinstance(s, VarDecl):
            if s.init is not None:
                value = self.eval(frame, s.init)
            elif s.type.name == "List":
                value = []
            else:
                value = _default_value(s.type)
            if s.type.name == "Float" and value is not None:
                value = float(value)
            frame.scopes[-1][s.name] = value
        elif isinstance(s, Assign):
            self.assign(frame, s)
        elif isinstance(s, ExprStmt):
            self.eval(frame, s.expr)
        elif isinstance(s, If):
            if self.eval(frame, s.cond):
                return self.exec_block(frame, s.then, scope=True)
            if s.orelse is not None:
                return self.exec_block(frame, s.orelse, scope=True)
        elif isinstance(s, While):
            while self.eval(frame, s.cond):
                result = self.exec_block(frame, s.body, scope=True)
                if result is not None:
                    return result
                self.tick()
        elif isinstance(s, ForEach):
            items = self.eval(frame, s.iterable)
            if items is None:
                raise MiniRaise("RuntimeError", "iteration over null", s.line)
            for item in list(items):
                frame.scopes.append({s.var: item})
                try:
                    result = self.exec_block(frame, s.body, scope=True)
                finally:
                    frame.scopes.pop()
                if result is not None:
                    return result
                self.tick()
        elif isinstance(s, Return):
            return _Return(None if s.value is None else self.eval(frame, s.value))
        elif isinstance(s, Raise):
            raise MiniRaise(s.label, self.eval(frame, s.message) or "", s.line)
        elif isinstance(s, Assert):
            if not self.eval(frame, s.cond):
                msg = self.eval(frame, s.message) if s.message is not None else "assertion failed"
                raise AssertionFailed(s.line, msg)
        return None

    def assign(self, frame: _Frame, s: Assign):
        value = self.eval(frame, s.value)
        target = s.target
        if isinstance(target, Name):
            scope = frame.find(target.id)
            if scope is not None:
                scope[target.id] = value
                return
            obj = frame.this
            name = target.id
        else:
            obj = self.eval(frame, target.obj)
            name = target.name
        if obj is None:
            raise MiniRaise("RuntimeError", f"assignment to field {name} of null", s.line)
        obj.fields[name] = value

    # expressions

    def eval(self, frame: _Frame, e):
        value = self._eval(frame, e)
        if id(e) in self.widen and isinstance(value, int) and not isinstance(value, bool):
            return float(value)
        return value

    def _eval(self, frame: _Frame, e):
        if isinstance(e, Lit):
            return e.value
        if isinstance(e, Name):
            scope = frame.find(e.id)
            if scope is not None:
                return scope[e.id]
            return frame.this.fields[e.id]
        if isinstance(e, This):
            return frame.this
        if isinstance(e, FieldAccess):
            if self._is_qualifier(frame, e.obj):
                return EnumVal(e.obj.id, e.name)
            obj = self.eval(frame, e.obj)
            if obj is None:
                raise MiniRaise("RuntimeError", f"field {e.name} read on null", e.line)
            return obj.fields[e.name]
        if isinstance(e, New):
            return self.instantiate(e.cls)
        if isinstance(e, ListLit):
            return [self.eval(frame, item) for item in e.items]
        if isinstance(e, Unary):
            v = self.eval(frame, e.operand)
            if e.op == "!":
                return not v
            if isinstance(v, float):
                return -v
            return _check_int(-v, e.line)
        if isinstance(e, Binary):
            return self.binary(frame, e)
        if isinstance(e, Call):
            return self.call(frame, e)
        raise TypeError(f"unknown expression {e!r}")

    def _is_qualifier(self, frame: _Frame, e) -> bool:
        """True when ``e`` names an enum type or built-in module rather than a value."""
        if not isinstance(e, Name) or frame.find(e.id) is not None:
            return False
        if frame.this is not None and self.table.field_type(frame.cls, e.id) is not None:
            return False
        return True

    def binary(self, frame: _Frame, e: Binary):
        op = e.op
        if op == "&&":
            return bool(self.eval(frame, e.left)) and bool(self.eval(frame, e.right))
        if op == "||":
            return bool(self.eval(frame, e.left)) or bool(self.eval(frame, e.right))
        a = self.eval(frame, e.left)
        b = self.eval(frame, e.right)
        if op == "==":
            return _equal(a, b)
        if op == "!=":
            return not _equal(a, b)
        if op == "<":
            return a < b
        if op == "<=":
            return a <= b
        if op == ">":
            return a > b
        if op == ">=":
            return a >= b
        if op == "+" and isinstance(a, str):
            if b is None:
                raise MiniRaise("RuntimeError", "string concatenation with null", e.line)
            return a + b
        if a is None or b is None:
            raise MiniRaise("RuntimeError", f"arithmetic on null", e.line)
        floating = isinstance(a, float) or isinstance(b, float)
        if op == "+":
            r = a + b
        elif op == "-":
            r = a - b
        elif op == "*":
            r = a * b
        elif op == "/":
            if floating:
                return _float_div(float(a), float(b))
            if b == 0:
                raise MiniRaise("RuntimeError", "division by zero", e.line)
            q = abs(a) // abs(b)
            r = q if (a >= 0) == (b >= 0) else -q
        else:
            if floating:
                return math.fmod(a, b) if b != 0 else math.nan
            if b == 0:
                raise MiniRaise("RuntimeError", "division by zero", e.line)
            q = abs(a) // abs(b)
            q = q if (a >= 0) == (b >= 0) else -q
            r = a - b * q
        return r if floating else _check_int(r, e.line)

    def call(self, frame: _Frame, e: Call):
        if e.obj is None:
            args = [self.eval(frame, a) for a in e.args]
            if frame.this is not None and self.table.method(frame.this.cls, e.name, len(args)) is not None:
                self.tick()
                return self.invoke(frame.this, e.name, args, e.line)
            return self.builtin(e.name, args, e.line)
        if self._is_qualifier(frame, e.obj):
            args = [self.eval(frame, a) for a in e.args]
            return self.math(e.name, args, e.line)
        receiver = self.eval(frame, e.obj)
        args = [self.eval(frame, a) for a in e.args]
        if receiver is None:
            raise MiniRaise("RuntimeError", f"method {e.name} called on null", e.line)
        if isinstance(receiver, Obj):
            self.tick()
            return self.invoke(receiver, e.name, args, e.line)
        if isinstance(receiver, list):
            return _list_call(receiver, e.name, args, e.line)
        if isinstance(receiver, str):
            if e.name == "length":
                return len(receiver)
            if args[0] is None:
                raise MiniRaise("RuntimeError", f"String.{e.name} with null", e.line)
            if e.name == "concat":
                return receiver + args[0]
            return args[0] in receiver
        raise TypeError(f"cannot call {e.name} on {receiver!r}")

    def builtin(self, name: str, args, line: int):
        if name == "date":
            try:
                return (datetime.date(*args) - _EPOCH).days
            except ValueError as exc:
                raise MiniRaise("RuntimeError", f"invalid date: {exc}", line) from None
        if name == "daysBetween":
            return _check_int(args[1] - args[0], line)
        if name == "addDays":
            return _check_int(args[0] + args[1], line)
        if name == "year":
            return date_from_days(args[0], line).year
        raise TypeError(f"unknown builtin {name}")

    def math(self, name: str, args, line: int):
        if name == "abs":
            v = args[0]
            return abs(v) if isinstance(v, float) else _check_int(abs(v), line)
        fn = min if name == "min" else max
        r = fn(args[0], args[1])
        if any(isinstance(a, float) for a in args):
            return float(r)
        return r


def _float_div(a: float, b: float) -> float:
    if b == 0.0:
        if a == 0.0 or math.isnan(a):
            return math.nan
        return math.copysign(math.inf, a) * math.copysign(1.0, b)
    return a / b


def _equal(a, b) -> bool:
    if isinstance(a, (Obj, list)) or isinstance(b, (Obj, list)):
        return a is b
    return a == b


def _list_call(items: list, name: str, args, line: int):
    if name == "add":
        items.append(args[0])
        return None
    if name == "size":
        return len(items)
    idx = args[0]
    if not 0 <= idx < len(items):
        raise MiniRaise("RuntimeError", f"list index {idx} out of bounds for size {len(items)}", line)
    if name == "get":
        return items[idx]
    return items.pop(idx)


def run_test(table: ClassTable, widen: set, test: ParsedUnit, test_id: str, step_budget: int = DEFAULT_STEP_BUDGET) -> TestOutcome:
    interp = Interpreter(table, widen, step_budget)
    frame = _Frame(None, None)
    limit = sys.getrecursionlimit()
    if limit < 20000:
        sys.setrecursionlimit(20000)
    try:
        interp.exec_block(frame, test.program.stmts)
    except AssertionFailed as exc:
        return TestOutcome(test_id, False, f"assertion failed at line {exc.line}: {exc.message}")
    except MiniRaise as exc:
        return TestOutcome(test_id, False, exc.describe())
    except BudgetExceeded:
        return TestOutcome(test_id, False, f"step budget exceeded ({step_budget} steps)")
    except RecursionError:
        return TestOutcome(test_id, False, "call depth exceeded")
    return TestOutcome(test_id, True)


def run_tests_on(table: ClassTable, widen: set, tests: Sequence[ParsedUnit], step_budget: int = DEFAULT_STEP_BUDGET):
    return [run_test(table, widen, t, t.path, step_budget) for t in tests]
