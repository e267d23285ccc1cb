"""Static name and type checking across MiniOO units."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from ..backend.contract import Diagnostic, make_diagnostic
from .syntax import (
    Assert,
    Assign,
    Binary,
    Call,
    ClassDecl,
    EnumDecl,
    ExprStmt,
    FieldAccess,
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
    TypeNode,
    Unary,
    VarDecl,
    While,
)
from .types import (
    BOOL,
    BUILTIN_FUNCTIONS,
    BUILTIN_MODULES,
    DATE,
    EMPTY_LIST,
    ERROR,
    FLOAT,
    INT,
    MATH_FUNCTIONS,
    NULL,
    PRIMITIVE_TYPES,
    STRING,
    STRING_METHODS,
    VOID,
    Ty,
    is_numeric,
    list_methods,
    list_of,
)


@dataclass
class ParsedUnit:
    path: str
    program: Program
    text: str


@dataclass
class MethodSig:
    params: Tuple[Ty, ...]
    ret: Ty
    owner: str
    decl: MethodDecl


@dataclass
class ClassInfo:
    decl: ClassDecl
    unit: ParsedUnit
    fields: Dict[str, Ty] = field(default_factory=dict)
    methods: Dict[Tuple[str, int], MethodSig] = field(default_factory=dict)


class ClassTable:
    """Resolved declarations from a set of units."""

    def __init__(self):
        self.classes: Dict[str, ClassInfo] = {}
        self.enums: Dict[str, EnumDecl] = {}

    def chain(self, name: str) -> List[ClassInfo]:
        out, seen = [], set()
        while name is not None and name in self.classes and name not in seen:
            seen.add(name)
            info = self.classes[name]
            out.append(info)
            name = info.decl.super_name
        return out

    def field_type(self, cls: str, name: str) -> Optional[Ty]:
        for info in self.chain(cls):
            if name in info.fields:
                return info.fields[name]
        return None

    def method(self, cls: str, name: str, arity: int) -> Optional[MethodSig]:
        for info in self.chain(cls):
            sig = info.methods.get((name, arity))
            if sig is not None:
                return sig
        return None

    def has_method_named(self, cls: str, name: str) -> bool:
        return any(n == name for info in self.chain(cls) for (n, _) in info.methods)

    def is_subclass(self, sub: str, sup: str) -> bool:
        return any(info.decl.name == sup for info in self.chain(sub))

    def resolve(self, t: TypeNode) -> Optional[Ty]:
        if t.name == "List":
            if t.arg is None:
                return None
            inner = self.resolve(t.arg)
            return None if inner is None or inner == VOID else list_of(inner)
        if t.arg is not None:
            return None
        if t.name in PRIMITIVE_TYPES:
            return PRIMITIVE_TYPES[t.name]
        if t.name in self.classes:
            return Ty("Class", t.name)
        if t.name in self.enums:
            return Ty("Enum", t.name)
        return None


def assignable(table: ClassTable, src: Ty, dst: Ty) -> bool:
    if src == ERROR or dst == ERROR or src == dst:
        return True
    if src == INT and dst == FLOAT:
        return True
    if src == NULL:
        return dst.kind in ("Class", "List", "String")
    if src.kind == "Class" and dst.kind == "Class":
        return table.is_subclass(src.name, dst.name)
    if src == EMPTY_LIST:
        return dst.kind == "List"
    return False


def terminates(stmts) -> bool:
    """True when control can never fall off the end of ``stmts``."""
    for s in stmts:
        if isinstance(s, (Return, Raise)):
            return True
        if isinstance(s, If) and s.orelse is not None and terminates(s.then) and terminates(s.orelse):
            return True
        if isinstance(s, While) and isinstance(s.cond, Lit) and s.cond.value is True:
            return True
    return False


class _Ctx:
    def __init__(self, unit: ParsedUnit, cls: Optional[ClassInfo], ret: Optional[Ty]):
        self.unit = unit
        self.cls = cls
        self.ret = ret
        self.scopes: List[Dict[str, Ty]] = [{}]

    def lookup(self, name: str) -> Optional[Ty]:
        for scope in reversed(self.scopes):
            if name in scope:
                return scope[name]
        return None


class Checker:
    def __init__(self, units: Sequence[ParsedUnit]):
        self.units = list(units)
        self.table = ClassTable()
        self.diags: List[Diagnostic] = []
        # ids of Int-typed expressions that flow into a Float slot
        self.widen: set = set()

    def flows(self, expr, src: Ty, dst: Ty) -> bool:
        if src == INT and dst == FLOAT:
            self.widen.add(id(expr))
        return assignable(self.table, src, dst)

    def report(self, unit: ParsedUnit, kind: str, line: int, message: str):
        self.diags.append(make_diagnostic(unit.path, unit.text, kind, line, message))

    # declarations

    def declare(self):
        seen: Dict[str, str] = {}
        for u in self.units:
            for d in u.program.decls:
                if d.name in seen or d.name in PRIMITIVE_TYPES or d.name in ("List",) + BUILTIN_MODULES:
                    self.report(u, "Other", d.line, f"duplicate declaration of {d.name}")
                    continue
                seen[d.name] = u.path
                if isinstance(d, ClassDecl):
                    self.table.classes[d.name] = ClassInfo(d, u)
                else:
                    self.table.enums[d.name] = d
                    if len(set(d.literals)) != len(d.literals):
                        self.report(u, "Other", d.line, f"enum {d.name} repeats a literal")

        for info in self.table.classes.values():
            d, u = info.decl, info.unit
            if d.super_name is not None and d.super_name not in self.table.classes:
                self.report(u, "UnresolvedSymbol", d.line, f"unknown superclass {d.super_name}")
            for f in d.fields:
                t = self.table.resolve(f.type)
                if t is None or t == VOID:
                    self.report(u, "UnresolvedSymbol" if t is None else "TypeMismatch", f.line, f"invalid field type {f.type}")
                    t = ERROR
                if f.name in info.fields:
                    self.report(u, "Other", f.line, f"duplicate field {f.name}")
                info.fields[f.name] = t
            for m in d.methods:
                params = []
                for pname, ptype in m.params:
                    t = self.table.resolve(ptype)
                    if t is None or t == VOID:
                        self.report(u, "UnresolvedSymbol" if t is None else "TypeMismatch", m.line, f"invalid parameter type {ptype}")
                        t = ERROR
                    params.append(t)
                ret = self.table.resolve(m.ret)
                if ret is None:
                    self.report(u, "UnresolvedSymbol", m.line, f"unknown return type {m.ret}")
                    ret = ERROR
                if m.key in info.methods:
                    self.report(u, "Other", m.line, f"duplicate method {m.name}/{m.arity}")
                    continue
                info.methods[m.key] = MethodSig(tuple(params), ret, d.name, m)

        for name, info in self.table.classes.items():
            d, u = info.decl, info.unit
            cur, seen_names = d.super_name, {name}
            cyclic = False
            while cur is not None and cur in self.table.classes:
                if cur in seen_names:
                    cyclic = True
                    break
                seen_names.add(cur)
                cur = self.table.classes[cur].decl.super_name
            if cyclic:
                self.report(u, "Other", d.line, f"cyclic inheritance involving {name}")
                continue
            ancestors = self.table.chain(name)[1:]
            for f in d.fields:
                if any(f.name in a.fields for a in ancestors):
                    self.report(u, "Other", f.line, f"field {f.name} hides an inherited field")
            for m in d.methods:
                mine = info.methods.get(m.key)
                for a in ancestors:
                    base = a.methods.get(m.key)
                    if base is not None and mine is not None and mine.decl is m:
                        if base.params != mine.params or base.ret != mine.ret:
                            self.report(u, "TypeMismatch", m.line, f"{m.name} overrides {a.decl.name}.{m.name} with a different signature")
                        break

    # bodies

    def check(self, tests: Sequence[ParsedUnit] = ()) -> List[Diagnostic]:
        self.declare()
        for u in self.units:
            self.check_imports(u)
            for s in u.program.stmts[:1]:
                self.report(u, "Other", s.line, "statements are only allowed in test programs")
            for d in u.program.decls:
                if isinstance(d, ClassDecl) and self.table.classes.get(d.name, None) is not None and self.table.classes[d.name].decl is d:
                    self.check_class(self.table.classes[d.name])
        for t in tests:
            self.check_imports(t)
            for d in t.program.decls[:1]:
                self.report(t, "Other", d.line, "test programs cannot declare classes or enums")
            ctx = _Ctx(t, None, None)
            self.block(ctx, t.program.stmts, new_scope=False)
        return sort_diagnostics(self.diags)

    def check_imports(self, u: ParsedUnit):
        for imp in u.program.imports:
            if imp.name not in self.table.classes and imp.name not in self.table.enums and imp.name not in BUILTIN_MODULES:
                self.report(u, "UnresolvedSymbol", imp.line, f"cannot import unknown name {imp.name}")

    def check_class(self, info: ClassInfo):
        u = info.unit
        for f in info.decl.fields:
            if f.init is not None:
                ctx = _Ctx(u, info, None)
                t = self.expr(ctx, f.init, expected=info.fields.get(f.name))
                if not self.flows(f.init, t, info.fields.get(f.name, ERROR)):
                    self.report(u, "TypeMismatch", f.line, f"cannot initialize {f.name}: {info.fields[f.name]} with {t}")
        for m in info.decl.methods:
            sig = info.methods.get(m.key)
            if sig is None or sig.decl is not m:
                continue
            ctx = _Ctx(u, info, sig.ret)
            for (pname, _), ptype in zip(m.params, sig.params):
                if pname in ctx.scopes[0]:
                    self.report(u, "Other", m.line, f"duplicate parameter {pname}")
                ctx.scopes[0][pname] = ptype
            self.block(ctx, m.body, new_scope=True)
            if sig.ret not in (VOID, ERROR) and not terminates(m.body):
                self.report(u, "Other", m.end_line, f"method {m.name} may finish without returning a {sig.ret}")

    def block(self, ctx: _Ctx, stmts, new_scope: bool = True):
        if new_scope:
            ctx.scopes.append({})
        for s in stmts:
            self.stmt(ctx, s)
        if new_scope:
            ctx.scopes.pop()

    def stmt(self, ctx: _Ctx, s):
        u = ctx.unit
        if isinstance(s, VarDecl):
            t = self.table.resolve(s.type)
            if t is None:
                self.report(u, "UnresolvedSymbol", s.line, f"unknown type {s.type}")
                t = ERROR
            elif t == VOID:
                self.report(u, "TypeMismatch", s.line, "a variable cannot be Void")
                t = ERROR
            if ctx.lookup(s.name) is not None:
                self.report(u, "Other", s.line, f"variable {s.name} is already defined")
            if s.init is not None:
                vt = self.expr(ctx, s.init, expected=t)
                if not self.flows(s.init, vt, t):
                    self.report(u, "TypeMismatch", s.line, f"cannot assign {vt} to {s.name}: {t}")
            ctx.scopes[-1][s.name] = t
        elif isinstance(s, Assign):
            tt = self.target_type(ctx, s.target)
            vt = self.expr(ctx, s.value, expected=tt)
            if not self.flows(s.value, vt, tt):
                self.report(u, "TypeMismatch", s.line, f"cannot assign {vt} to {tt}")
        elif isinstance(s, If):
            self.condition(ctx, s.cond, s.line)
            self.block(ctx, s.then)
            if s.orelse is not None:
                self.block(ctx, s.orelse)
        elif isinstance(s, While):
            self.condition(ctx, s.cond, s.line)
            self.block(ctx, s.body)
        elif isinstance(s, ForEach):
            it = self.expr(ctx, s.iterable)
            if it.kind == "List":
                et = it.elem
            else:
                if it != ERROR:
                    self.report(u, "TypeMismatch", s.line, f"cannot iterate over {it}")
                et = ERROR
            if ctx.lookup(s.var) is not None:
                self.report(u, "Other", s.line, f"variable {s.var} is already defined")
            ctx.scopes.append({s.var: et})
            self.block(ctx, s.body)
            ctx.scopes.pop()
        elif isinstance(s, Return):
            if ctx.cls is None:
                self.report(u, "Other", s.line, "return outside a method")
                return
            if s.value is None:
                if ctx.ret not in (VOID, ERROR):
                    self.report(u, "TypeMismatch", s.line, f"missing return value of type {ctx.ret}")
            else:
                vt = self.expr(ctx, s.value, expected=ctx.ret)
                if ctx.ret == VOID:
                    self.report(u, "TypeMismatch", s.line, "a Void method cannot return a value")
                elif not self.flows(s.value, vt, ctx.ret):
                    self.report(u, "TypeMismatch", s.line, f"cannot return {vt} from a method returning {ctx.ret}")
        elif isinstance(s, Raise):
            mt = self.expr(ctx, s.message)
            if not assignable(self.table, mt, STRING):
                self.report(u, "TypeMismatch", s.line, f"raise payload must be String, got {mt}")
        elif isinstance(s, Assert):
            self.condition(ctx, s.cond, s.line)
            if s.message is not None:
                mt = self.expr(ctx, s.message)
                if not assignable(self.table, mt, STRING):
                    self.report(u, "TypeMismatch", s.line, f"assert message must be String, got {mt}")
        elif isinstance(s, ExprStmt):
            self.expr(ctx, s.expr)
        else:
            raise TypeError(f"unknown statement {s!r}")

    def condition(self, ctx: _Ctx, e, line: int):
        t = self.expr(ctx, e)
        if t not in (BOOL, ERROR):
            self.report(ctx.unit, "TypeMismatch", line, f"condition must be Bool, got {t}")

    def target_type(self, ctx: _Ctx, target) -> Ty:
        if isinstance(target, Name):
            t = ctx.lookup(target.id)
            if t is not None:
                return t
            if ctx.cls is not None:
                ft = self.table.field_type(ctx.cls.decl.name, target.id)
                if ft is not None:
                    return ft
            self.report(ctx.unit, "UnresolvedSymbol", target.line, f"unknown variable {target.id}")
            return ERROR
        ot = self.expr(ctx, target.obj)
        if ot.kind == "EnumType":
            self.report(ctx.unit, "Other", target.line, "enum literals cannot be assigned")
            return ERROR
        return self.field_access_type(ctx, ot, target.name, target.line)

    # expressions

    def field_access_type(self, ctx: _Ctx, ot: Ty, name: str, line: int) -> Ty:
        if ot == ERROR:
            return ERROR
        if ot.kind == "Class":
            ft = self.table.field_type(ot.name, name)
            if ft is None:
                self.report(ctx.unit, "UnresolvedSymbol", line, f"{ot.name} has no field {name}")
                return ERROR
            return ft
        if ot.kind == "EnumType":
            if name not in self.table.enums[ot.name].literals:
                self.report(ctx.unit, "UnresolvedSymbol", line, f"enum {ot.name} has no literal {name}")
                return ERROR
            return Ty("Enum", ot.name)
        self.report(ctx.unit, "UnresolvedSymbol", line, f"{ot} has no field {name}")
        return ERROR

    def expr(self, ctx: _Ctx, e, expected: Optional[Ty] = None) -> Ty:
        u = ctx.unit
        if isinstance(e, Lit):
            return {"int": INT, "float": FLOAT, "string": STRING, "bool": BOOL, "null": NULL}[e.kind]
        if isinstance(e, Name):
            t = ctx.lookup(e.id)
            if t is not None:
                return t
            if ctx.cls is not None:
                ft = self.table.field_type(ctx.cls.decl.name, e.id)
                if ft is not None:
                    return ft
            if e.id in self.table.enums:
                return Ty("EnumType", e.id)
            if e.id in BUILTIN_MODULES:
                return Ty("Module", e.id)
            self.report(u, "UnresolvedSymbol", e.line, f"unknown name {e.id}")
            return ERROR
        if isinstance(e, This):
            if ctx.cls is None:
                self.report(u, "Other", e.line, "'this' used outside a class")
                return ERROR
            return Ty("Class", ctx.cls.decl.name)
        if isinstance(e, FieldAccess):
            return self.field_access_type(ctx, self.expr(ctx, e.obj), e.name, e.line)
        if isinstance(e, New):
            info = self.table.classes.get(e.cls)
            if info is None:
                self.report(u, "UnresolvedSymbol", e.line, f"unknown class {e.cls}")
                return ERROR
            if info.decl.is_abstract:
                self.report(u, "Other", e.line, f"cannot instantiate abstract class {e.cls}")
            return Ty("Class", e.cls)
        if isinstance(e, ListLit):
            return self.list_literal(ctx, e, expected)
        if isinstance(e, Unary):
            t = self.expr(ctx, e.operand)
            if t == ERROR:
                return ERROR
            if e.op == "-" and is_numeric(t):
                return t
            if e.op == "!" and t == BOOL:
                return BOOL
            self.report(u, "TypeMismatch", e.line, f"operator {e.op} does not apply to {t}")
            return ERROR
        if isinstance(e, Binary):
            return self.binary(ctx, e)
        if isinstance(e, Call):
            return self.call(ctx, e)
        raise TypeError(f"unknown expression {e!r}")

    def list_literal(self, ctx: _Ctx, e: ListLit, expected: Optional[Ty]) -> Ty:
        if expected is not None and expected.kind == "List":
            for item in e.items:
                it = self.expr(ctx, item, expected=expected.elem)
                if not self.flows(item, it, expected.elem):
                    self.report(ctx.unit, "TypeMismatch", item.line, f"list element {it} is not a {expected.elem}")
            return expected
        if not e.items:
            return EMPTY_LIST
        types = [self.expr(ctx, item) for item in e.items]
        elem = next((t for t in types if t not in (NULL, ERROR)), None)
        if elem is None or elem == EMPTY_LIST:
            self.report(ctx.unit, "TypeMismatch", e.line, "cannot infer the element type of this list")
            return ERROR
        if elem == INT and FLOAT in types:
            elem = FLOAT
        for item, t in zip(e.items, types):
            if not self.flows(item, t, elem):
                self.report(ctx.unit, "TypeMismatch", item.line, f"list element {t} is not a {elem}")
        return list_of(elem)

    def binary(self, ctx: _Ctx, e: Binary) -> Ty:
        lt, rt = self.expr(ctx, e.left), self.expr(ctx, e.right)
        if ERROR in (lt, rt):
            return ERROR
        op = e.op
        if op in ("&&", "||"):
            if lt == BOOL and rt == BOOL:
                return BOOL
        elif op in ("+", "-", "*", "/", "%"):
            if is_numeric(lt) and is_numeric(rt):
                return INT if lt == rt == INT else FLOAT
            if op == "+" and lt == STRING and rt == STRING:
                return STRING
        elif op in ("<", "<=", ">", ">="):
            if (is_numeric(lt) and is_numeric(rt)) or (lt == rt == DATE):
                return BOOL
        elif op in ("==", "!="):
            if (is_numeric(lt) and is_numeric(rt)) or assignable(self.table, lt, rt) or assignable(self.table, rt, lt):
                return BOOL
        self.report(ctx.unit, "TypeMismatch", e.line, f"operator {op} does not apply to {lt} and {rt}")
        return ERROR

    def _check_args(self, ctx: _Ctx, e: Call, params: Sequence[Ty], what: str):
        for arg, pt in zip(e.args, params):
            at = self.expr(ctx, arg, expected=pt)
            if not self.flows(arg, at, pt):
                self.report(ctx.unit, "TypeMismatch", arg.line, f"argument of {what} expects {pt}, got {at}")

    def call(self, ctx: _Ctx, e: Call) -> Ty:
        u = ctx.unit
        arity = len(e.args)
        if e.obj is None:
            if ctx.cls is not None:
                sig = self.table.method(ctx.cls.decl.name, e.name, arity)
                if sig is not None:
                    self._check_args(ctx, e, sig.params, e.name)
                    return sig.ret
            builtin = BUILTIN_FUNCTIONS.get((e.name, arity))
            if builtin is not None:
                self._check_args(ctx, e, builtin[0], e.name)
                return builtin[1]
            self._args_only(ctx, e)
            self.report(u, "UnresolvedSymbol", e.line, f"unknown method {e.name}/{arity}")
            return ERROR
        ot = self.expr(ctx, e.obj)
        if ot == ERROR:
            self._args_only(ctx, e)
            return ERROR
        if ot.kind == "Module":
            return self.math_call(ctx, e)
        if ot.kind == "Class":
            sig = self.table.method(ot.name, e.name, arity)
            if sig is None:
                self._args_only(ctx, e)
                self.report(u, "UnresolvedSymbol", e.line, f"{ot.name} has no method {e.name}/{arity}")
                return ERROR
            self._check_args(ctx, e, sig.params, f"{ot.name}.{e.name}")
            return sig.ret
        table = None
        if ot.kind == "List":
            table = list_methods(ot.elem)
        elif ot == STRING:
            table = STRING_METHODS
        entry = table.get((e.name, arity)) if table else None
        if entry is None:
            self._args_only(ctx, e)
            self.report(u, "UnresolvedSymbol", e.line, f"{ot} has no method {e.name}/{arity}")
            return ERROR
        self._check_args(ctx, e, entry[0], f"{ot}.{e.name}")
        return entry[1]

    def _args_only(self, ctx: _Ctx, e: Call):
        for a in e.args:
            self.expr(ctx, a)

    def math_call(self, ctx: _Ctx, e: Call) -> Ty:
        arity = len(e.args)
        want = 1 if e.name == "abs" else 2
        if e.name not in MATH_FUNCTIONS or arity != want:
            self._args_only(ctx, e)
            self.report(ctx.unit, "UnresolvedSymbol", e.line, f"Math has no function {e.name}/{arity}")
            return ERROR
        types = [self.expr(ctx, a) for a in e.args]
        if ERROR in types:
            return ERROR
        if not all(is_numeric(t) for t in types):
            self.report(ctx.unit, "TypeMismatch", e.line, f"Math.{e.name} expects numbers")
            return ERROR
        if all(t == INT for t in types):
            return INT
        self.widen.add(id(e))
        return FLOAT


def sort_diagnostics(diags) -> List[Diagnostic]:
    unique = list(dict.fromkeys(diags))
    return sorted(unique, key=lambda d: (d.path, d.line))


def check_units(units: Sequence[ParsedUnit], tests: Sequence[ParsedUnit] = ()) -> List[Diagnostic]:
    return Checker(units).check(tests)


def build_table(units: Sequence[ParsedUnit]) -> ClassTable:
    checker = Checker(units)
    checker.declare()
    return checker.table
