"""Reader and writer for the ``.cmdl`` textual model format.

A document looks like::

    package hr {
      enum Level { JUNIOR, SENIOR }
      class Employee extends Person {
        attr hireDate: Date;
        attr active: Bool = true;
        ref projects: Project[*] opposite members;
        op computeBonus(currentDate: Date): Float {
          summary "Compute the bonus.";
          input currentDate "today";
        }
      }
    }
"""

from __future__ import annotations

import re
from typing import List

from .types import (
    PRIMITIVES,
    AttributeDef,
    ClassDef,
    DuplicateName,
    EnumDef,
    MethodSpec,
    ModelPackage,
    ModelSyntaxError,
    OperationDef,
    ReferenceDef,
    TypeRef,
    UnresolvedType,
    VOID,
)

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>//[^\n]*)
  | (?P<string>"(?:[^"\\\n]|\\.)*")
  | (?P<float>-?\d+\.\d+(?:[eE][+-]?\d+)?|-?\d+[eE][+-]?\d+)
  | (?P<int>-?\d+)
  | (?P<many>\[\*\])
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<punct>[{}();:,<>=])
    """,
    re.VERBOSE,
)

_ESCAPES = {"n": "\n", "t": "\t", '"': '"', "\\": "\\"}
_SPEC_KEYWORDS = ("summary", "algorithm", "input", "output", "pre", "post")


def unescape(body: str, line: int) -> str:
    out = []
    i = 0
    while i < len(body):
        ch = body[i]
        if ch == "\\":
            nxt = body[i + 1] if i + 1 < len(body) else ""
            if nxt not in _ESCAPES:
                raise ModelSyntaxError(line, f"bad escape \\{nxt}")
            out.append(_ESCAPES[nxt])
            i += 2
        else:
            out.append(ch)
            i += 1
    return "".join(out)


def quote(text: str) -> str:
    text = text.replace("\\", "\\\\").replace('"', '\\"')
    return '"' + text.replace("\n", "\\n").replace("\t", "\\t") + '"'


class _Tok:
    __slots__ = ("kind", "text", "line")

    def __init__(self, kind, text, line):
        self.kind, self.text, self.line = kind, text, line

    def __repr__(self):
        return f"{self.kind}:{self.text!r}@{self.line}"


def _tokenize(text: str) -> List[_Tok]:
    toks = []
    line = 1
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ModelSyntaxError(line, f"unexpected character {text[pos]!r}")
        kind = m.lastgroup
        if kind == "nl":
            line += 1
        elif kind not in ("ws", "comment"):
            toks.append(_Tok(kind, m.group(), line))
        pos = m.end()
    toks.append(_Tok("eof", "", line))
    return toks


class _Reader:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def advance(self) -> _Tok:
        t = self.toks[self.i]
        if t.kind != "eof":
            self.i += 1
        return t

    def at(self, text: str) -> bool:
        return self.tok.text == text and self.tok.kind in ("punct", "ident", "many")

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.advance()
            return True
        return False

    def expect(self, text: str) -> _Tok:
        if not self.at(text):
            self.fail(f"expected {text!r}, found {self.tok.text or 'end of input'!r}")
        return self.advance()

    def ident(self) -> str:
        if self.tok.kind != "ident":
            self.fail(f"expected identifier, found {self.tok.text or 'end of input'!r}")
        return self.advance().text

    def string(self) -> str:
        t = self.tok
        if t.kind != "string":
            self.fail(f"expected string literal, found {t.text or 'end of input'!r}")
        self.advance()
        return unescape(t.text[1:-1], t.line)

    def fail(self, message: str):
        raise ModelSyntaxError(self.tok.line, message)

    # grammar

    def document(self) -> ModelPackage:
        self.expect("package")
        name = self.ident()
        self.expect("{")
        classes, enums = [], []
        while not self.at("}"):
            if self.tok.kind == "eof":
                self.fail("unterminated package")
            if self.at("enum"):
                enums.append(self.enum())
            else:
                classes.append(self.class_())
        self.expect("}")
        if self.tok.kind != "eof":
            self.fail(f"trailing input {self.tok.text!r}")
        return ModelPackage(name, tuple(classes), tuple(enums))

    def enum(self) -> EnumDef:
        self.expect("enum")
        name = self.ident()
        self.expect("{")
        lits = []
        if not self.at("}"):
            lits.append(self.ident())
            while self.accept(","):
                lits.append(self.ident())
        self.expect("}")
        return EnumDef(name, tuple(lits))

    def class_(self) -> ClassDef:
        is_abstract = self.accept("abstract")
        self.expect("class")
        name = self.ident()
        sup = None
        if self.accept("extends"):
            sup = self.ident()
            if self.at(","):
                self.fail("multiple inheritance is not supported")
        self.expect("{")
        attrs, refs, ops = [], [], []
        while not self.at("}"):
            if self.at("attr"):
                attrs.append(self.attr())
            elif self.at("ref"):
                refs.append(self.ref())
            elif self.at("op"):
                ops.append(self.op())
            else:
                self.fail(f"expected attr, ref or op, found {self.tok.text or 'end of input'!r}")
        self.expect("}")
        return ClassDef(name, is_abstract, sup, tuple(attrs), tuple(refs), tuple(ops))

    def type_(self) -> TypeRef:
        name = self.ident()
        if name == "List":
            self.expect("<")
            elem = self.type_()
            self.expect(">")
            return TypeRef.list_of(elem)
        if name in PRIMITIVES or name == "Void":
            return TypeRef(name)
        # class vs enum is settled during resolution
        return TypeRef("Class", name)

    def attr(self) -> AttributeDef:
        self.expect("attr")
        name = self.ident()
        self.expect(":")
        t = self.type_()
        many = self.accept("[*]")
        default = None
        if self.accept("="):
            default = self.literal()
        self.expect(";")
        return AttributeDef(name, t, many, default)

    def literal(self):
        t = self.advance()
        if t.kind == "int":
            return int(t.text)
        if t.kind == "float":
            return float(t.text)
        if t.kind == "string":
            return unescape(t.text[1:-1], t.line)
        if t.kind == "ident":
            if t.text == "true":
                return True
            if t.text == "false":
                return False
            return _EnumLiteral(t.text)
        raise ModelSyntaxError(t.line, f"expected literal, found {t.text!r}")

    def ref(self) -> ReferenceDef:
        self.expect("ref")
        name = self.ident()
        self.expect(":")
        target = self.ident()
        many = self.accept("[*]")
        containment = self.accept("containment")
        opposite = self.ident() if self.accept("opposite") else None
        self.expect(";")
        return ReferenceDef(name, target, many, containment, opposite)

    def op(self) -> OperationDef:
        self.expect("op")
        name = self.ident()
        self.expect("(")
        params = []
        if not self.at(")"):
            params.append(self.param())
            while self.accept(","):
                params.append(self.param())
        self.expect(")")
        ret = self.type_() if self.accept(":") else VOID
        spec = None
        if self.accept("{"):
            spec = self.spec_body()
            self.expect("}")
        elif not self.at("}"):
            self.expect(";")
        return OperationDef(name, tuple(params), ret, spec)

    def param(self):
        pname = self.ident()
        self.expect(":")
        return (pname, self.type_())

    def spec_body(self) -> MethodSpec:
        fields = {"summary": "", "algorithm": "", "output": ""}
        inputs, pre, post = [], [], []
        while not self.at("}"):
            kw = self.ident()
            if kw not in _SPEC_KEYWORDS:
                self.fail(f"unknown annotation key {kw!r}")
            if kw == "input":
                pname = self.ident()
                inputs.append((pname, self.string()))
            elif kw == "pre":
                pre.append(self.string())
            elif kw == "post":
                post.append(self.string())
            else:
                fields[kw] = self.string()
            self.expect(";")
        return MethodSpec(
            summary=fields["summary"],
            algorithm=fields["algorithm"],
            inputs=tuple(inputs),
            outputs=fields["output"],
            preconditions=tuple(pre),
            postconditions=tuple(post),
        )


class _EnumLiteral(str):
    """Marks a bare identifier default until the attribute type is resolved."""


def _resolve(pkg: ModelPackage) -> ModelPackage:
    seen = set()
    for decl in list(pkg.classes) + list(pkg.enums):
        if decl.name in seen:
            raise DuplicateName(decl.name)
        seen.add(decl.name)
    classes = {c.name for c in pkg.classes}
    enums = {e.name for e in pkg.enums}

    def fix(t: TypeRef) -> TypeRef:
        if t.kind == "List":
            return TypeRef.list_of(fix(t.elem))
        if t.kind == "Class":
            if t.name in enums:
                return TypeRef.enum(t.name)
            if t.name not in classes:
                raise UnresolvedType(t.name)
        return t

    out = []
    for c in pkg.classes:
        if c.super_class is not None and c.super_class not in classes:
            raise UnresolvedType(c.super_class)
        attrs = []
        for a in c.attributes:
            default = a.default
            if isinstance(default, _EnumLiteral):
                if fix(a.type).kind != "Enum":
                    raise UnresolvedType(default)
                default = str(default)
            attrs.append(AttributeDef(a.name, fix(a.type), a.is_many, default))
        for r in c.references:
            if r.target not in classes:
                raise UnresolvedType(r.target)
        ops = tuple(
            OperationDef(o.name, tuple((n, fix(t)) for n, t in o.params), fix(o.return_type), o.spec)
            for o in c.operations
        )
        out.append(ClassDef(c.name, c.is_abstract, c.super_class, tuple(attrs), c.references, ops))
    return ModelPackage(pkg.name, tuple(out), pkg.enums)


def parse_model(text: str) -> ModelPackage:
    """Parse a ``.cmdl`` document.

    Raises ModelSyntaxError (with a 1-based line), UnresolvedType or
    DuplicateName. Structural invariants beyond name resolution are left to
    :func:`validate_model`.
    """
    return _resolve(_Reader(text).document())


def _literal_text(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, int):
        return str(value)
    return value


def _default_text(attr: AttributeDef) -> str:
    if attr.type.kind == "Enum":
        return attr.default
    if attr.type.kind == "String":
        return quote(attr.default)
    if attr.type.kind == "Float" and not isinstance(attr.default, float):
        return repr(float(attr.default))
    return _literal_text(attr.default)


def serialize_model(pkg: ModelPackage) -> str:
    out = [f"package {pkg.name} {{"]
    for e in pkg.enums:
        out.append(f"  enum {e.name} {{ {', '.join(e.literals)} }}" if e.literals else f"  enum {e.name} {{ }}")
    for c in pkg.classes:
        head = ("abstract " if c.is_abstract else "") + f"class {c.name}"
        if c.super_class:
            head += f" extends {c.super_class}"
        out.append(f"  {head} {{")
        for a in c.attributes:
            line = f"    attr {a.name}: {a.type}"
            if a.is_many:
                line += "[*]"
            if a.default is not None:
                line += " = " + _default_text(a)
            out.append(line + ";")
        for r in c.references:
            line = f"    ref {r.name}: {r.target}"
            if r.is_many:
                line += "[*]"
            if r.is_containment:
                line += " containment"
            if r.opposite:
                line += f" opposite {r.opposite}"
            out.append(line + ";")
        for o in c.operations:
            params = ", ".join(f"{n}: {t}" for n, t in o.params)
            line = f"    op {o.name}({params})"
            if not o.return_type.is_void:
                line += f": {o.return_type}"
            if o.spec is None:
                out.append(line + ";")
                continue
            out.append(line + " {")
            out.extend(_spec_lines(o.spec))
            out.append("    }")
        out.append("  }")
    out.append("}")
    return "\n".join(out) + "\n"


def _spec_lines(spec: MethodSpec) -> List[str]:
    pad = "      "
    lines = [f"{pad}summary {quote(spec.summary)};"]
    if spec.algorithm:
        lines.append(f"{pad}algorithm {quote(spec.algorithm)};")
    for name, desc in spec.inputs:
        lines.append(f"{pad}input {name} {quote(desc)};")
    if spec.outputs:
        lines.append(f"{pad}output {quote(spec.outputs)};")
    lines.extend(f"{pad}pre {quote(p)};" for p in spec.preconditions)
    lines.extend(f"{pad}post {quote(p)};" for p in spec.postconditions)
    return lines


def read_model_file(path) -> ModelPackage:
    with open(path, encoding="utf-8") as fh:
        return parse_model(fh.read())

