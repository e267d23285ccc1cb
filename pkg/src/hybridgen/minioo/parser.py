"""Lexer and recursive-descent parser for MiniOO."""

from __future__ import annotations

import re
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
    Import,
    ListLit,
    Lit,
    MethodDecl,
    Name,
    New,
    Program,
    Raise,
    Return,
    Span,
    This,
    TypeNode,
    Unary,
    VarDecl,
    While,
)

KEYWORDS = frozenset(
    "class abstract extends enum var def return if else while for in raise assert new this null true false import".split()
)

INT_MIN, INT_MAX = -(2**63), 2**63 - 1


class MiniSyntaxError(Exception):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line
        self.message = message


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<doc>/\*\*(?!/)[\s\S]*?\*/)
  | (?P<block>/\*[\s\S]*?\*/)
  | (?P<comment>//[^\n]*)
  | (?P<string>"(?:[^"\\\n]|\\.)*")
  | (?P<float>\d+\.\d+(?:[eE][+-]?\d+)?|\d+[eE][+-]?\d+)
  | (?P<int>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>==|!=|<=|>=|&&|\|\||[-+*/%<>=!.,;:(){}\[\]])
    """,
    re.VERBOSE,
)

_ESCAPES = {"n": "\n", "t": "\t", '"': '"', "\\": "\\"}


class Token:
    __slots__ = ("kind", "text", "line", "pos", "end", "doc", "doc_pos")

    def __init__(self, kind, text, line, pos, end):
        self.kind = kind
        self.text = text
        self.line = line
        self.pos = pos
        self.end = end
        self.doc: Optional[str] = None
        self.doc_pos: Optional[int] = None

    def __repr__(self):
        return f"Token({self.kind}, {self.text!r}, line={self.line})"


def tokenize(text: str) -> List[Token]:
    """Split ``text`` into tokens; a docstring attaches to the token after it."""
    toks: List[Token] = []
    line, pos = 1, 0
    pending_doc = None
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            if text[pos] == '"':
                raise MiniSyntaxError(line, "unterminated string literal")
            if text.startswith("/*", pos):
                raise MiniSyntaxError(line, "unterminated comment")
            raise MiniSyntaxError(line, f"unexpected character {text[pos]!r}")
        kind, lexeme = m.lastgroup, m.group()
        if kind == "doc":
            pending_doc = (lexeme[3:-2], pos)
        elif kind not in ("ws", "nl", "block", "comment"):
            if kind == "ident" and lexeme in KEYWORDS:
                kind = "kw"
            tok = Token(kind, lexeme, line, pos, m.end())
            if pending_doc is not None:
                tok.doc, tok.doc_pos = pending_doc
                pending_doc = None
            toks.append(tok)
        line += lexeme.count("\n")
        pos = m.end()
    toks.append(Token("eof", "", line, len(text), len(text)))
    return toks


def unescape(body: str, line: int) -> str:
    out, i = [], 0
    while i < len(body):
        ch = body[i]
        if ch == "\\":
            nxt = body[i + 1] if i + 1 < len(body) else ""
            if nxt not in _ESCAPES:
                raise MiniSyntaxError(line, f"invalid escape \\{nxt}")
            out.append(_ESCAPES[nxt])
            i += 2
        else:
            out.append(ch)
            i += 1
    return "".join(out)


_BINARY_LEVELS = [
    ("||",),
    ("&&",),
    ("==", "!="),
    ("<", "<=", ">", ">="),
    ("+", "-"),
    ("*", "/", "%"),
]


class Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = tokenize(text)
        self.i = 0

    # token helpers

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, n: int = 1) -> Token:
        return self.toks[min(self.i + n, len(self.toks) - 1)]

    def advance(self) -> Token:
        t = self.toks[self.i]
        if t.kind != "eof":
            self.i += 1
        return t

    def at(self, text: str) -> bool:
        return self.tok.text == text and self.tok.kind in ("op", "kw")

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.advance()
            return True
        return False

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.fail(f"expected '{text}' but found {self._desc()}")
        return self.advance()

    def ident(self) -> str:
        if self.tok.kind != "ident":
            self.fail(f"expected identifier but found {self._desc()}")
        return self.advance().text

    def _desc(self) -> str:
        return "end of input" if self.tok.kind == "eof" else f"'{self.tok.text}'"

    def fail(self, message: str, line: Optional[int] = None):
        raise MiniSyntaxError(line or self.tok.line, message)

    # top level

    def program(self) -> Program:
        prog = Program()
        while self.tok.kind != "eof":
            t = self.tok
            if self.at("import"):
                self.advance()
                name = self.ident()
                end = self.expect(";").end
                prog.imports.append(Import(name, t.line, Span(t.pos, end)))
            elif self.at("class") or self.at("abstract"):
                prog.decls.append(self.class_decl())
            elif self.at("enum"):
                prog.decls.append(self.enum_decl())
            elif self.at("}"):
                self.fail("unmatched '}'")
            else:
                prog.stmts.append(self.statement())
        return prog

    def enum_decl(self) -> EnumDecl:
        start = self.tok
        self.expect("enum")
        name = self.ident()
        self.expect("{")
        lits = []
        if not self.at("}"):
            lits.append(self.ident())
            while self.accept(","):
                lits.append(self.ident())
        end = self.expect("}").end
        span = Span(start.doc_pos if start.doc is not None else start.pos, end)
        return EnumDecl(name, lits, start.doc, start.line, span)

    def class_decl(self) -> ClassDecl:
        start = self.tok
        is_abstract = self.accept("abstract")
        self.expect("class")
        name = self.ident()
        sup = None
        if self.accept("extends"):
            sup = self.ident()
            if self.at(","):
                self.fail("a class may extend only one class")
        self.expect("{")
        cls = ClassDecl(name, sup, is_abstract, docstring=start.doc, line=start.line)
        while not self.at("}"):
            if self.tok.kind == "eof":
                self.fail(f"class {name} is not closed")
            if self.at("var"):
                cls.fields.append(self.field_decl())
            elif self.at("def"):
                cls.methods.append(self.method_decl())
            else:
                self.fail(f"expected 'var' or 'def' in class body but found {self._desc()}")
        close = self.expect("}")
        cls.close = close.pos
        cls.end_line = close.line
        cls.span = Span(start.doc_pos if start.doc is not None else start.pos, close.end)
        return cls

    def field_decl(self) -> FieldDecl:
        start = self.advance()
        name = self.ident()
        self.expect(":")
        t = self.type_node()
        init = self.expression() if self.accept("=") else None
        self.expect(";")
        return FieldDecl(name, t, init, start.doc, start.line)

    def method_decl(self) -> MethodDecl:
        start = self.advance()
        name = self.ident()
        self.expect("(")
        params = []
        if not self.at(")"):
            params.append(self.param())
            while self.accept(","):
                params.append(self.param())
        self.expect(")")
        ret = self.type_node() if self.accept(":") else TypeNode("Void", line=start.line)
        open_tok = self.tok
        body = self.block()
        close_tok = self.toks[self.i - 1]
        return MethodDecl(
            name,
            params,
            ret,
            body,
            start.doc,
            line=start.line,
            end_line=close_tok.line,
            span=Span(start.doc_pos if start.doc is not None else start.pos, close_tok.end),
            body_span=Span(open_tok.pos, close_tok.pos),
        )

    def param(self):
        pname = self.ident()
        self.expect(":")
        return (pname, self.type_node())

    def type_node(self) -> TypeNode:
        t = self.tok
        name = self.ident()
        if name == "List":
            self.expect("<")
            arg = self.type_node()
            self.expect(">")
            return TypeNode("List", arg, t.line)
        return TypeNode(name, None, t.line)

    # statements

    def block(self):
        self.expect("{")
        stmts = []
        while not self.at("}"):
            if self.tok.kind == "eof":
                self.fail("block is not closed")
            stmts.append(self.statement())
        self.advance()
        return stmts

    def statement(self):
        t = self.tok
        if self.accept("var"):
            name = self.ident()
            self.expect(":")
            typ = self.type_node()
            init = self.expression() if self.accept("=") else None
            self.expect(";")
            return VarDecl(name, typ, init, t.line)
        if self.accept("if"):
            return self._if(t)
        if self.accept("while"):
            self.expect("(")
            cond = self.expression()
            self.expect(")")
            return While(cond, self.block(), t.line)
        if self.accept("for"):
            self.expect("(")
            var = self.ident()
            self.expect("in")
            it = self.expression()
            self.expect(")")
            return ForEach(var, it, self.block(), t.line)
        if self.accept("return"):
            value = None if self.at(";") else self.expression()
            self.expect(";")
            return Return(value, t.line)
        if self.accept("raise"):
            label = self.ident()
            self.expect("(")
            msg = self.expression()
            self.expect(")")
            self.expect(";")
            return Raise(label, msg, t.line)
        if self.accept("assert"):
            cond = self.expression()
            msg = self.expression() if self.accept(",") else None
            self.expect(";")
            return Assert(cond, msg, t.line)
        if self.at("{") or self.at("else"):
            self.fail(f"unexpected {self._desc()}")
        expr = self.expression()
        if self.accept("="):
            if not isinstance(expr, (Name, FieldAccess)):
                self.fail("left side of '=' must be a variable or field", t.line)
            value = self.expression()
            self.expect(";")
            return Assign(expr, value, t.line)
        self.expect(";")
        return ExprStmt(expr, t.line)

    def _if(self, t) -> If:
        self.expect("(")
        cond = self.expression()
        self.expect(")")
        then = self.block()
        orelse = None
        if self.accept("else"):
            if self.at("if"):
                t2 = self.advance()
                orelse = [self._if(t2)]
            else:
                orelse = self.block()
        return If(cond, then, orelse, t.line)

    # expressions

    def expression(self, level: int = 0):
        if level == len(_BINARY_LEVELS):
            return self.unary()
        left = self.expression(level + 1)
        ops = _BINARY_LEVELS[level]
        while self.tok.kind == "op" and self.tok.text in ops:
            op = self.advance()
            right = self.expression(level + 1)
            left = Binary(op.text, left, right, op.line)
        return left

    def unary(self):
        t = self.tok
        if self.tok.kind == "op" and self.tok.text in ("-", "!"):
            self.advance()
            return Unary(t.text, self.unary(), t.line)
        return self.postfix()

    def postfix(self):
        expr = self.primary()
        while self.at("."):
            self.advance()
            t = self.tok
            name = self.ident()
            if self.at("("):
                expr = Call(expr, name, self.args(), t.line)
            else:
                expr = FieldAccess(expr, name, t.line)
        return expr

    def args(self):
        self.expect("(")
        out = []
        if not self.at(")"):
            out.append(self.expression())
            while self.accept(","):
                out.append(self.expression())
        self.expect(")")
        return out

    def primary(self):
        t = self.tok
        if t.kind == "int":
            self.advance()
            value = int(t.text)
            if value > INT_MAX:
                self.fail("integer literal out of range", t.line)
            return Lit(value, "int", t.line)
        if t.kind == "float":
            self.advance()
            return Lit(float(t.text), "float", t.line)
        if t.kind == "string":
            self.advance()
            return Lit(unescape(t.text[1:-1], t.line), "string", t.line)
        if t.kind == "kw":
            if t.text in ("true", "false"):
                self.advance()
                return Lit(t.text == "true", "bool", t.line)
            if t.text == "null":
                self.advance()
                return Lit(None, "null", t.line)
            if t.text == "this":
                self.advance()
                return This(t.line)
            if t.text == "new":
                self.advance()
                cls = self.ident()
                self.expect("(")
                self.expect(")")
                return New(cls, t.line)
        if t.kind == "ident":
            self.advance()
            if self.at("("):
                return Call(None, t.text, self.args(), t.line)
            return Name(t.text, t.line)
        if self.at("("):
            self.advance()
            e = self.expression()
            self.expect(")")
            return e
        if self.at("["):
            self.advance()
            items = []
            if not self.at("]"):
                items.append(self.expression())
                while self.accept(","):
                    items.append(self.expression())
            self.expect("]")
            return ListLit(items, t.line)
        self.fail(f"unexpected {self._desc()} in expression")


def parse_program(text: str) -> Program:
    """Parse MiniOO source. Raises :class:`MiniSyntaxError`.

    An empty (or comment-only) text yields an empty program.
    """
    return Parser(text).program()
