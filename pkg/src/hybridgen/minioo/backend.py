"""The MiniOO implementation of the backend contract."""

from __future__ import annotations

import dataclasses
from typing import AbstractSet, List, Optional, Sequence, Tuple

from ..backend.contract import (
    Backend,
    CompileResult,
    MergeReport,
    MethodKey,
    ParseResult,
    SourceUnit,
    TestOutcome,
    TestProgram,
    UnannotatedOperation,
    UnparseableCompletion,
    format_key,
    make_diagnostic,
)
from ..model import InvalidModel, ModelPackage, validate_model
from . import skeleton as sk
from .checker import Checker, ParsedUnit, sort_diagnostics
from .interp import DEFAULT_STEP_BUDGET, run_test
from .parser import MiniSyntaxError, parse_program
from .printer import INDENT, format_block, format_method, format_signature, print_program
from .syntax import ClassDecl, EnumDecl, Program, is_trap, trap_body

SUFFIX = ".mo"
TEST_SUFFIX = ".mot"


def _parse(path: str, text: str) -> Tuple[Optional[Program], list]:
    try:
        return parse_program(text), []
    except MiniSyntaxError as exc:
        return None, [make_diagnostic(path, text, "Syntax", exc.line, exc.message)]


def _line_of(text: str, offset: int) -> int:
    return text.count("\n", 0, offset) + 1


def _indent_at(text: str, offset: int) -> str:
    start = text.rfind("\n", 0, offset) + 1
    line = text[start:offset]
    return line[: len(line) - len(line.lstrip())]


def normalize(text: str) -> str:
    """Strip trailing whitespace per line and end with a single newline."""
    lines = [l.rstrip() for l in text.split("\n")]
    while lines and not lines[-1]:
        lines.pop()
    return "\n".join(lines) + "\n" if lines else ""


class MiniOOBackend(Backend):
    name = "minioo"
    language_tag = "minioo"
    source_suffix = SUFFIX
    test_suffix = TEST_SUFFIX

    def __init__(self, step_budget: int = DEFAULT_STEP_BUDGET):
        self.step_budget = step_budget

    # skeleton

    def generate_skeleton(self, model: ModelPackage) -> List[SourceUnit]:
        violations = validate_model(model)
        if violations:
            raise InvalidModel(violations)
        missing = [f"{c.name}.{o.name}" for c, o in model.operations() if o.spec is None]
        if missing:
            raise UnannotatedOperation("operations without a specification: " + ", ".join(missing))
        units = []
        for e in model.enums:
            text = print_program(Program(decls=[sk.enum_decl(e.name, e.literals)]))
            units.append(SourceUnit(sk.unit_path(e.name), e.name, text))
        for c in model.classes:
            text = print_program(Program(decls=[sk.class_decl(model, c)]))
            units.append(SourceUnit(sk.unit_path(c.name), c.name, text))
        factory = sk.factory_decl(model)
        units.append(SourceUnit(sk.unit_path(factory.name), factory.name, print_program(Program(decls=[factory]))))
        return units

    def signatures(self, model: ModelPackage, class_name: str) -> List[str]:
        cls = model.class_named(class_name)
        if cls is None:
            return []
        return [format_signature(m) for m in sk.visible_signatures(model, cls)]

    # parsing

    def parse_code(self, unit: SourceUnit) -> ParseResult:
        prog, diags = _parse(unit.path, unit.text)
        return ParseResult(prog, tuple(diags))

    def _require(self, unit: SourceUnit) -> Program:
        prog, diags = _parse(unit.path, unit.text)
        if prog is None:
            raise UnparseableCompletion(diags)
        return prog

    def method_spans(self, unit: SourceUnit) -> List[Tuple[MethodKey, int, int]]:
        prog = self._require(unit)
        out = []
        for c in prog.classes:
            for m in c.methods:
                out.append(((c.name, m.name, m.arity), _line_of(unit.text, m.span.start), m.end_line))
        return out

    def split_units(self, text: str) -> List[SourceUnit]:
        prog, _ = _parse("src/Main" + SUFFIX, text)
        if prog is None or not prog.decls:
            return [SourceUnit("src/Main" + SUFFIX, "Main", text)]
        header = "".join(f"import {i.name};\n" for i in prog.imports)
        if header:
            header += "\n"
        units = []
        for d in prog.decls:
            body = text[d.span.start : d.span.end]
            units.append(SourceUnit(sk.unit_path(d.name), d.name, normalize(header + body)))
        return units

    # compression

    def compress(self, unit: SourceUnit, keep_docstrings_for: AbstractSet[MethodKey]) -> SourceUnit:
        prog = self._require(unit)
        decls = []
        for d in prog.decls:
            if isinstance(d, EnumDecl):
                decls.append(dataclasses.replace(d, docstring=None))
                continue
            fields = [dataclasses.replace(f, docstring=None, init=None) for f in d.fields]
            methods = []
            for m in d.methods:
                if (d.name, m.name, m.arity) in keep_docstrings_for:
                    methods.append(m)
                else:
                    methods.append(dataclasses.replace(m, docstring=None, body=trap_body()))
            decls.append(dataclasses.replace(d, docstring=None, fields=fields, methods=methods))
        out = Program(list(prog.imports), decls, list(prog.stmts))
        return unit.with_text(print_program(out))

    # merge

    def merge(
        self, base: SourceUnit, completed: SourceUnit, targets: AbstractSet[MethodKey]
    ) -> Tuple[SourceUnit, MergeReport]:
        new = self._require(completed)
        report = MergeReport()
        old, _ = _parse(base.path, base.text)
        if old is None:
            # nothing structured to splice into; take the completion wholesale
            report.rejected_edits.append((base.path, "base does not parse; unit replaced"))
            return base.with_text(normalize(completed.text)), report

        text = base.text
        edits: List[Tuple[int, int, str]] = []
        for c in new.classes:
            bc = old.class_named(c.name)
            if bc is None:
                report.rejected_edits.append((f"class {c.name}", "new declaration outside the editable regions"))
                continue
            edits.extend(self._merge_class(text, bc, c, targets, report))
        for e in new.enums:
            if not any(isinstance(d, EnumDecl) and d.name == e.name for d in old.decls):
                report.rejected_edits.append((f"enum {e.name}", "new declaration outside the editable regions"))
        if new.stmts:
            report.rejected_edits.append((completed.path, "top-level statements ignored"))

        known = {i.name for i in old.imports}
        fresh = []
        for imp in new.imports:
            if imp.name not in known:
                known.add(imp.name)
                fresh.append(imp.name)
        if fresh:
            report.added_imports.extend(fresh)
            lines = "".join(f"import {n};\n" for n in fresh)
            if old.imports:
                edits.append((old.imports[-1].span.end, old.imports[-1].span.end, "\n" + lines.rstrip("\n")))
            else:
                edits.append((0, 0, lines + "\n"))

        for start, end, repl in sorted(edits, key=lambda e: (e[0], e[1]), reverse=True):
            text = text[:start] + repl + text[end:]
        return base.with_text(normalize(text)), report

    def _merge_class(self, text, bc: ClassDecl, c: ClassDecl, targets, report: MergeReport):
        edits = []
        if c.super_name != bc.super_name or c.is_abstract != bc.is_abstract:
            report.rejected_edits.append((f"class {c.name}", "class header change ignored"))
        base_fields = {f.name: f for f in bc.fields}
        for f in c.fields:
            if f.name not in base_fields:
                report.rejected_edits.append((f"{c.name}.{f.name}", "new field ignored"))
            elif f.type != base_fields[f.name].type:
                report.rejected_edits.append((f"{c.name}.{f.name}", "field type change ignored"))
        base_names = {m.name for m in bc.methods}
        helpers = []
        seen = set()
        for m in c.methods:
            key = (c.name, m.name, m.arity)
            if key in seen:
                report.rejected_edits.append((format_key(key), "duplicate definition ignored"))
                continue
            seen.add(key)
            bm = bc.method(m.name, m.arity)
            if bm is not None:
                if key in targets:
                    if m.params != bm.params or m.ret != bm.ret:
                        report.rejected_edits.append((format_key(key), "signature change ignored"))
                    if m.body != bm.body:
                        indent = _indent_at(text, bm.body_span.start)
                        inner = format_block(m.body, indent + INDENT)
                        body = "{\n" + "".join(l + "\n" for l in inner) + indent + "}"
                        edits.append((bm.body_span.start, bm.body_span.end + 1, body))
                        report.replaced_methods.append(key)
                elif m.body != bm.body and not is_trap(m.body):
                    report.rejected_edits.append((format_key(key), "edit to a non-target method ignored"))
            elif m.name in base_names:
                report.rejected_edits.append((format_key(key), "helper name collides with an existing method"))
            else:
                helpers.append(m)
                report.added_helpers.append(key)
        if helpers:
            member = _indent_at(text, bc.span.start) + INDENT
            chunk = "".join("\n" + "".join(l + "\n" for l in format_method(h, member)) for h in helpers)
            if not bc.methods and not bc.fields:
                chunk = chunk.lstrip("\n")
            line_start = text.rfind("\n", 0, bc.close) + 1
            if text[line_start : bc.close].strip():
                # closing brace shares its line with other code
                edits.append((bc.close, bc.close, "\n" + chunk))
            else:
                edits.append((line_start, line_start, chunk))
        return edits

    # checking and running

    def _parsed(self, units: Sequence[SourceUnit]):
        parsed, diags = [], []
        for u in units:
            prog, d = _parse(u.path, u.text)
            diags.extend(d)
            if prog is not None:
                parsed.append(ParsedUnit(u.path, prog, u.text))
        return parsed, diags

    def compile_check(self, units: Sequence[SourceUnit]) -> CompileResult:
        """Parse and type-check ``units`` together.

        Like most compilers, semantic analysis is skipped while any unit has a
        syntax error, so the result then carries syntax diagnostics only.
        """
        parsed, diags = self._parsed(units)
        if diags:
            return CompileResult(tuple(sort_diagnostics(diags)))
        return CompileResult(tuple(Checker(parsed).check()))

    def run_tests(self, units: Sequence[SourceUnit], tests: Sequence[TestProgram]) -> List[TestOutcome]:
        parsed, diags = self._parsed(units)
        if not diags:
            diags = Checker(parsed).check()
        if diags:
            return [TestOutcome(t.test_id, False, "library does not compile") for t in tests]
        outcomes = []
        for t in tests:
            prog, tdiags = _parse(t.test_id, t.text)
            if prog is None:
                outcomes.append(TestOutcome(t.test_id, False, f"test does not compile: {tdiags[0].message}"))
                continue
            tu = ParsedUnit(t.test_id, prog, t.text)
            checker = Checker(parsed)
            tdiags = checker.check([tu])
            if tdiags:
                first = tdiags[0]
                outcomes.append(TestOutcome(t.test_id, False, f"test does not compile: line {first.line}: {first.message}"))
                continue
            outcomes.append(run_test(checker.table, checker.widen, tu, t.test_id, self.step_budget))
        return outcomes

