"""Random completions for exercising the structured merge."""

import dataclasses
import random

from hybridgen.backend import SourceUnit, format_key
from hybridgen.minioo import parse_program, print_program
from hybridgen.minioo.syntax import ClassDecl, Lit, MethodDecl, Return, TypeNode, VarDecl, is_trap


def random_body(rng: random.Random):
    stmts = [VarDecl(f"v{i}", TypeNode("Int"), Lit(rng.randint(0, 999), "int")) for i in range(rng.randint(1, 3))]
    if rng.random() < 0.3:
        stmts.append(Return(None))
    return stmts


def merge_case(rng: random.Random, unit: SourceUnit):
    """Build (targets, completion, edited non-target keys) for one class unit."""
    prog = parse_program(unit.text)
    cls = next(d for d in prog.decls if isinstance(d, ClassDecl))
    ops = [m for m in cls.methods if is_trap(m.body)]
    targets = {(cls.name, m.name, m.arity) for m in ops if rng.random() < 0.5}
    edited = set()
    methods = []
    for m in cls.methods:
        key = (cls.name, m.name, m.arity)
        roll = rng.random()
        if key in targets:
            methods.append(dataclasses.replace(m, body=random_body(rng)))
        elif roll < 0.5:
            methods.append(dataclasses.replace(m, body=random_body(rng), docstring=None))
            edited.add(key)
        elif roll < 0.6:
            continue  # the completion may leave methods out
        else:
            methods.append(m)
    rng.shuffle(methods)
    if rng.random() < 0.3:
        methods.append(MethodDecl(f"helper{rng.randint(0, 99)}x", [], TypeNode("Void"), random_body(rng)))
    done = dataclasses.replace(cls, methods=methods)
    text = print_program(dataclasses.replace(prog, decls=[done if d is cls else d for d in prog.decls]))
    return targets, unit.with_text(text), edited


def check_merge(backend, unit, targets, completed, edited):
    """Problems found in one merge; an empty list means the case holds."""
    merged, report = backend.merge(unit, completed, targets)
    base = next(d for d in parse_program(unit.text).decls if isinstance(d, ClassDecl))
    out = next(d for d in parse_program(merged.text).decls if d.name == base.name)
    problems = []
    for m in base.methods:
        key = (base.name, m.name, m.arity)
        got = out.method(m.name, m.arity)
        if got is None:
            problems.append(f"{format_key(key)} disappeared")
        elif key not in targets and (got.body != m.body or got.params != m.params or got.ret != m.ret):
            problems.append(f"{format_key(key)} altered although not a target")
    rejected = {r[0] for r in report.rejected_edits}
    problems += [f"{format_key(k)} edit not reported" for k in edited if format_key(k) not in rejected]
    return problems
