"""Compile, ask for fixes per errored class, merge, repeat up to a bound."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Mapping, Optional, Sequence, Set, Tuple

from .ablation import AblationFlags
from .backend.contract import (
    Backend,
    BackendError,
    CompileResult,
    Diagnostic,
    MethodKey,
    SourceUnit,
    UnparseableCompletion,
)
from .completion import DEFAULT_CONTEXT_BUDGET, build_context, code_from_response, context_section
from .llm import LLMError, NoCodeFound
from .model import ModelPackage
from .prompting import Prompt

log = logging.getLogger(__name__)

DEFAULT_MAX_ITERATIONS = 3


class UnknownPath(BackendError):
    pass


@dataclass
class RepairOutcome:
    units: List[SourceUnit]
    result: CompileResult
    history: List[Tuple[int, int]]
    iterations: int = 0
    error: Optional[str] = None
    skipped: List[str] = field(default_factory=list)


def group_diagnostics(
    ds: Sequence[Diagnostic],
    units: Sequence[SourceUnit],
    backend: Backend,
    class_targets: Optional[Mapping[str, FrozenSet[MethodKey]]] = None,
) -> Dict[str, Tuple[List[Diagnostic], Set[MethodKey]]]:
    """Bucket diagnostics by unit and find the methods they point into.

    A diagnostic outside every method body (imports, fields, the class header)
    implicates all of the class's targets; without a target map, all methods.
    """
    by_path = {u.path: u for u in units}
    groups: Dict[str, Tuple[List[Diagnostic], Set[MethodKey]]] = {}
    spans_cache: Dict[str, list] = {}
    for d in ds:
        unit = by_path.get(d.path)
        if unit is None:
            raise UnknownPath(d.path)
        if unit.path not in spans_cache:
            try:
                spans_cache[unit.path] = backend.method_spans(unit)
            except BackendError:
                spans_cache[unit.path] = []
        spans = spans_cache[unit.path]
        diags, keys = groups.setdefault(unit.class_id, ([], set()))
        diags.append(d)
        hit = [k for k, first, last in spans if first <= d.line <= last]
        if hit:
            keys.update(hit)
        elif class_targets is not None and class_targets.get(unit.class_id):
            keys.update(class_targets[unit.class_id])
        else:
            keys.update(k for k, _, _ in spans)
    return groups


def render_diagnostics(ds: Sequence[Diagnostic]) -> str:
    out = []
    for d in ds:
        out.append(
            f"- file: {d.path}\n"
            f"  kind: {d.kind}\n"
            f"  line: {d.line}\n"
            f"  source: {d.source_line}\n"
            f"  message: {d.message}"
        )
    return "\n".join(out)


def build_fix_prompt(
    class_id: str,
    compressed_unit: SourceUnit,
    diagnostics: Sequence[Diagnostic],
    context_text: str,
    backend: Backend,
    session,
    targets: Sequence[MethodKey] = (),
    include_context: bool = True,
) -> Prompt:
    if not diagnostics:
        raise ValueError(f"no diagnostics to fix for {class_id}")
    user = session.templates.render(
        "fix",
        language=backend.language_tag,
        class_name=class_id,
        language_notes=session.language_notes(backend.language_tag),
        code=compressed_unit.text.rstrip("\n"),
        diagnostics=render_diagnostics(diagnostics),
        context_section=context_section(context_text, AblationFlags(no_context=not include_context)),
        targets="\n".join(f"- {k[1]}/{k[2]}" for k in sorted(targets)) or "- (whole file)",
    )
    return Prompt(session.templates.get("system"), user)


def repair(
    units: Sequence[SourceUnit],
    session,
    backend: Backend,
    max_iterations: int = DEFAULT_MAX_ITERATIONS,
    model: Optional[ModelPackage] = None,
    class_targets: Optional[Mapping[str, FrozenSet[MethodKey]]] = None,
    include_context: bool = True,
    budget: int = DEFAULT_CONTEXT_BUDGET,
) -> RepairOutcome:
    if max_iterations < 0:
        raise ValueError("max_iterations must be >= 0")
    units = list(units)
    history: List[Tuple[int, int]] = []
    outcome = RepairOutcome(units, CompileResult(), history)
    iteration = 0
    while True:
        result = backend.compile_check(units)
        history.append((iteration, len(result.diagnostics)))
        outcome.result = result
        if result.ok or iteration >= max_iterations:
            break
        iteration += 1
        outcome.iterations = iteration
        groups = group_diagnostics(result.diagnostics, units, backend, class_targets)
        index = {u.class_id: i for i, u in enumerate(units)}
        for class_id in sorted(groups, key=lambda c: index[c]):
            diags, keys = groups[class_id]
            unit = units[index[class_id]]
            if backend.parse_code(unit).ok:
                shown = backend.compress(unit, frozenset(keys))
            else:
                shown = unit
            context = ""
            if model is not None and model.class_named(class_id) is not None:
                context = build_context(model, class_id, backend, budget)
            prompt = build_fix_prompt(class_id, shown, diags, context, backend, session, sorted(keys), include_context)
            try:
                resp = session.ask(f"fix{iteration}-{class_id}", prompt)
            except LLMError as exc:
                outcome.error = f"provider failure during repair: {exc}"
                log.error(outcome.error)
                outcome.units = units
                return outcome
            try:
                fixed = code_from_response(resp, unit, backend)
            except (NoCodeFound, UnparseableCompletion) as exc:
                outcome.skipped.append(f"iteration {iteration}: {class_id}: {exc}")
                continue
            merged, _ = backend.merge(unit, fixed, frozenset(keys))
            units[index[class_id]] = merged
    outcome.units = units
    return outcome
