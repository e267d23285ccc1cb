"""Class-level completion of unimplemented operations."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from .ablation import FULL, AblationFlags
from .backend.contract import Backend, MergeReport, MethodKey, SourceUnit, UnparseableCompletion
from .llm import NoCodeFound, extract_code_block
from .model import ModelPackage, UnknownClass, related_classes
from .prompting import Prompt

log = logging.getLogger(__name__)

DEFAULT_CONTEXT_BUDGET = 8000
TRUNCATED = "…truncated"


@dataclass(frozen=True)
class CompletionTask:
    class_id: str
    unit: SourceUnit
    targets: FrozenSet[MethodKey]
    context_text: str
    target_lines: Tuple[str, ...] = ()


@dataclass
class ClassOutcome:
    class_id: str
    unit: SourceUnit
    report: Optional[MergeReport]
    warnings: List[str] = field(default_factory=list)

    @property
    def merged(self) -> bool:
        return self.report is not None


def select_targets(m: ModelPackage) -> List[str]:
    return [c.name for c in m.classes if c.operations]


def class_targets(m: ModelPackage, class_id: str) -> FrozenSet[MethodKey]:
    cls = m.class_named(class_id)
    if cls is None:
        return frozenset()
    return frozenset((cls.name, o.name, o.arity) for o in cls.operations)


def target_lines(m: ModelPackage, class_id: str) -> Tuple[str, ...]:
    cls = m.class_named(class_id)
    return tuple(
        f"- {o.name}({', '.join(f'{n}: {t}' for n, t in o.params)}): {o.return_type}" for o in cls.operations
    )


def build_context(m: ModelPackage, class_id: str, backend: Backend, budget: int = DEFAULT_CONTEXT_BUDGET) -> str:
    """Signatures of the related classes, ``class <Name>`` then one line per method.

    Text beyond ``budget`` characters is cut and the marker line appended.
    """
    if m.class_named(class_id) is None:
        raise UnknownClass(class_id)
    lines: List[str] = []
    seen = set()
    for c in related_classes(m, class_id):
        lines.append(f"class {c.name}")
        for sig in backend.signatures(m, c.name):
            if (c.name, sig) not in seen:
                seen.add((c.name, sig))
                lines.append("  " + sig)
    text = "\n".join(lines)
    if len(text) > budget:
        text = text[:budget].rstrip() + "\n" + TRUNCATED
    return text


def make_task(m: ModelPackage, unit: SourceUnit, backend: Backend, budget: int = DEFAULT_CONTEXT_BUDGET) -> CompletionTask:
    targets = class_targets(m, unit.class_id)
    if not targets:
        raise ValueError(f"class {unit.class_id} has no operations to complete")
    return CompletionTask(unit.class_id, unit, targets, build_context(m, unit.class_id, backend, budget), target_lines(m, unit.class_id))


def context_section(context_text: str, flags: AblationFlags) -> str:
    if flags.no_context:
        return ""
    body = context_text if context_text else "(no related classes)"
    return f"\nRelated classes (public method signatures):\n```\n{body}\n```\n"


def build_completion_prompt(task: CompletionTask, flags: AblationFlags, backend: Backend, session) -> Prompt:
    if flags.no_compress:
        code, title = task.unit.text, f"Class `{task.class_id}`"
    else:
        code, title = backend.compress(task.unit, task.targets).text, f"Class `{task.class_id}` (compressed)"
    user = session.templates.render(
        "complete",
        language=backend.language_tag,
        class_name=task.class_id,
        language_notes=session.language_notes(backend.language_tag),
        code_title=title,
        code=code.rstrip("\n"),
        context_section=context_section(task.context_text, flags),
        targets="\n".join(task.target_lines) or "\n".join(f"- {k[1]}/{k[2]}" for k in sorted(task.targets)),
    )
    return Prompt(session.templates.get("system"), user)


def code_from_response(resp: str, unit: SourceUnit, backend: Backend) -> SourceUnit:
    """Extract and parse the code in a reply; raises NoCodeFound or UnparseableCompletion."""

    def parses(text: str) -> bool:
        return backend.parse_code(unit.with_text(text)).ok

    code = extract_code_block(resp, backend.language_tag, parses)
    candidate = unit.with_text(code)
    parsed = backend.parse_code(candidate)
    if not parsed.ok:
        raise UnparseableCompletion(parsed.diagnostics)
    return candidate


def retry_prompt(prompt: Prompt, reason: str) -> Prompt:
    note = (
        "\n\nYour previous reply could not be used: "
        + reason
        + "\nReply again with the whole class in a single fenced code block."
    )
    return Prompt(prompt.system, prompt.user + note)


def _failure(exc: Exception) -> str:
    if isinstance(exc, UnparseableCompletion):
        return "the code does not parse (" + "; ".join(f"line {d.line}: {d.message}" for d in exc.diagnostics) + ")"
    return "no code block was found"


def complete_class(task: CompletionTask, session, backend: Backend, flags: AblationFlags = FULL) -> ClassOutcome:
    """One completion call (plus at most one re-ask when the reply is unusable), then merge."""
    prompt = build_completion_prompt(task, flags, backend, session)
    stage = f"complete-{task.class_id}"
    resp = session.ask(stage, prompt)
    try:
        completed = code_from_response(resp, task.unit, backend)
    except (NoCodeFound, UnparseableCompletion) as first:
        resp = session.ask(stage + "-retry", retry_prompt(prompt, _failure(first)))
        try:
            completed = code_from_response(resp, task.unit, backend)
        except (NoCodeFound, UnparseableCompletion) as second:
            msg = f"{task.class_id}: completion unusable after retry: {_failure(second)}"
            log.warning(msg)
            return ClassOutcome(task.class_id, task.unit, None, [msg])
    merged, report = backend.merge(task.unit, completed, task.targets)
    warnings = [f"{task.class_id}: rejected edit at {loc}: {why}" for loc, why in report.rejected_edits]
    return ClassOutcome(task.class_id, merged, report, warnings)


def complete_all(
    m: ModelPackage,
    units: Sequence[SourceUnit],
    session,
    backend: Backend,
    flags: AblationFlags = FULL,
    budget: int = DEFAULT_CONTEXT_BUDGET,
) -> Tuple[List[SourceUnit], List[ClassOutcome]]:
    """Complete each class that owns operations, in declaration order."""
    current: Dict[str, SourceUnit] = {u.class_id: u for u in units}
    outcomes = []
    for class_id in select_targets(m):
        task = make_task(m, current[class_id], backend, budget)
        outcome = complete_class(task, session, backend, flags)
        current[class_id] = outcome.unit
        outcomes.append(outcome)
    return [current[u.class_id] for u in units], outcomes
