"""Sample orchestration for the hybrid pipeline and the LLM-only baselines."""

from __future__ import annotations

import logging
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from ..ablation import FULL, AblationFlags
from ..backend.contract import Backend, SourceUnit, TestOutcome, TestProgram
from ..completion import DEFAULT_CONTEXT_BUDGET, class_targets, complete_all
from ..decompose import decompose, passthrough_annotation
from ..llm import LLMError, NoCodeFound, Provider, extract_code_block
from ..model import emit_plantuml, serialize_model
from ..prompting import DEFAULT_TEMPLATES, Prompt, Templates
from ..repair import DEFAULT_MAX_ITERATIONS, RepairOutcome, repair
from ..session import ArtifactSink, LLMSettings, Session
from .bench import Problem
from .metrics import MetricReport, SampleRecord, aggregate

log = logging.getLogger(__name__)

IECOREGEN = "iecoregen"
BASE_R = "base-r"
BASE_R_CD = "base-r-cd"
BASE_R_CD_FIX = "base-r-cd-fix"
BASELINES = (BASE_R, BASE_R_CD, BASE_R_CD_FIX)
APPROACH_KINDS = (IECOREGEN,) + BASELINES


@dataclass(frozen=True)
class ApproachConfig:
    kind: str
    flags: AblationFlags = FULL

    def __post_init__(self):
        if self.kind not in APPROACH_KINDS:
            raise ValueError(f"unknown approach {self.kind!r}")
        if self.kind != IECOREGEN and self.flags.any():
            raise ValueError("ablation flags apply to iecoregen only")

    @property
    def name(self) -> str:
        return self.kind if not self.flags.any() else f"{self.kind}[{self.flags.label()}]"


@dataclass
class RunSettings:
    backend: Backend
    provider: Provider
    llm: LLMSettings = field(default_factory=LLMSettings)
    templates: Templates = DEFAULT_TEMPLATES
    max_fix_iterations: int = DEFAULT_MAX_ITERATIONS
    context_budget: int = DEFAULT_CONTEXT_BUDGET
    # auto: canonical tests in replay mode when shipped, LLM-written otherwise
    test_source: str = "auto"
    provider_mode: str = "replay"


def _session(settings: RunSettings, sample_index: int, root: Optional[Path]) -> Session:
    return Session(settings.provider, settings.llm, sample_index, ArtifactSink(root), settings.templates)


def use_canonical(problem: Problem, settings: RunSettings) -> bool:
    if not problem.canonical or settings.test_source == "llm":
        return False
    return settings.test_source == "canonical" or settings.provider_mode == "replay"


# tests

_TEST_HEADER = re.compile(r"^\s{0,3}#{2,6}\s*test\s*(\d+)\b.*$", re.IGNORECASE | re.MULTILINE)


def _test_blocks(resp: str, expected: int, language_tag: str) -> List[Optional[str]]:
    heads = list(_TEST_HEADER.finditer(resp))
    blocks: List[Optional[str]] = [None] * expected
    if heads:
        for i, h in enumerate(heads):
            end = heads[i + 1].start() if i + 1 < len(heads) else len(resp)
            idx = int(h.group(1)) - 1
            if 0 <= idx < expected and blocks[idx] is None:
                try:
                    blocks[idx] = extract_code_block(resp[h.end() : end], language_tag)
                except NoCodeFound:
                    pass
        return blocks
    fences = re.findall(r"^[ \t]*```[^\n]*\n(.*?)^[ \t]*```", resp, re.MULTILINE | re.DOTALL)
    for i, body in enumerate(fences[:expected]):
        blocks[i] = body
    return blocks


def generate_tests(
    problem: Problem, units: Sequence[SourceUnit], session: Session, backend: Backend, canonical: bool = False
) -> Tuple[List[TestProgram], List[TestOutcome]]:
    """Test programs for a compiled sample plus failed outcomes for specs left without one."""
    if canonical:
        return list(problem.canonical), []
    # full units: the docstrings carry the per-operation specifications
    shown = [u.text.rstrip("\n") for u in units]
    specs = "\n".join(f"{i}. {s}" for i, s in enumerate(problem.test_specs, 1))
    user = session.templates.render(
        "tests",
        language=backend.language_tag,
        language_notes=session.language_notes(backend.language_tag),
        code="\n\n".join(shown),
        test_specs=specs,
    )
    resp = session.ask("tests", Prompt(session.templates.get("system"), user))
    programs, missing = [], []
    for i, body in enumerate(_test_blocks(resp, len(problem.test_specs), backend.language_tag), 1):
        tid = f"tests/test_{i:02d}{backend.test_suffix}"
        if body is None:
            missing.append(TestOutcome(tid, False, "no test program returned for this case"))
        else:
            programs.append(TestProgram(tid, body))
    return programs, missing


def _finish(
    problem: Problem,
    approach: str,
    units: List[SourceUnit],
    session: Session,
    settings: RunSettings,
    reason: Optional[str] = None,
) -> SampleRecord:
    backend, sink = settings.backend, session.sink
    canonical = use_canonical(problem, settings)
    total = len(problem.canonical) if canonical else len(problem.test_specs)
    sink.write_units("", units)
    result = backend.compile_check(units)
    sink.write_json("compile.json", {"ok": result.ok, "diagnostics": [d.to_dict() for d in result.diagnostics]})
    passed_count, outcomes = 0, []
    if result.ok:
        programs, missing = generate_tests(problem, units, session, backend, canonical)
        for t in programs:
            sink.write_text(t.test_id, t.text)
        outcomes = backend.run_tests(units, programs) + missing
        passed_count = sum(o.passed for o in outcomes)
    sink.write_json("outcomes.json", [o.to_dict() for o in outcomes])
    record = SampleRecord(
        problem.id,
        approach,
        session.sample_index,
        result.ok,
        total,
        passed_count if result.ok else 0,
        result.ok and passed_count == total,
        reason if reason else (None if result.ok else "compilation failed"),
    )
    sink.write_json("record.json", record.to_dict())
    return record


def _write_repair(sink: ArtifactSink, rep: RepairOutcome) -> None:
    sink.write_json(
        "repair.json",
        {
            "iterations": rep.iterations,
            "history": [list(h) for h in rep.history],
            "ok": rep.result.ok,
            "skipped": rep.skipped,
            "error": rep.error,
        },
    )


def run_iecoregen_sample(
    problem: Problem, flags: AblationFlags, session: Session, settings: RunSettings, approach: str = IECOREGEN
) -> Tuple[List[SourceUnit], SampleRecord]:
    backend, sink = settings.backend, session.sink
    model = problem.model()
    if flags.no_decompose:
        annotated = passthrough_annotation(model, problem.requirement)
    else:
        annotated, result = decompose(model, problem.requirement, session)
        sink.write_json("decomposition.json", {"unmatched": result.unmatched, "warnings": result.warnings})
    sink.write_text("model.cmdl", serialize_model(annotated))
    units = backend.generate_skeleton(annotated)
    sink.write_units("skeleton", units)
    units, outcomes = complete_all(annotated, units, session, backend, flags, settings.context_budget)
    sink.write_json(
        "completion.json",
        [{"class": o.class_id, "merged": o.merged, "report": o.report.to_dict() if o.report else None, "warnings": o.warnings} for o in outcomes],
    )
    sink.write_units("completed", units)
    targets = {c.name: class_targets(annotated, c.name) for c in annotated.classes}
    rep = repair(
        units,
        session,
        backend,
        0 if flags.no_fix else settings.max_fix_iterations,
        annotated,
        targets,
        include_context=not flags.no_context,
        budget=settings.context_budget,
    )
    _write_repair(sink, rep)
    if rep.error:
        raise LLMError(rep.error)
    return rep.units, _finish(problem, approach, rep.units, session, settings)


def baseline_prompt(problem: Problem, kind: str, session: Session, backend: Backend) -> Prompt:
    diagram = ""
    if kind in (BASE_R_CD, BASE_R_CD_FIX):
        diagram = f"\nClass diagram (PlantUML):\n{emit_plantuml(problem.model())}\n"
    user = session.templates.render(
        "baseline",
        language=backend.language_tag,
        language_notes=session.language_notes(backend.language_tag),
        requirement=problem.requirement,
        diagram_section=diagram,
    )
    return Prompt(session.templates.get("system"), user)


def run_baseline_sample(
    problem: Problem, kind: str, session: Session, settings: RunSettings
) -> Tuple[List[SourceUnit], SampleRecord]:
    if kind not in BASELINES:
        raise ValueError(f"{kind!r} is not a baseline")
    backend = settings.backend
    resp = session.ask("baseline", baseline_prompt(problem, kind, session, backend))

    def parses(text: str) -> bool:
        return backend.parse_code(SourceUnit("src/Main" + backend.source_suffix, "Main", text)).ok

    try:
        code = extract_code_block(resp, backend.language_tag, parses)
    except NoCodeFound:
        return [], _no_code(problem, kind, session, settings)
    units = backend.split_units(code)
    if kind == BASE_R_CD_FIX:
        rep = repair(units, session, backend, settings.max_fix_iterations, include_context=False)
        _write_repair(session.sink, rep)
        if rep.error:
            raise LLMError(rep.error)
        units = rep.units
    return units, _finish(problem, kind, units, session, settings)


def _no_code(problem: Problem, approach: str, session: Session, settings: RunSettings) -> SampleRecord:
    total = len(problem.canonical) if use_canonical(problem, settings) else len(problem.test_specs)
    record = SampleRecord(problem.id, approach, session.sample_index, False, total, 0, False, "no code in response")
    session.sink.write_json("record.json", record.to_dict())
    return record


def run_sample(
    problem: Problem, approach: ApproachConfig, settings: RunSettings, sample_index: int, root: Optional[Path]
) -> SampleRecord:
    """One sample end to end; provider failures become a failed record."""
    session = _session(settings, sample_index, root)
    try:
        if approach.kind == IECOREGEN:
            _, record = run_iecoregen_sample(problem, approach.flags, session, settings, approach.name)
        else:
            _, record = run_baseline_sample(problem, approach.kind, session, settings)
    except LLMError as exc:
        log.error("%s/%s/%d: %s", approach.name, problem.id, sample_index, exc)
        total = len(problem.canonical) if use_canonical(problem, settings) else len(problem.test_specs)
        record = SampleRecord(problem.id, approach.name, sample_index, False, total, 0, False, f"provider failure: {exc}")
        session.sink.write_json("record.json", record.to_dict())
    return record


def _dirname(name: str) -> str:
    return re.sub(r"[^\w.+-]", "_", name).strip("_")


def run_eval(
    problems: Sequence[Problem],
    approaches: Sequence[ApproachConfig],
    n: int,
    ks: Sequence[int],
    settings: RunSettings,
    workspace: Optional[Path] = None,
    jobs: int = 1,
) -> MetricReport:
    """Every (approach, problem, sample) in parallel; results are ordered deterministically."""
    work = [(a, p, i) for a in approaches for p in problems for i in range(n)]

    def one(item):
        a, p, i = item
        root = Path(workspace) / _dirname(a.name) / p.id / str(i) if workspace is not None else None
        return run_sample(p, a, settings, i, root)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(one, work))
    else:
        records = [one(w) for w in work]
    report = aggregate(records, ks, n)
    # keep the caller's approach order even if a name never produced a record
    report.approaches = [a.name for a in approaches if a.name in report.approaches]
    return report


def provider_failures(records: Sequence[SampleRecord]) -> Dict[str, str]:
    return {f"{r.approach}/{r.problem_id}/{r.sample_index}": r.reason for r in records if r.reason and r.reason.startswith("provider failure")}
