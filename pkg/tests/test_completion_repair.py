import pytest

from conftest import BENCH, FIXTURES, annotated_model, typo_units
from hybridgen.ablation import AblationFlags
from hybridgen.backend import Diagnostic, SourceUnit
from hybridgen.completion import (
    TRUNCATED,
    build_context,
    complete_all,
    complete_class,
    make_task,
)
from hybridgen.llm import LLMError, ReplayProvider, ScriptedProvider
from hybridgen.model import UnknownClass
from hybridgen.repair import UnknownPath, group_diagnostics, repair
from hybridgen.session import LLMSettings, Session

EMPLOYEE_DONE = """```minioo
class Employee {
  def promote(): Void { this.level = Level.SENIOR; }
  def yearsOfService(currentDate: Date): Int { return daysBetween(this.hireDate, currentDate) / 365; }
}
```"""


@pytest.fixture
def university():
    from hybridgen.evaluation import load_problem

    return load_problem(BENCH / "university")


def test_context_lists_related_signatures(university, backend):
    model = annotated_model(university)
    text = build_context(model, "Student", backend)
    assert text.startswith("class Person\n")
    assert "  def getName(): String" in text
    assert "class Enrollment" in text
    assert "class Student" not in text


def test_context_budget(university, backend):
    model = annotated_model(university)
    full = build_context(model, "Student", backend)
    cut = build_context(model, "Student", backend, budget=50)
    assert cut.endswith("\n" + TRUNCATED)
    assert full.startswith(cut[: -len(TRUNCATED) - 1])
    assert len(cut) <= 50 + len(TRUNCATED) + 1
    with pytest.raises(UnknownClass):
        build_context(model, "Nope", backend)


def test_complete_class_merges_targets(employee, backend):
    model = annotated_model(employee)
    unit = next(u for u in backend.generate_skeleton(model) if u.class_id == "Employee")
    session = Session(ScriptedProvider(lambda r: EMPLOYEE_DONE))
    outcome = complete_class(make_task(model, unit, backend), session, backend)
    assert outcome.merged
    assert sorted(k[1] for k in outcome.report.replaced_methods) == ["promote", "yearsOfService"]
    assert "this.level = Level.SENIOR;" in outcome.unit.text
    assert backend.compile_check([outcome.unit] + [u for u in backend.generate_skeleton(model) if u.class_id != "Employee"]).ok


def test_complete_class_retries_once(employee, backend):
    model = annotated_model(employee)
    unit = next(u for u in backend.generate_skeleton(model) if u.class_id == "Employee")
    replies = iter(["Sorry, here is my reasoning only.", EMPLOYEE_DONE])
    session = Session(ScriptedProvider(lambda r: next(replies)))
    outcome = complete_class(make_task(model, unit, backend), session, backend)
    assert outcome.merged
    assert session.stages() == ["complete-Employee", "complete-Employee-retry"]
    assert "could not be used: no code block was found" in session.calls[1].prompt.user


def test_complete_class_gives_up(employee, backend):
    model = annotated_model(employee)
    unit = next(u for u in backend.generate_skeleton(model) if u.class_id == "Employee")
    session = Session(ScriptedProvider(lambda r: "```minioo\nclass Employee {\n```"))
    outcome = complete_class(make_task(model, unit, backend), session, backend)
    assert not outcome.merged and outcome.unit == unit
    assert "unusable after retry" in outcome.warnings[0]


def test_prompt_variants(employee, backend):
    model = annotated_model(employee)
    unit = next(u for u in backend.generate_skeleton(model) if u.class_id == "Employee")
    task = make_task(model, unit, backend)
    prompts = {}
    for flags in (AblationFlags(), AblationFlags(no_compress=True), AblationFlags(no_context=True)):
        session = Session(ScriptedProvider(lambda r: EMPLOYEE_DONE))
        complete_class(task, session, backend, flags)
        prompts[flags.label()] = session.calls[0].prompt.user
    assert "(compressed)" in prompts["full"] and unit.text.rstrip("\n") not in prompts["full"]
    assert unit.text.rstrip("\n") in prompts["no-compress"]
    assert "Related classes" in prompts["full"] and "Related classes" not in prompts["no-context"]
    assert "- promote(): Void" in prompts["full"]


def test_complete_all_touches_only_classes_with_operations(problems, backend):
    shop = next(p for p in problems if p.id == "shop")
    model = annotated_model(shop)
    units = backend.generate_skeleton(model)
    session = Session(ScriptedProvider(lambda r: "```minioo\nclass X { }\n```"))
    out, outcomes = complete_all(model, units, session, backend)
    assert [o.class_id for o in outcomes] == [c.name for c in model.classes if c.operations]
    assert [u.path for u in out] == [u.path for u in units]


def test_typo_fixture_converges(backend, no_network):
    units = typo_units()
    first = backend.compile_check(units)
    assert [d.kind for d in first.diagnostics] == ["UnresolvedSymbol"]
    session = Session(ReplayProvider(FIXTURES / "typo" / "fix.jsonl"), LLMSettings("reference-fixture", 0.2))
    outcome = repair(units, session, backend, 3)
    assert outcome.result.ok and outcome.error is None
    counts = [n for _, n in outcome.history]
    assert counts[0] > 0 and counts[-1] == 0
    assert all(a > b for a, b in zip(counts, counts[1:]))
    assert outcome.iterations <= 3
    assert session.stages() == ["fix1-Employee"]
    fix_prompt = session.calls[0].prompt.user
    assert "kind: UnresolvedSymbol" in fix_prompt and "- yearsOfService/1" in fix_prompt


def test_repair_respects_bound_and_zero(backend):
    units = typo_units()
    session = Session(ScriptedProvider(lambda r: "no code"))
    outcome = repair(units, session, backend, 2)
    assert [i for i, _ in outcome.history] == [0, 1, 2]
    assert len(outcome.skipped) == 2 and not outcome.result.ok
    zero = repair(units, Session(ScriptedProvider(lambda r: "")), backend, 0)
    assert zero.history == [(0, 1)] and zero.iterations == 0
    with pytest.raises(ValueError):
        repair(units, session, backend, -1)


def test_repair_stops_on_provider_failure(backend):
    def boom(req):
        raise LLMError("offline")

    outcome = repair(typo_units(), Session(ScriptedProvider(boom)), backend, 3)
    assert outcome.error.startswith("provider failure during repair")
    assert not outcome.result.ok


def test_group_diagnostics(backend):
    unit = SourceUnit("src/A.mo", "A", "import Nope;\nclass A {\n  def f(): Int {\n    return 1;\n  }\n  def g(): Int {\n    return 2;\n  }\n}\n")
    in_f = Diagnostic("src/A.mo", "TypeMismatch", 4, "    return 1;", "x")
    header = Diagnostic("src/A.mo", "UnresolvedSymbol", 1, "import Nope;", "y")
    groups = group_diagnostics([in_f], [unit], backend)
    assert groups["A"][1] == {("A", "f", 0)}
    groups = group_diagnostics([header], [unit], backend, {"A": frozenset({("A", "g", 0)})})
    assert groups["A"][1] == {("A", "g", 0)}
    groups = group_diagnostics([header], [unit], backend)
    assert groups["A"][1] == {("A", "f", 0), ("A", "g", 0)}
    with pytest.raises(UnknownPath):
        group_diagnostics([Diagnostic("src/B.mo", "Other", 1, "", "z")], [unit], backend)
