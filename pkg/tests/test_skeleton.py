import pytest

from conftest import BENCH, FIXTURES, annotated_model, skeleton_of
from hybridgen.backend import UnannotatedOperation
from hybridgen.minioo import parse_program
from hybridgen.minioo.syntax import ClassDecl, is_trap
from hybridgen.model import InvalidModel, read_model_file

PROBLEM_IDS = sorted(p.name for p in BENCH.iterdir() if (p / "manifest.json").is_file())


def _classes(units):
    for u in units:
        for d in parse_program(u.text).decls:
            if isinstance(d, ClassDecl):
                yield d


@pytest.mark.parametrize("pid", PROBLEM_IDS)
def test_skeleton_is_sound(problems, backend, pid):
    problem = next(p for p in problems if p.id == pid)
    model = annotated_model(problem)
    units = backend.generate_skeleton(model)
    assert backend.compile_check(units).ok
    decls = {c.name: c for c in _classes(units)}
    for cls in model.classes:
        decl = decls[cls.name]
        traps = [m.name for m in decl.methods if is_trap(m.body)]
        assert sorted(traps) == sorted(o.name for o in cls.operations)
        for a in cls.attributes:
            cap = a.name[0].upper() + a.name[1:]
            getter = ("is" if a.type.kind == "Bool" and not a.is_many else "get") + cap
            assert decl.method(getter, 0) is not None, getter
            if not a.is_many:
                assert decl.method("set" + cap, 1) is not None


def test_skeleton_covers_model(problems, backend):
    sizes = []
    for problem in problems:
        model = problem.model()
        units = skeleton_of(problem, backend)
        names = {u.class_id for u in units}
        factory = model.name[:1].upper() + model.name[1:] + "Factory"
        assert names == {c.name for c in model.classes} | {e.name for e in model.enums} | {factory}
        sizes.append(len(model.classes))
    assert min(sizes) == 1 and max(sizes) == 11


def test_factory_creates_concrete_classes(backend):
    model = read_model_file(BENCH / "university" / "model.cmdl")
    from hybridgen.decompose import passthrough_annotation

    units = backend.generate_skeleton(passthrough_annotation(model, "x"))
    factory = next(u for u in units if u.class_id == "UniFactory")
    assert "createStudent" in factory.text
    assert "createPerson" not in factory.text  # abstract


def test_skeleton_is_deterministic(employee, backend):
    assert skeleton_of(employee, backend) == skeleton_of(employee, backend)


def test_skeleton_requires_annotations(employee_model, backend):
    with pytest.raises(UnannotatedOperation):
        backend.generate_skeleton(employee_model)


def test_skeleton_rejects_invalid_models(backend):
    with pytest.raises(InvalidModel):
        backend.generate_skeleton(read_model_file(FIXTURES / "models" / "cyclic.cmdl"))


def test_spec_rendered_into_doc(employee, backend):
    from hybridgen.model import MethodSpec, attach_spec

    model = attach_spec(
        annotated_model(employee),
        "Employee.promote",
        MethodSpec("Promote.", "Check level.", (), "", ("the employee is active",), ("level is SENIOR",)),
    )
    text = next(u.text for u in backend.generate_skeleton(model) if u.class_id == "Employee")
    assert "the employee is active" in text and "level is SENIOR" in text
