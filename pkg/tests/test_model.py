import dataclasses

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import BENCH, FIXTURES
from strategies import models
from hybridgen.model import (
    AttributeDef,
    ClassDef,
    InvalidModel,
    MethodSpec,
    ModelPackage,
    ModelSyntaxError,
    OperationDef,
    ReferenceDef,
    TypeRef,
    UnknownClass,
    UnknownOperation,
    UnresolvedType,
    attach_spec,
    emit_plantuml,
    find_operation,
    parse_model,
    read_model_file,
    related_classes,
    serialize_model,
    validate_model,
)

SAMPLE = """
package hr {
  enum Level { JUNIOR, SENIOR }
  class Employee {
    attr name: String;
    attr salary: Float = 1000.5;
    attr level: Level = JUNIOR;
    attr active: Bool = true;
    attr tags: String[*];
    ref manager: Employee;
    op raise(percent: Float): Void;
    op bonus(at: Date): Float {
      summary "Bonus at a date.";
      algorithm "Ten percent after ten years.";
      input at "the date";
      output "the amount";
      pre "at is after the hire date";
      post "nothing changes";
    }
  }
}
"""


def kinds(m):
    return [v.kind for v in validate_model(m)]


def test_parse_sample():
    m = parse_model(SAMPLE.replace("op raise", "op grow"))
    emp = m.class_named("Employee")
    assert [a.name for a in emp.attributes] == ["name", "salary", "level", "active", "tags"]
    assert emp.attributes[2].type == TypeRef.enum("Level")
    assert emp.attributes[2].default == "JUNIOR"
    assert emp.attributes[4].is_many
    spec = emp.operations[1].spec
    assert spec.inputs == (("at", "the date"),)
    assert spec.preconditions == ("at is after the hire date",)


def test_reserved_operation_name_is_a_violation():
    m = parse_model(SAMPLE)
    assert "ReservedName" in kinds(m)


def test_syntax_error_carries_line():
    with pytest.raises(ModelSyntaxError) as info:
        parse_model("package p {\n  class A {\n    attr x Int;\n  }\n}\n")
    assert info.value.line == 3


@pytest.mark.parametrize(
    "text",
    [
        "package p { class A extends B, C { } }",
        "package p { class A { attr x: Int } }",
        "package p { class A { } ",
        "package p { class A { op f(: Int); } }",
    ],
)
def test_malformed_models_are_rejected(text):
    with pytest.raises(ModelSyntaxError):
        parse_model(text)


def test_unknown_type_fails_resolution():
    with pytest.raises(UnresolvedType):
        parse_model("package p { class A { attr x: Money; } }")


def test_bench_models_are_valid():
    for model in sorted(BENCH.glob("*/model.cmdl")):
        assert validate_model(read_model_file(model)) == [], model


@pytest.mark.parametrize("name,kind", [("cyclic", "CyclicInheritance"), ("opposite", "OppositeAsymmetry")])
def test_invalid_fixtures_report_exactly_one_violation(name, kind):
    m = read_model_file(FIXTURES / "models" / f"{name}.cmdl")
    assert kinds(m) == [kind]


def test_duplicate_and_clash_rules():
    m = parse_model(
        """
        package p {
          class A { attr x: Int; op getX(): Int; op f(a: Int, a: Int); }
          class B extends A { attr x: String; }
          class PFactory { }
        }
        """
    )
    found = kinds(m)
    for kind in ("AccessorClash", "DuplicateParameter", "DuplicateFeature", "DuplicateName"):
        assert kind in found


def test_containment_on_both_ends():
    m = parse_model(
        "package p { class A { ref b: B containment opposite a; } class B { ref a: A containment opposite b; } }"
    )
    assert "ContainmentOpposite" in kinds(m)


def test_bad_default_and_many_default():
    m = ModelPackage(
        "p",
        (
            ClassDef(
                "A",
                attributes=(
                    AttributeDef("n", TypeRef.prim("Int"), default="x"),
                    AttributeDef("xs", TypeRef.prim("Int"), is_many=True, default=1),
                ),
            ),
        ),
    )
    assert sorted(kinds(m)) == ["InvalidDefault", "ManyWithDefault"]


def test_override_mismatch():
    m = parse_model("package p { class A { op f(x: Int): Int; } class B extends A { op f(x: Float): Int; } }")
    assert kinds(m) == ["OverrideMismatch"]


def test_find_and_attach_spec(employee_model):
    cls, op = find_operation(employee_model, "Employee.raiseSalary(1)")
    assert (cls.name, op.name) == ("Employee", "raiseSalary")
    with pytest.raises(UnknownOperation):
        find_operation(employee_model, "Employee.nothing")
    spec = MethodSpec("Raise it.", inputs=(("percent", "how much"), ("ghost", "dropped")))
    annotated = attach_spec(employee_model, "Employee.raiseSalary", spec)
    _, op = find_operation(annotated, "Employee.raiseSalary")
    assert op.spec.inputs == (("percent", "how much"),)
    # the original is untouched
    assert find_operation(employee_model, "Employee.raiseSalary")[1].spec is None
    with pytest.raises(ValueError):
        attach_spec(employee_model, "Employee.raiseSalary", MethodSpec("  "))


def test_related_classes_order():
    m = read_model_file(BENCH / "university" / "model.cmdl")
    names = [c.name for c in related_classes(m, "Student")]
    assert names[0] == "Person"
    assert "Enrollment" in names
    with pytest.raises(UnknownClass):
        related_classes(m, "Nope")


def test_plantuml_lists_classes_and_links():
    m = read_model_file(BENCH / "airline" / "model.cmdl")
    uml = emit_plantuml(m)
    assert uml.startswith("@startuml\n") and uml.endswith("@enduml\n")
    assert "class Flight {" in uml
    assert "+book(passenger : String, seats : Int) : Booking" in uml
    assert 'Airline *--> "0..*" Flight : flights' in uml


def test_plantuml_refuses_invalid_models():
    with pytest.raises(InvalidModel):
        emit_plantuml(read_model_file(FIXTURES / "models" / "cyclic.cmdl"))


def test_serialize_round_trip_on_sample():
    m = parse_model(SAMPLE)
    assert parse_model(serialize_model(m)) == m
    assert serialize_model(parse_model(serialize_model(m))) == serialize_model(m)


@settings(max_examples=200)
@given(models())
def test_round_trip_property(m):
    assert validate_model(m) == []
    assert parse_model(serialize_model(m)) == m


@settings(max_examples=50)
@given(models(max_classes=3), st.data())
def test_injected_duplicate_feature_is_detected(m, data):
    cls = data.draw(st.sampled_from(m.classes))
    if not cls.attributes:
        return
    dup = dataclasses.replace(cls, references=cls.references + (ReferenceDef(cls.attributes[0].name, cls.name),))
    broken = dataclasses.replace(m, classes=tuple(dup if c is cls else c for c in m.classes))
    assert "DuplicateFeature" in kinds(broken)


@settings(max_examples=50)
@given(models(max_classes=3))
def test_injected_cycle_is_detected(m):
    first = m.classes[0]
    looped = dataclasses.replace(first, super_class=m.classes[-1].name)
    broken = dataclasses.replace(m, classes=(looped,) + m.classes[1:])
    # walk up from the edited class; a cycle means coming back to it
    seen, cur = set(), looped
    while cur is not None and cur.name not in seen:
        seen.add(cur.name)
        cur = broken.class_named(cur.super_class) if cur.super_class else None
    expect_cycle = cur is not None and cur.name == looped.name
    assert ("CyclicInheritance" in kinds(broken)) == expect_cycle


def test_operation_arity():
    assert OperationDef("f", (("a", TypeRef.prim("Int")),)).arity == 1
