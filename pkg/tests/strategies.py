"""Hypothesis strategies for valid class models."""

from hypothesis import strategies as st

from hybridgen.model import (
    AttributeDef,
    ClassDef,
    EnumDef,
    MethodSpec,
    ModelPackage,
    OperationDef,
    ReferenceDef,
    TypeRef,
)
from hybridgen.model.validate import RESERVED

PRIMS = ["Int", "Float", "Bool", "String", "Date"]

lower_ident = st.from_regex(r"[a-z][a-zA-Z0-9]{0,6}", fullmatch=True).filter(lambda s: s not in RESERVED)
upper_ident = st.from_regex(r"[A-Z][a-zA-Z0-9]{0,6}", fullmatch=True).filter(lambda s: s not in RESERVED)
text = st.text(
    alphabet=st.characters(blacklist_categories=("Cs", "Cc"), whitelist_characters="\n\t\"\\"),
    max_size=30,
)


def _default(draw, kind, enum):
    if kind == "Int":
        return draw(st.integers(-(2**40), 2**40))
    if kind == "Float":
        return draw(st.floats(allow_nan=False, allow_infinity=False, width=64))
    if kind == "Bool":
        return draw(st.booleans())
    if kind == "String":
        return draw(text)
    if kind == "Date":
        return draw(st.integers(-1000, 100000))
    return draw(st.sampled_from(enum.literals))


@st.composite
def specs(draw, params):
    return MethodSpec(
        summary=draw(text.filter(lambda s: s.strip() != "")),
        algorithm=draw(text),
        inputs=tuple((p, draw(text)) for p in params if draw(st.booleans())),
        outputs=draw(text),
        preconditions=tuple(draw(st.lists(text, max_size=2))),
        postconditions=tuple(draw(st.lists(text, max_size=2))),
    )


@st.composite
def models(draw, max_classes=4, with_specs=True):
    """Valid models; every name is made unique by construction."""
    n_classes = draw(st.integers(1, max_classes))
    class_names = draw(st.lists(upper_ident, min_size=n_classes, max_size=n_classes, unique=True))
    pkg = draw(lower_ident)
    factory = pkg[:1].upper() + pkg[1:] + "Factory"
    enum_names = draw(st.lists(upper_ident, max_size=2, unique=True))
    enum_names = [e for e in enum_names if e not in class_names and e != factory]
    class_names = [c for c in class_names if c != factory] or ["Thing"]
    enums = tuple(
        EnumDef(e, tuple(draw(st.lists(st.from_regex(r"[A-Z][A-Z0-9_]{0,4}", fullmatch=True), min_size=1, max_size=3, unique=True))))
        for e in enum_names
    )

    def a_type(allow_class=True):
        choices = [TypeRef.prim(p) for p in PRIMS]
        choices += [TypeRef.enum(e.name) for e in enums]
        if allow_class:
            choices += [TypeRef.cls_(c) for c in class_names]
        base = draw(st.sampled_from(choices))
        return TypeRef.list_of(base) if draw(st.integers(0, 4)) == 0 else base

    classes = []
    for i, cname in enumerate(class_names):
        sup = draw(st.sampled_from([None] + class_names[:i])) if i else None
        attrs = []
        for j in range(draw(st.integers(0, 3))):
            kind = draw(st.sampled_from(PRIMS + [e.name for e in enums]))
            enum = next((e for e in enums if e.name == kind), None)
            t = TypeRef.enum(kind) if enum else TypeRef.prim(kind)
            many = draw(st.integers(0, 5)) == 0
            default = None if many or not draw(st.booleans()) else _default(draw, kind, enum)
            attrs.append(AttributeDef(f"a{i}x{j}", t, many, default))
        refs = []
        for j in range(draw(st.integers(0, 2))):
            refs.append(
                ReferenceDef(f"r{i}x{j}", draw(st.sampled_from(class_names)), draw(st.booleans()), draw(st.booleans()))
            )
        ops = []
        for j in range(draw(st.integers(0, 3))):
            params = tuple((f"p{k}", a_type()) for k in range(draw(st.integers(0, 3))))
            ret = TypeRef("Void") if draw(st.booleans()) else a_type()
            spec = draw(specs([p for p, _ in params])) if with_specs and draw(st.booleans()) else None
            ops.append(OperationDef(f"op{i}x{j}", params, ret, spec))
        classes.append(ClassDef(cname, draw(st.booleans()), sup, tuple(attrs), tuple(refs), tuple(ops)))

    # an opposite pair between the first two classes when possible
    if len(classes) >= 2 and draw(st.booleans()):
        a, b = classes[0], classes[1]
        ra = ReferenceDef("peer", b.name, draw(st.booleans()), False, "back")
        rb = ReferenceDef("back", a.name, draw(st.booleans()), draw(st.booleans()), "peer")
        classes[0] = ClassDef(a.name, a.is_abstract, a.super_class, a.attributes, a.references + (ra,), a.operations)
        classes[1] = ClassDef(b.name, b.is_abstract, b.super_class, b.attributes, b.references + (rb,), b.operations)
    return ModelPackage(pkg, tuple(classes), enums)
