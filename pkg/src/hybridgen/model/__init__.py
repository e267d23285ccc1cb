"""Class model: types, textual format, validation, PlantUML emission."""

from .ops import attach_spec, emit_plantuml, find_operation, related_classes
from .textformat import parse_model, read_model_file, serialize_model
from .types import (
    VOID,
    AttributeDef,
    ClassDef,
    DuplicateName,
    EnumDef,
    InvalidModel,
    MethodSpec,
    ModelError,
    ModelPackage,
    ModelSyntaxError,
    OperationDef,
    ReferenceDef,
    TypeRef,
    UnknownClass,
    UnknownOperation,
    UnresolvedType,
    qualified_name,
)
from .validate import Violation, accessor_names, factory_name, superclass_chain, validate_model

__all__ = [
    "VOID",
    "AttributeDef",
    "ClassDef",
    "DuplicateName",
    "EnumDef",
    "InvalidModel",
    "MethodSpec",
    "ModelError",
    "ModelPackage",
    "ModelSyntaxError",
    "OperationDef",
    "ReferenceDef",
    "TypeRef",
    "UnknownClass",
    "UnknownOperation",
    "UnresolvedType",
    "Violation",
    "accessor_names",
    "attach_spec",
    "emit_plantuml",
    "factory_name",
    "find_operation",
    "parse_model",
    "qualified_name",
    "read_model_file",
    "related_classes",
    "serialize_model",
    "superclass_chain",
    "validate_model",
]
