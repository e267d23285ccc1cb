"""Target-language-neutral backend contract and its value types."""

from __future__ import annotations

import abc
from dataclasses import dataclass, field
from typing import AbstractSet, Any, List, Optional, Sequence, Tuple

DIAGNOSTIC_KINDS = ("Syntax", "UnresolvedSymbol", "TypeMismatch", "Other")

# (class name, method name, arity)
MethodKey = Tuple[str, str, int]


def format_key(key: MethodKey) -> str:
    return f"{key[0]}.{key[1]}/{key[2]}"


@dataclass(frozen=True)
class SourceUnit:
    path: str
    class_id: str
    text: str

    def with_text(self, text: str) -> "SourceUnit":
        return SourceUnit(self.path, self.class_id, text)


@dataclass(frozen=True)
class Diagnostic:
    path: str
    kind: str
    line: int
    source_line: str
    message: str

    def __post_init__(self):
        if self.kind not in DIAGNOSTIC_KINDS:
            raise ValueError(f"unknown diagnostic kind {self.kind!r}")
        if self.line < 1:
            raise ValueError("diagnostic line must be >= 1")

    def render(self) -> str:
        return f"{self.path}:{self.line}: {self.kind}: {self.message}\n    {self.source_line}"

    def to_dict(self) -> dict:
        return {
            "path": self.path,
            "kind": self.kind,
            "line": self.line,
            "sourceLine": self.source_line,
            "message": self.message,
        }


def source_line(text: str, line: int) -> str:
    lines = text.split("\n")
    return lines[line - 1].rstrip("\r") if 1 <= line <= len(lines) else ""


def make_diagnostic(path: str, text: str, kind: str, line: int, message: str) -> Diagnostic:
    line = max(1, line)
    return Diagnostic(path, kind, line, source_line(text, line), message)


@dataclass(frozen=True)
class CompileResult:
    diagnostics: Tuple[Diagnostic, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.diagnostics


@dataclass(frozen=True)
class TestOutcome:
    test_id: str
    passed: bool
    failure_message: Optional[str] = None

    __test__ = False  # keep pytest from collecting this class

    def __post_init__(self):
        if self.passed and self.failure_message is not None:
            raise ValueError("a passing outcome carries no failure message")

    def to_dict(self) -> dict:
        return {"testId": self.test_id, "passed": self.passed, "failureMessage": self.failure_message}


@dataclass(frozen=True)
class TestProgram:
    test_id: str
    text: str

    __test__ = False


@dataclass
class MergeReport:
    replaced_methods: List[MethodKey] = field(default_factory=list)
    added_helpers: List[MethodKey] = field(default_factory=list)
    added_imports: List[str] = field(default_factory=list)
    rejected_edits: List[Tuple[str, str]] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "replacedMethods": [format_key(k) for k in self.replaced_methods],
            "addedHelpers": [format_key(k) for k in self.added_helpers],
            "addedImports": list(self.added_imports),
            "rejectedEdits": [list(e) for e in self.rejected_edits],
        }


@dataclass(frozen=True)
class ParseResult:
    tree: Any
    diagnostics: Tuple[Diagnostic, ...] = ()

    @property
    def ok(self) -> bool:
        return self.tree is not None and not self.diagnostics


class BackendError(Exception):
    pass


class UnparseableCompletion(BackendError):
    def __init__(self, diagnostics: Sequence[Diagnostic]):
        super().__init__("; ".join(d.message for d in diagnostics) or "completion does not parse")
        self.diagnostics = tuple(diagnostics)


class UnannotatedOperation(BackendError):
    pass


class Backend(abc.ABC):
    """Operations every code backend provides."""

    name: str = "abstract"
    language_tag: str = ""
    source_suffix: str = ""
    test_suffix: str = ""

    @abc.abstractmethod
    def generate_skeleton(self, model) -> List[SourceUnit]:
        ...

    @abc.abstractmethod
    def parse_code(self, unit: SourceUnit) -> ParseResult:
        ...

    @abc.abstractmethod
    def compress(self, unit: SourceUnit, keep_docstrings_for: AbstractSet[MethodKey]) -> SourceUnit:
        ...

    @abc.abstractmethod
    def merge(
        self, base: SourceUnit, completed: SourceUnit, targets: AbstractSet[MethodKey]
    ) -> Tuple[SourceUnit, MergeReport]:
        ...

    @abc.abstractmethod
    def compile_check(self, units: Sequence[SourceUnit]) -> CompileResult:
        ...

    @abc.abstractmethod
    def run_tests(self, units: Sequence[SourceUnit], tests: Sequence[TestProgram]) -> List[TestOutcome]:
        ...

    # helpers the pipeline needs beyond the six contract operations

    @abc.abstractmethod
    def signatures(self, model, class_name: str) -> List[str]:
        """Public method signatures of a model class as the skeleton renders them."""

    @abc.abstractmethod
    def method_spans(self, unit: SourceUnit) -> List[Tuple[MethodKey, int, int]]:
        """``(key, first_line, last_line)`` for every method in a parseable unit."""

    @abc.abstractmethod
    def split_units(self, text: str) -> List[SourceUnit]:
        """Split one multi-class source file into per-class units."""
