from .contract import (
    DIAGNOSTIC_KINDS,
    Backend,
    BackendError,
    CompileResult,
    Diagnostic,
    MergeReport,
    MethodKey,
    ParseResult,
    SourceUnit,
    TestOutcome,
    TestProgram,
    UnannotatedOperation,
    UnparseableCompletion,
    format_key,
    make_diagnostic,
    source_line,
)
from .external import (
    ExternalCompilerBackend,
    ExternalToolError,
    PatternMismatch,
    ToolConfig,
    ToolNotFound,
    ToolTimeout,
    classify,
    external_compile,
)


def get_backend(name: str = "minioo", tool: "ToolConfig | None" = None, step_budget: "int | None" = None) -> Backend:
    """Backend by name: ``minioo`` or ``external`` (MiniOO with an external compiler)."""
    from ..minioo.backend import MiniOOBackend

    inner = MiniOOBackend(step_budget) if step_budget else MiniOOBackend()
    if name == "minioo":
        return inner
    if name == "external":
        if tool is None:
            raise BackendError("the external backend needs a tool configuration")
        return ExternalCompilerBackend(inner, tool)
    raise BackendError(f"unknown backend {name!r}")
