import shutil
import sys

import pytest

from hybridgen.backend import (
    ExternalCompilerBackend,
    PatternMismatch,
    SourceUnit,
    ToolConfig,
    ToolNotFound,
    ToolTimeout,
    classify,
    external_compile,
)
from hybridgen.minioo import MiniOOBackend

CHECK = f"{sys.executable} -m hybridgen.minioo.checktool {{files}}"
GOOD = SourceUnit("src/A.mo", "A", "class A {\n  def f(): Int {\n    return 1;\n  }\n}\n")
BAD = SourceUnit("src/B.mo", "B", "class B {\n  def f(): Int {\n    return this.g();\n  }\n}\n")


def test_external_matches_builtin_checker():
    backend = ExternalCompilerBackend(MiniOOBackend(), ToolConfig(CHECK))
    assert backend.compile_check([GOOD]).ok
    ext = backend.compile_check([GOOD, BAD]).diagnostics
    own = MiniOOBackend().compile_check([GOOD, BAD]).diagnostics
    assert [(d.path, d.line, d.source_line, d.message) for d in ext] == [(d.path, d.line, d.source_line, d.message) for d in own]
    assert ext[0].kind == "UnresolvedSymbol"


@pytest.mark.skipif(shutil.which("minioo-check") is None, reason="console script not installed")
def test_console_script():
    assert external_compile([BAD], ToolConfig("minioo-check {files}")).diagnostics[0].line == 3


def test_tool_config_validation():
    with pytest.raises(ValueError):
        ToolConfig("cc {files}", pattern=r"(?P<line>\d+): (?P<message>.*)")
    with pytest.raises(ValueError):
        ToolConfig("cc main.c")


def test_tool_failures(tmp_path):
    with pytest.raises(ToolNotFound):
        external_compile([GOOD], ToolConfig("definitely-not-a-compiler-xyz {files}"))
    with pytest.raises(PatternMismatch) as info:
        external_compile([GOOD], ToolConfig(f"{sys.executable} -c \"import sys; print('boom'); sys.exit(3)\" {{files}}"))
    assert info.value.returncode == 3 and "boom" in info.value.output
    with pytest.raises(ToolTimeout):
        external_compile([GOOD], ToolConfig(f"{sys.executable} -c \"import time; time.sleep(5)\" {{files}}", timeout=0.3))


def test_custom_pattern():
    script = "import sys; print('ERROR in ' + sys.argv[1] + ' at 2 -- unexpected token')"
    cfg = ToolConfig(
        f"{sys.executable} -c \"{script}\" {{files}}",
        pattern=r"^ERROR in (?P<path>\S+) at (?P<line>\d+) -- (?P<message>.+)$",
    )
    d = external_compile([GOOD], cfg).diagnostics[0]
    assert (d.path, d.line, d.kind, d.source_line) == ("src/A.mo", 2, "Syntax", "  def f(): Int {")


@pytest.mark.parametrize(
    "message,kind",
    [
        ("expected ';'", "Syntax"),
        ("cannot find symbol foo", "UnresolvedSymbol"),
        ("incompatible types: String cannot be converted", "TypeMismatch"),
        ("something odd", "Other"),
    ],
)
def test_classify(message, kind):
    assert classify(message) == kind
