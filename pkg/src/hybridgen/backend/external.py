"""Drive an arbitrary command-line compiler and map its output to diagnostics."""

from __future__ import annotations

import logging
import os
import re
import shlex
import subprocess
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

from .contract import Backend, CompileResult, Diagnostic, SourceUnit, make_diagnostic

log = logging.getLogger(__name__)

# first match wins; checked against the lower-cased message
DEFAULT_KEYWORDS: Tuple[Tuple[str, str], ...] = (
    ("syntax", "Syntax"),
    ("expected", "Syntax"),
    ("unexpected", "Syntax"),
    ("unknown", "UnresolvedSymbol"),
    ("cannot find symbol", "UnresolvedSymbol"),
    ("undefined", "UnresolvedSymbol"),
    ("undeclared", "UnresolvedSymbol"),
    ("unresolved", "UnresolvedSymbol"),
    ("not found", "UnresolvedSymbol"),
    ("has no ", "UnresolvedSymbol"),
    ("incompatible", "TypeMismatch"),
    ("mismatch", "TypeMismatch"),
    ("cannot convert", "TypeMismatch"),
    ("type", "TypeMismatch"),
)

DEFAULT_PATTERN = r"^(?P<path>[^:\n]+):(?P<line>\d+):\s*(?:error:\s*)?(?P<message>.+)$"


class ExternalToolError(Exception):
    pass


class ToolNotFound(ExternalToolError):
    def __init__(self, command: str):
        super().__init__(f"compiler not found: {command}")
        self.command = command


class ToolTimeout(ExternalToolError):
    def __init__(self, seconds: float):
        super().__init__(f"compiler timed out after {seconds}s")
        self.seconds = seconds


class PatternMismatch(ExternalToolError):
    def __init__(self, returncode: int, output: str):
        super().__init__(f"compiler exited with {returncode} but no diagnostic matched the pattern")
        self.returncode = returncode
        self.output = output


@dataclass
class ToolConfig:
    command: str
    pattern: str = DEFAULT_PATTERN
    timeout: float = 60.0
    keywords: Tuple[Tuple[str, str], ...] = field(default=DEFAULT_KEYWORDS)

    def __post_init__(self):
        regex = re.compile(self.pattern, re.MULTILINE)
        missing = {"path", "line", "message"} - set(regex.groupindex)
        if missing:
            raise ValueError(f"diagnostic pattern lacks named groups: {', '.join(sorted(missing))}")
        if "{files}" not in self.command:
            raise ValueError("command template must contain {files}")


def classify(message: str, keywords=DEFAULT_KEYWORDS) -> str:
    low = message.lower()
    for word, kind in keywords:
        if word in low:
            return kind
    return "Other"


def _argv(template: str, files: List[str]) -> List[str]:
    argv = []
    for part in shlex.split(template):
        if part == "{files}":
            argv.extend(files)
        else:
            argv.append(part.replace("{files}", " ".join(files)))
    return argv


def external_compile(units: Sequence[SourceUnit], cfg: ToolConfig, workdir: Optional[Path] = None) -> CompileResult:
    """Write ``units`` under a fresh directory and run the configured compiler there."""
    with tempfile.TemporaryDirectory(prefix="hybridgen-cc-", dir=workdir) as tmp:
        root = Path(tmp)
        for u in units:
            dest = root / u.path
            dest.parent.mkdir(parents=True, exist_ok=True)
            dest.write_text(u.text, encoding="utf-8")
        argv = _argv(cfg.command, [u.path for u in units])
        try:
            proc = subprocess.run(argv, cwd=root, capture_output=True, text=True, timeout=cfg.timeout)
        except FileNotFoundError:
            raise ToolNotFound(argv[0]) from None
        except subprocess.TimeoutExpired:
            raise ToolTimeout(cfg.timeout) from None
        output = proc.stdout + proc.stderr
        diags: List[Diagnostic] = []
        for m in re.finditer(cfg.pattern, output, re.MULTILINE):
            path = m.group("path").strip()
            if os.path.isabs(path):
                try:
                    path = os.path.relpath(path, root)
                except ValueError:
                    pass
            message = m.group("message").strip()
            written = root / path
            text = written.read_text(encoding="utf-8") if written.is_file() else ""
            diags.append(make_diagnostic(path, text, classify(message, cfg.keywords), int(m.group("line")), message))
        if proc.returncode != 0 and not diags:
            log.error("unparsed compiler output (exit %d):\n%s", proc.returncode, output)
            raise PatternMismatch(proc.returncode, output)
        return CompileResult(tuple(diags))


class ExternalCompilerBackend(Backend):
    """Delegates everything to ``inner`` except compile_check, which shells out."""

    def __init__(self, inner: Backend, tool: ToolConfig):
        self.inner = inner
        self.tool = tool
        self.name = f"external:{inner.name}"
        self.language_tag = inner.language_tag
        self.source_suffix = inner.source_suffix
        self.test_suffix = inner.test_suffix

    def compile_check(self, units):
        return external_compile(units, self.tool)

    def generate_skeleton(self, model):
        return self.inner.generate_skeleton(model)

    def parse_code(self, unit):
        return self.inner.parse_code(unit)

    def compress(self, unit, keep_docstrings_for):
        return self.inner.compress(unit, keep_docstrings_for)

    def merge(self, base, completed, targets):
        return self.inner.merge(base, completed, targets)

    def run_tests(self, units, tests):
        return self.inner.run_tests(units, tests)

    def signatures(self, model, class_name):
        return self.inner.signatures(model, class_name)

    def method_spans(self, unit):
        return self.inner.method_spans(unit)

    def split_units(self, text):
        return self.inner.split_units(text)
