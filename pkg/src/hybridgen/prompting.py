"""Prompt templates: packaged text assets with ``{{name}}`` placeholders."""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Dict, Optional, Union

_PLACEHOLDER = re.compile(r"\{\{\s*(\w+)\s*\}\}")

TEMPLATE_NAMES = ("system", "minioo_notes", "decompose", "complete", "fix", "baseline", "tests")


class PromptError(Exception):
    pass


@dataclass(frozen=True)
class Prompt:
    system: str
    user: str

    @property
    def text(self) -> str:
        return self.system + "\n\n" + self.user


def render(template: str, **values: str) -> str:
    """Single-pass substitution, so inserted text is never re-expanded."""

    def sub(m):
        key = m.group(1)
        if key not in values:
            raise PromptError(f"no value for placeholder {{{{{key}}}}}")
        return str(values[key])

    return _PLACEHOLDER.sub(sub, template)


class Templates:
    """Packaged templates, each overridable by ``<override_dir>/<name>.txt``."""

    def __init__(self, override_dir: Optional[Union[str, Path]] = None):
        self.override_dir = Path(override_dir) if override_dir else None
        self._cache: Dict[str, str] = {}

    def get(self, name: str) -> str:
        if name not in self._cache:
            path = self.override_dir / f"{name}.txt" if self.override_dir else None
            if path is not None and path.is_file():
                text = path.read_text(encoding="utf-8")
            else:
                try:
                    text = resources.files("hybridgen.prompts").joinpath(f"{name}.txt").read_text(encoding="utf-8")
                except FileNotFoundError:
                    raise PromptError(f"unknown template {name!r}") from None
            self._cache[name] = text.rstrip("\n")
        return self._cache[name]

    def render(self, name: str, **values: str) -> str:
        return render(self.get(name), **values)


DEFAULT_TEMPLATES = Templates()
