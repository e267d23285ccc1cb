"""Per-sample LLM access with artifact persistence."""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence

from .backend.contract import SourceUnit
from .llm import ChatRequest, Provider
from .prompting import DEFAULT_TEMPLATES, Prompt, PromptError, Templates


class ArtifactSink:
    """Writes files below ``root``; with ``root=None`` everything is discarded."""

    def __init__(self, root: Optional[Path]):
        self.root = Path(root) if root is not None else None

    def write_text(self, rel: str, text: str) -> None:
        if self.root is None:
            return
        path = self.root / rel
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")

    def write_json(self, rel: str, data) -> None:
        self.write_text(rel, json.dumps(data, indent=2, sort_keys=True, ensure_ascii=False) + "\n")

    def write_units(self, rel_dir: str, units: Sequence[SourceUnit]) -> None:
        for u in units:
            self.write_text(f"{rel_dir}/{u.path}" if rel_dir else u.path, u.text)


@dataclass
class LLMSettings:
    model_name: str = "replay"
    temperature: float = 0.2
    max_tokens: int = 4096


@dataclass
class CallRecord:
    stage: str
    prompt: Prompt
    response: Optional[str]


@dataclass
class Session:
    """Everything one sample needs to talk to the model and leave an audit trail."""

    provider: Provider
    settings: LLMSettings = field(default_factory=LLMSettings)
    sample_index: int = 0
    sink: ArtifactSink = field(default_factory=lambda: ArtifactSink(None))
    templates: Templates = DEFAULT_TEMPLATES
    calls: List[CallRecord] = field(default_factory=list)

    def __post_init__(self):
        self._lock = threading.Lock()

    def ask(self, stage: str, prompt: Prompt) -> str:
        with self._lock:
            seq = len(self.calls) + 1
            record = CallRecord(stage, prompt, None)
            self.calls.append(record)
        base = f"llm/{seq:02d}-{stage}"
        self.sink.write_text(base + ".prompt.txt", f"[system]\n{prompt.system}\n\n[user]\n{prompt.user}\n")
        req = ChatRequest(
            prompt.system,
            prompt.user,
            self.settings.model_name,
            self.settings.temperature,
            self.settings.max_tokens,
            self.sample_index,
        )
        text = self.provider.complete(req)
        record.response = text
        self.sink.write_text(base + ".response.txt", text)
        return text

    def stages(self) -> List[str]:
        return [c.stage for c in self.calls]

    def language_notes(self, language_tag: str) -> str:
        try:
            return self.templates.get(f"{language_tag}_notes")
        except PromptError:
            return ""
