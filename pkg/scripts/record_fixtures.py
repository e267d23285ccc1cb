#!/usr/bin/env python3
"""Regenerate the replay transcripts shipped under bench/.

Each problem carries a hand-written reference under ``reference/``:

    solution.mo        partial classes holding operation bodies and helpers
    decomposition.md   the answer to the decomposition prompt
    typo.json          {"class", "from", "to", "trap"} used for faulty samples

A scripted responder answers every prompt from those files, and a recording
provider stores the exchanges.  Faulty samples are deliberate:

    iecoregen  sample 1   completion of ``class`` carries the typo; repair fixes it
    baselines  sample 1   operation ``trap`` is left unimplemented
    baselines  sample 2   the program carries the typo; only base-r-cd-fix repairs it

Usage: python3 scripts/record_fixtures.py [bench_dir]
"""

from __future__ import annotations

import json
import re
import sys
from dataclasses import replace
from pathlib import Path
from typing import Dict, List, Optional, Set

from hybridgen.ablation import AblationFlags
from hybridgen.backend import SourceUnit
from hybridgen.config import DEFAULT_MODEL
from hybridgen.decompose import passthrough_annotation
from hybridgen.evaluation import BASELINES, IECOREGEN, ApproachConfig, RunSettings, load_bench, run_eval
from hybridgen.llm import ChatRequest, Provider, ScriptedProvider, TranscriptRecord, TranscriptWriter, prompt_digest
from hybridgen.minioo import MiniOOBackend, parse_program
from hybridgen.repair import repair
from hybridgen.session import LLMSettings, Session
from hybridgen.tokens import count_tokens

N = 5
TEMPERATURE = 0.8
RECORDED_AT = "2026-01-01T00:00:00+00:00"

ABLATIONS = [
    AblationFlags(),
    AblationFlags(no_decompose=True),
    AblationFlags(no_compress=True),
    AblationFlags(no_context=True),
    AblationFlags(no_fix=True),
]

_FENCE = re.compile(r"```minioo\n(.*?)\n```", re.DOTALL)
_COMPLETE = re.compile(r"^Complete the \w+ class `(\w+)`")
_FIX = re.compile(r"^The \w+ class `(\w+)` does not compile")
_TARGET_SIG = re.compile(r"^- (\w+)\((.*?)\)", re.MULTILINE)
_TARGET_KEY = re.compile(r"^- (\w+)/(\d+)$", re.MULTILINE)


class ReferenceResponder:
    def __init__(self, problem, backend: Optional[MiniOOBackend] = None):
        self.problem = problem
        self.backend = backend or MiniOOBackend()
        ref = problem.root / "reference"
        self.solution = (ref / "solution.mo").read_text(encoding="utf-8")
        self.decomposition = (ref / "decomposition.md").read_text(encoding="utf-8")
        self.typo = json.loads((ref / "typo.json").read_text(encoding="utf-8"))
        prog = parse_program(self.solution)
        self.reference: Dict[str, str] = {}
        for c in prog.classes:
            self.reference[c.name] = self.solution[c.span.start : c.close + 1] + "\n"
        self.methods = {c.name: [(m.name, m.arity) for m in c.methods] for c in prog.classes}

    def __call__(self, req: ChatRequest) -> str:
        user = req.user_text
        if user.startswith("You are a software architect"):
            return self.decomposition
        m = _COMPLETE.match(user)
        if m:
            return self.complete(m.group(1), user, req.sample_index)
        m = _FIX.match(user)
        if m:
            return self.fix(m.group(1), user)
        if user.startswith("Write a complete"):
            return self.baseline(req.sample_index)
        raise ValueError(f"no scripted answer for prompt starting {user[:60]!r}")

    def _splice(self, class_id: str, code: str, keys: Set) -> str:
        base = SourceUnit(f"src/{class_id}.mo", class_id, code + "\n")
        ref = self.reference.get(class_id)
        if ref is None:
            return base.text
        merged, _ = self.backend.merge(base, base.with_text(ref), frozenset(keys))
        return merged.text

    def _inject(self, class_id: str, text: str) -> str:
        if class_id != self.typo["class"] or self.typo["from"] not in text:
            raise ValueError(f"typo anchor {self.typo['from']!r} missing from {class_id}")
        return text.replace(self.typo["from"], self.typo["to"], 1)

    def complete(self, class_id: str, user: str, sample: int) -> str:
        code = _FENCE.search(user).group(1)
        section = user.split("Methods to implement:", 1)[1]
        keys = set()
        for name, params in _TARGET_SIG.findall(section):
            keys.add((class_id, name, len(params.split(",")) if params.strip() else 0))
        # helpers ride along with the targets
        keys.update((class_id, n, a) for n, a in self.methods.get(class_id, []))
        text = self._splice(class_id, code, keys)
        if sample == 1 and class_id == self.typo["class"]:
            text = self._inject(class_id, text)
        return f"Here is the completed class.\n\n```minioo\n{text.rstrip()}\n```\n"

    def fix(self, class_id: str, user: str) -> str:
        code = _FENCE.search(user).group(1)
        section = user.split("Methods to fix:", 1)[1]
        keys = {(class_id, n, int(a)) for n, a in _TARGET_KEY.findall(section)}
        text = self._splice(class_id, code, keys)
        return f"```minioo\n{text.rstrip()}\n```\n"

    def baseline(self, sample: int) -> str:
        model = passthrough_annotation(self.problem.model(), self.problem.requirement)
        parts: List[str] = []
        for unit in self.backend.generate_skeleton(model):
            keys = {(unit.class_id, n, a) for n, a in self.methods.get(unit.class_id, [])}
            if sample == 1:
                keys = {k for k in keys if k[1] != self.typo["trap"]}
            text = self._splice(unit.class_id, unit.text.rstrip("\n"), keys)
            if sample == 2 and unit.class_id == self.typo["class"]:
                text = self._inject(unit.class_id, text)
            parts.append(text.rstrip("\n"))
        return "```minioo\n" + "\n\n".join(parts) + "\n```\n"


class DedupRecorder(Provider):
    """Records each distinct prompt once with a fixed timestamp."""

    def __init__(self, inner: Provider, path: Path):
        self.inner = inner
        self.writer = TranscriptWriter(path)
        self.seen: Set[str] = set()

    def complete(self, req: ChatRequest) -> str:
        text = self.inner.complete(req)
        digest = prompt_digest(req)
        if digest not in self.seen:
            self.seen.add(digest)
            meta = {
                "recordedAt": RECORDED_AT,
                "model": req.model_name,
                "promptTokens": count_tokens(req.system_text) + count_tokens(req.user_text),
                "responseTokens": count_tokens(text),
            }
            self.writer.append(TranscriptRecord(digest, text, meta))
        return text


def approaches() -> List[ApproachConfig]:
    return [ApproachConfig(IECOREGEN, f) for f in ABLATIONS] + [ApproachConfig(k) for k in BASELINES]


def record_problem(problem, out: Path) -> None:
    if out.exists():
        out.unlink()
    provider = DedupRecorder(ScriptedProvider(ReferenceResponder(problem)), out)
    settings = RunSettings(
        backend=MiniOOBackend(),
        provider=provider,
        llm=LLMSettings(DEFAULT_MODEL, TEMPERATURE),
        test_source="canonical",
    )
    report = run_eval([problem], approaches(), N, [1, 3], settings)
    for name in report.approaches:
        p1, c1 = report.values[(name, 1)]
        print(f"  {name:28s} pass@1={p1:.2f} comp@1={c1:.2f}")


def record_typo_fixture(problem, out_dir: Path) -> None:
    """Completed units of ``problem`` with the typo injected plus a fix transcript."""
    backend = MiniOOBackend()
    responder = ReferenceResponder(problem, backend)
    model = passthrough_annotation(problem.model(), problem.requirement)
    units = []
    for u in backend.generate_skeleton(model):
        keys = {(u.class_id, n, a) for n, a in responder.methods.get(u.class_id, [])}
        text = responder._splice(u.class_id, u.text.rstrip("\n"), keys)
        if u.class_id == responder.typo["class"]:
            text = responder._inject(u.class_id, text)
        units.append(replace(u, text=text))
    src = out_dir / "units"
    if src.exists():
        for p in sorted(src.rglob("*"), reverse=True):
            p.unlink() if p.is_file() else p.rmdir()
    for u in units:
        path = src / u.path
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(u.text, encoding="utf-8")
    transcript = out_dir / "fix.jsonl"
    if transcript.exists():
        transcript.unlink()
    session = Session(DedupRecorder(ScriptedProvider(responder), transcript), LLMSettings(DEFAULT_MODEL, 0.2))
    outcome = repair(units, session, backend, 3)
    print(f"  typo fixture history={outcome.history}")


def main(argv: List[str]) -> int:
    root = Path(__file__).resolve().parent.parent
    bench = Path(argv[0]) if argv else root / "bench"
    transcripts = bench / "transcripts"
    transcripts.mkdir(parents=True, exist_ok=True)
    problems = load_bench(bench)
    for problem in problems:
        print(problem.id)
        record_problem(problem, transcripts / f"{problem.id}.jsonl")
    employee = next(p for p in problems if p.id == "employee")
    record_typo_fixture(employee, root / "tests" / "fixtures" / "typo")
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
