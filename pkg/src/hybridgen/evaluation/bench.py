"""Benchmark problems: one directory each, described by ``manifest.json``."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import List, Tuple

from ..backend.contract import TestProgram
from ..model import InvalidModel, ModelPackage, read_model_file, validate_model

log = logging.getLogger(__name__)

MANIFEST = "manifest.json"
# descriptive ranges of the original benchmark; outside them we only warn
REQUIREMENT_WORDS = (122, 483)
TEST_CASES = (15, 31)


class BenchError(Exception):
    pass


@dataclass(frozen=True)
class Problem:
    id: str
    root: Path
    requirement: str
    model_path: Path
    test_specs: Tuple[str, ...]
    canonical: Tuple[TestProgram, ...] = ()

    def model(self) -> ModelPackage:
        return read_model_file(self.model_path)


def load_problem(root: Path) -> Problem:
    root = Path(root)
    try:
        manifest = json.loads((root / MANIFEST).read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        raise BenchError(f"{root}: unreadable manifest: {exc}") from exc
    pid = manifest.get("id", root.name)
    req_path = root / manifest.get("requirement", "requirement.txt")
    model_path = root / manifest.get("model", "model.cmdl")
    tests_dir = root / manifest.get("tests", "tests")
    canon_dir = root / manifest.get("canonical", "canonical")
    requirement = req_path.read_text(encoding="utf-8").strip()
    model = read_model_file(model_path)
    violations = validate_model(model)
    if violations:
        raise InvalidModel(violations)
    specs = tuple(p.read_text(encoding="utf-8").strip() for p in sorted(tests_dir.glob("*.txt")))
    if not specs:
        raise BenchError(f"{pid}: no test specifications in {tests_dir}")
    canonical = tuple(
        TestProgram(f"tests/{p.name}", p.read_text(encoding="utf-8")) for p in sorted(canon_dir.glob("*.mot"))
    )
    words = len(requirement.split())
    if not REQUIREMENT_WORDS[0] <= words <= REQUIREMENT_WORDS[1]:
        log.info("%s: requirement has %d words (benchmark range %d-%d)", pid, words, *REQUIREMENT_WORDS)
    if not TEST_CASES[0] <= len(specs) <= TEST_CASES[1]:
        log.info("%s: %d test cases (benchmark range %d-%d)", pid, len(specs), *TEST_CASES)
    return Problem(pid, root, requirement, model_path, specs, canonical)


def load_bench(root: Path) -> List[Problem]:
    """Every subdirectory holding a manifest, sorted by problem id."""
    root = Path(root)
    if (root / MANIFEST).is_file():
        return [load_problem(root)]
    problems = [load_problem(d) for d in sorted(root.iterdir()) if (d / MANIFEST).is_file()]
    ids = [p.id for p in problems]
    dupes = {i for i in ids if ids.count(i) > 1}
    if dupes:
        raise BenchError(f"duplicate problem ids: {', '.join(sorted(dupes))}")
    return sorted(problems, key=lambda p: p.id)
