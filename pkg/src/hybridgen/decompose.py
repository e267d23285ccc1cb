"""Requirement decomposition: one LLM round that yields a MethodSpec per operation."""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .model import InvalidModel, MethodSpec, ModelPackage, attach_spec, emit_plantuml, qualified_name, validate_model
from .prompting import DEFAULT_TEMPLATES, Prompt, Templates

log = logging.getLogger(__name__)


class EmptyRequirement(ValueError):
    pass


@dataclass
class DecompositionResult:
    specs: Dict[str, MethodSpec] = field(default_factory=dict)
    unmatched: List[str] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)


def _check_inputs(m: ModelPackage, requirement: str) -> None:
    if not requirement or not requirement.strip():
        raise EmptyRequirement("requirement text is empty")
    violations = validate_model(m)
    if violations:
        raise InvalidModel(violations)


def build_decomposition_prompt(m: ModelPackage, requirement: str, templates: Templates = DEFAULT_TEMPLATES) -> Prompt:
    _check_inputs(m, requirement)
    ops = "\n".join(f"- {qualified_name(c, o)}" for c, o in m.operations())
    user = templates.render(
        "decompose",
        plantuml=emit_plantuml(m),
        requirement=requirement.strip(),
        operations=ops or "- (none)",
    )
    return Prompt(templates.get("system"), user)


# response parsing

_HEADER = re.compile(
    r"^\s{0,3}#{2,6}\s*[`*]*\s*([A-Za-z_]\w*)\.([A-Za-z_]\w*)\s*(?:\(([^)]*)\))?\s*[`*]*\s*:?\s*$"
)
_LABELS = {
    "summary": "summary",
    "algorithm": "algorithm",
    "input": "inputs",
    "inputs": "inputs",
    "output": "outputs",
    "outputs": "outputs",
    "precondition": "preconditions",
    "preconditions": "preconditions",
    "pre-conditions": "preconditions",
    "postcondition": "postconditions",
    "postconditions": "postconditions",
    "post-conditions": "postconditions",
}
_LABEL = re.compile(
    r"^\s*(?:[-*]\s+)?[*_]{0,2}(" + "|".join(sorted(map(re.escape, _LABELS), key=len, reverse=True)) + r")[*_]{0,2}\s*:[*_]{0,2}\s*(.*)$",
    re.IGNORECASE,
)
_ITEM = re.compile(r"^\s*(?:[-*+]|\d+[.)])\s+(.*)$")
_INPUT = re.compile(r"^[`*]*([A-Za-z_]\w*)[`*]*\s*(?:\([^)]*\))?\s*(?::|-|–|—)\s*(.*)$")
_NONE = {"none", "none.", "n/a", "-", "(none)", "nothing", "no preconditions.", "no postconditions."}


def _arity(raw: Optional[str]) -> Optional[int]:
    """``"2"`` or ``"a: Int, b: Int"`` -> 2; an absent group -> None."""
    if raw is None:
        return None
    raw = raw.strip()
    if raw.isdigit():
        return int(raw)
    return len([p for p in raw.split(",") if p.strip()])


def _split_blocks(resp: str) -> List[Tuple[str, str, Optional[int], List[str]]]:
    blocks = []
    current = None
    for line in resp.splitlines():
        h = _HEADER.match(line)
        if h:
            current = (h.group(1), h.group(2), _arity(h.group(3)), [])
            blocks.append(current)
        elif current is not None:
            current[3].append(line)
    return blocks


def _sections(lines: List[str]) -> Dict[str, List[str]]:
    out: Dict[str, List[str]] = {}
    key = None
    for line in lines:
        if line.strip().startswith("```"):
            continue
        lm = _LABEL.match(line)
        if lm:
            key = _LABELS[lm.group(1).lower()]
            out.setdefault(key, [])
            if lm.group(2).strip():
                out[key].append(lm.group(2).strip())
        elif key is not None:
            out[key].append(line.rstrip())
    return out


def _text(lines: List[str]) -> str:
    kept = [l.strip() for l in lines]
    while kept and not kept[-1]:
        kept.pop()
    while kept and not kept[0]:
        kept.pop(0)
    text = "\n".join(kept)
    return "" if text.lower() in _NONE else text


def _items(lines: List[str]) -> List[str]:
    items: List[str] = []
    loose: List[str] = []
    for line in lines:
        if not line.strip():
            continue
        im = _ITEM.match(line)
        if im:
            items.append(im.group(1).strip())
        elif items:
            items[-1] += " " + line.strip()
        else:
            loose.append(line.strip())
    if not items and loose:
        items = [" ".join(loose)]
    return [i for i in items if i.lower() not in _NONE]


def parse_decomposition_response(resp: str, m: ModelPackage) -> DecompositionResult:
    """Total: malformed text degrades to warnings and unmatched operations."""
    result = DecompositionResult()
    ops = {qualified_name(c, o): (c, o) for c, o in m.operations()}
    for cname, oname, arity, lines in _split_blocks(resp or ""):
        cands = [k for k, (c, o) in ops.items() if c.name == cname and o.name == oname and (arity is None or o.arity == arity)]
        label = f"{cname}.{oname}" + (f"({arity})" if arity is not None else "")
        if len(cands) != 1:
            reason = "ambiguous" if cands else "unknown"
            result.warnings.append(f"{label}: {reason} operation, block ignored")
            continue
        key = cands[0]
        if key in result.specs:
            result.warnings.append(f"{key}: duplicate block ignored")
            continue
        secs = _sections(lines)
        summary = _text(secs.get("summary", []))
        if not summary:
            result.warnings.append(f"{key}: block has no summary, ignored")
            continue
        declared = {n for n, _ in ops[key][1].params}
        for name in ("algorithm", "inputs", "outputs", "preconditions", "postconditions"):
            if name not in secs and (name != "inputs" or declared):
                result.warnings.append(f"{key}: missing section {name}")
        inputs = []
        for item in _items(secs.get("inputs", [])):
            im = _INPUT.match(item)
            if im and im.group(1) in declared:
                inputs.append((im.group(1), im.group(2).strip()))
            else:
                result.warnings.append(f"{key}: input entry {item!r} names no parameter, dropped")
        result.specs[key] = MethodSpec(
            summary=summary,
            algorithm=_text(secs.get("algorithm", [])),
            inputs=tuple(inputs),
            outputs=_text(secs.get("outputs", [])),
            preconditions=tuple(_items(secs.get("preconditions", []))),
            postconditions=tuple(_items(secs.get("postconditions", []))),
        )
    result.unmatched = [k for k in ops if k not in result.specs]
    if not result.specs and ops:
        result.warnings.append("no recognizable operation blocks in the response")
    return result


def _annotate(m: ModelPackage, specs: Dict[str, MethodSpec], requirement: str, warn: bool = True) -> ModelPackage:
    for c, o in list(m.operations()):
        key = qualified_name(c, o)
        spec = specs.get(key)
        if spec is None:
            if warn:
                log.warning("%s: no specification returned, using the requirement text", key)
            spec = MethodSpec.fallback(requirement.strip())
        m = attach_spec(m, key, spec)
    return m


def decompose(m: ModelPackage, requirement: str, session) -> Tuple[ModelPackage, DecompositionResult]:
    """Annotate every operation of ``m`` from a single chat exchange."""
    prompt = build_decomposition_prompt(m, requirement, session.templates)
    resp = session.ask("decompose", prompt)
    result = parse_decomposition_response(resp, m)
    for w in result.warnings:
        log.warning("decomposition: %s", w)
    return _annotate(m, result.specs, requirement), result


def passthrough_annotation(m: ModelPackage, requirement: str) -> ModelPackage:
    """Every operation gets the verbatim requirement as its summary; no LLM call."""
    if not requirement or not requirement.strip():
        raise EmptyRequirement("requirement text is empty")
    return _annotate(m, {}, requirement, warn=False)
