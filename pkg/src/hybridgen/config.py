"""Run configuration from an INI-style file, ``HYBRIDGEN_*`` variables and CLI flags.

Precedence, lowest first: built-in defaults, the file, the environment, flags.
An environment variable ``HYBRIDGEN_<SECTION>_<KEY>`` overrides ``[section] key``.
"""

from __future__ import annotations

import configparser
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Tuple

from .ablation import AblationFlags
from .backend import ToolConfig, get_backend
from .backend.external import DEFAULT_PATTERN
from .llm import LiveProvider, Provider, RecordingProvider, ReplayProvider
from .prompting import Templates
from .session import LLMSettings

MODES = ("live", "record", "replay")
DEFAULT_MODEL = "reference-fixture"

DEFAULTS: Dict[str, Dict[str, str]] = {
    "provider": {
        "mode": "replay",
        "endpoint": "https://api.openai.com/v1/chat/completions",
        "model": DEFAULT_MODEL,
        "temperature": "",
        "max_tokens": "4096",
        "timeout": "120",
        "max_retries": "3",
        "transcripts": "bench/transcripts",
        "api_key_env": "HYBRIDGEN_API_KEY",
    },
    "backend": {
        "name": "minioo",
        "command": "",
        "pattern": DEFAULT_PATTERN,
        "timeout": "60",
        "step_budget": "1000000",
    },
    "pipeline": {
        "max_fix_iterations": "3",
        "context_char_budget": "8000",
        "no_decompose": "false",
        "no_compress": "false",
        "no_context": "false",
        "no_fix": "false",
        "prompt_dir": "",
        "test_source": "auto",
    },
    "eval": {
        "n": "5",
        "k": "1,3",
        "jobs": "1",
        "workspace": "workspace",
    },
}


class ConfigError(Exception):
    pass


@dataclass
class RunConfig:
    mode: str
    endpoint: str
    model_name: str
    temperature: float
    max_tokens: int
    timeout: float
    max_retries: int
    transcripts: Optional[Path]
    api_key_env: str
    backend_name: str
    tool: Optional[ToolConfig]
    step_budget: int
    max_fix_iterations: int
    context_budget: int
    flags: AblationFlags
    prompt_dir: Optional[Path]
    test_source: str
    n: int
    ks: List[int]
    jobs: int
    workspace: Path
    raw: Dict[str, Dict[str, str]] = field(default_factory=dict, repr=False)

    def llm_settings(self) -> LLMSettings:
        return LLMSettings(self.model_name, self.temperature, self.max_tokens)

    def templates(self) -> Templates:
        return Templates(self.prompt_dir)

    def backend(self):
        return get_backend(self.backend_name, self.tool, self.step_budget)

    def provider(self, env: Optional[Mapping[str, str]] = None) -> Provider:
        env = os.environ if env is None else env
        if self.mode == "replay":
            return ReplayProvider(self.transcripts)
        live = LiveProvider(
            self.endpoint,
            env.get(self.api_key_env),
            timeout=self.timeout,
            max_retries=self.max_retries,
        )
        if self.mode == "record":
            path = self.transcripts
            if path.suffix != ".jsonl":
                path = path / "transcript.jsonl"
            return RecordingProvider(live, path)
        return live


def _bool(section: str, key: str, value: str) -> bool:
    low = value.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off", ""):
        return False
    raise ConfigError(f"[{section}] {key}: not a boolean: {value!r}")


def _num(section: str, key: str, value: str, kind=int):
    try:
        return kind(value)
    except ValueError:
        raise ConfigError(f"[{section}] {key}: not a number: {value!r}") from None


def _ks(value: str) -> List[int]:
    try:
        return [int(x) for x in value.replace(" ", "").split(",") if x]
    except ValueError:
        raise ConfigError(f"[eval] k: expected comma-separated integers, got {value!r}") from None


def load_config(
    path: Optional[Path] = None,
    env: Optional[Mapping[str, str]] = None,
    overrides: Optional[Mapping[Tuple[str, str], object]] = None,
) -> RunConfig:
    env = os.environ if env is None else env
    raw = {s: dict(v) for s, v in DEFAULTS.items()}
    if path is not None:
        parser = configparser.ConfigParser(interpolation=None)
        try:
            with open(path, encoding="utf-8") as fh:
                parser.read_file(fh)
        except (OSError, configparser.Error) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        for section in parser.sections():
            if section not in raw:
                raise ConfigError(f"unknown config section [{section}]")
            for key, value in parser.items(section):
                if key not in raw[section]:
                    raise ConfigError(f"unknown key [{section}] {key}")
                raw[section][key] = value
    for section, keys in raw.items():
        for key in keys:
            var = f"HYBRIDGEN_{section}_{key}".upper()
            if var in env:
                keys[key] = env[var]
    for (section, key), value in (overrides or {}).items():
        if value is None:
            continue
        if isinstance(value, bool):
            value = "true" if value else "false"
        elif isinstance(value, (list, tuple)):
            value = ",".join(str(v) for v in value)
        raw[section][key] = str(value)
    return _build(raw)


def _build(raw: Dict[str, Dict[str, str]]) -> RunConfig:
    p, b, pl, e = raw["provider"], raw["backend"], raw["pipeline"], raw["eval"]
    mode = p["mode"].strip().lower()
    if mode not in MODES:
        raise ConfigError(f"[provider] mode must be one of {', '.join(MODES)}")
    transcripts = Path(p["transcripts"]) if p["transcripts"].strip() else None
    if mode in ("replay", "record") and transcripts is None:
        raise ConfigError(f"{mode} mode needs [provider] transcripts")
    if mode == "replay" and not transcripts.exists():
        raise ConfigError(f"transcripts not found: {transcripts}")
    n = _num("eval", "n", e["n"])
    ks = _ks(e["k"])
    if n < 1:
        raise ConfigError("[eval] n must be >= 1")
    bad = [k for k in ks if not 1 <= k <= n]
    if bad or not ks:
        raise ConfigError(f"[eval] k values must lie in [1, n={n}]")
    temperature = _num("provider", "temperature", p["temperature"], float) if p["temperature"].strip() else (0.8 if n > 1 else 0.2)
    if not 0 <= temperature <= 2:
        raise ConfigError("[provider] temperature must lie in [0, 2]")
    backend_name = b["name"].strip().lower()
    tool = None
    if backend_name == "external":
        if not b["command"].strip():
            raise ConfigError("the external backend needs [backend] command")
        try:
            tool = ToolConfig(b["command"], b["pattern"], _num("backend", "timeout", b["timeout"], float))
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    elif backend_name != "minioo":
        raise ConfigError(f"unknown backend {backend_name!r}")
    test_source = pl["test_source"].strip().lower()
    if test_source not in ("auto", "canonical", "llm"):
        raise ConfigError("[pipeline] test_source must be auto, canonical or llm")
    fix = _num("pipeline", "max_fix_iterations", pl["max_fix_iterations"])
    if fix < 0:
        raise ConfigError("[pipeline] max_fix_iterations must be >= 0")
    return RunConfig(
        mode=mode,
        endpoint=p["endpoint"],
        model_name=p["model"],
        temperature=temperature,
        max_tokens=_num("provider", "max_tokens", p["max_tokens"]),
        timeout=_num("provider", "timeout", p["timeout"], float),
        max_retries=_num("provider", "max_retries", p["max_retries"]),
        transcripts=transcripts,
        api_key_env=p["api_key_env"],
        backend_name=backend_name,
        tool=tool,
        step_budget=_num("backend", "step_budget", b["step_budget"]),
        max_fix_iterations=fix,
        context_budget=_num("pipeline", "context_char_budget", pl["context_char_budget"]),
        flags=AblationFlags(
            _bool("pipeline", "no_decompose", pl["no_decompose"]),
            _bool("pipeline", "no_compress", pl["no_compress"]),
            _bool("pipeline", "no_context", pl["no_context"]),
            _bool("pipeline", "no_fix", pl["no_fix"]),
        ),
        prompt_dir=Path(pl["prompt_dir"]) if pl["prompt_dir"].strip() else None,
        test_source=test_source,
        n=n,
        ks=ks,
        jobs=max(1, _num("eval", "jobs", e["jobs"])),
        workspace=Path(e["workspace"]),
        raw=raw,
    )
