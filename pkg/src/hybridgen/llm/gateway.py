"""Chat-completion providers: live HTTP, record, replay and scripted."""

from __future__ import annotations

import datetime as _dt
import hashlib
import json
import logging
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, Iterable, List, Optional, Union

import httpx

from ..tokens import count_tokens

log = logging.getLogger(__name__)

TRANSCRIPT_SCHEMA = "hybridgen-transcript"
TRANSCRIPT_VERSION = 1


class LLMError(Exception):
    pass


class Transport(LLMError):
    def __init__(self, status: Optional[int], detail: str = ""):
        super().__init__(f"transport failure (status {status}){': ' + detail if detail else ''}")
        self.status = status


class Timeout(LLMError):
    pass


class ReplayMiss(LLMError):
    def __init__(self, digest: str):
        super().__init__(f"no recorded response for prompt digest {digest}")
        self.digest = digest


@dataclass(frozen=True)
class ChatRequest:
    system_text: str
    user_text: str
    model_name: str
    temperature: float = 0.2
    max_tokens: int = 4096
    sample_index: int = 0

    def __post_init__(self):
        if not 0.0 <= self.temperature <= 2.0:
            raise ValueError(f"temperature {self.temperature} outside [0, 2]")
        if self.max_tokens <= 0:
            raise ValueError("max_tokens must be positive")
        if self.sample_index < 0:
            raise ValueError("sample_index must be non-negative")


def prompt_digest(req: ChatRequest) -> str:
    """sha256 over a canonical JSON rendering of the identifying fields."""
    payload = {
        "system": req.system_text,
        "user": req.user_text,
        "model": req.model_name,
        "temperature": float(req.temperature),
        "sampleIndex": int(req.sample_index),
    }
    canon = json.dumps(payload, sort_keys=True, separators=(",", ":"), ensure_ascii=False)
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()


@dataclass
class TranscriptRecord:
    prompt_digest: str
    response_text: str
    meta: Dict[str, object] = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(
            {"promptDigest": self.prompt_digest, "responseText": self.response_text, "meta": self.meta},
            sort_keys=True,
            ensure_ascii=False,
        )

    @classmethod
    def from_json(cls, line: str) -> "TranscriptRecord":
        d = json.loads(line)
        return cls(d["promptDigest"], d["responseText"], d.get("meta", {}))


def _header() -> str:
    return json.dumps({"schema": TRANSCRIPT_SCHEMA, "version": TRANSCRIPT_VERSION}, sort_keys=True)


def read_transcript(path: Path) -> List[TranscriptRecord]:
    records = []
    with open(path, encoding="utf-8") as fh:
        for n, line in enumerate(fh):
            line = line.strip()
            if not line:
                continue
            if n == 0:
                head = json.loads(line)
                if head.get("schema") != TRANSCRIPT_SCHEMA:
                    raise LLMError(f"{path}: not a transcript file")
                if head.get("version") != TRANSCRIPT_VERSION:
                    raise LLMError(f"{path}: unsupported transcript version {head.get('version')}")
                continue
            records.append(TranscriptRecord.from_json(line))
    return records


class TranscriptWriter:
    """Append-only transcript file; one writer lock per instance."""

    def __init__(self, path: Union[str, Path]):
        self.path = Path(path)
        self._lock = threading.Lock()

    def append(self, record: TranscriptRecord) -> None:
        with self._lock:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            fresh = not self.path.exists() or self.path.stat().st_size == 0
            with open(self.path, "a", encoding="utf-8") as fh:
                if fresh:
                    fh.write(_header() + "\n")
                fh.write(record.to_json() + "\n")


class Provider:
    def complete(self, req: ChatRequest) -> str:
        raise NotImplementedError


def complete_chat(provider: Provider, req: ChatRequest) -> str:
    return provider.complete(req)


class LiveProvider(Provider):
    """OpenAI-style ``/chat/completions`` client with retry on 429 and 5xx."""

    def __init__(
        self,
        endpoint: str,
        api_key: Optional[str] = None,
        timeout: float = 120.0,
        max_retries: int = 3,
        backoff: float = 1.0,
        transport: Optional[httpx.BaseTransport] = None,
        sleep: Callable[[float], None] = time.sleep,
    ):
        self.endpoint = endpoint
        self.max_retries = max_retries
        self.backoff = backoff
        self.sleep = sleep
        headers = {"Content-Type": "application/json"}
        if api_key:
            headers["Authorization"] = f"Bearer {api_key}"
        self.client = httpx.Client(headers=headers, timeout=timeout, transport=transport)

    def _retry(self, attempt: int, reason: str) -> bool:
        if attempt >= self.max_retries:
            return False
        delay = self.backoff * (2 ** attempt)
        log.warning("transient LLM failure (%s); retry %d/%d in %.2fs", reason, attempt + 1, self.max_retries, delay)
        self.sleep(delay)
        return True

    def complete(self, req: ChatRequest) -> str:
        body = {
            "model": req.model_name,
            "messages": [
                {"role": "system", "content": req.system_text},
                {"role": "user", "content": req.user_text},
            ],
            "temperature": req.temperature,
            "max_tokens": req.max_tokens,
        }
        attempt = 0
        while True:
            try:
                resp = self.client.post(self.endpoint, json=body)
            except httpx.TimeoutException as exc:
                if self._retry(attempt, "timeout"):
                    attempt += 1
                    continue
                raise Timeout(str(exc)) from exc
            except httpx.TransportError as exc:
                if self._retry(attempt, type(exc).__name__):
                    attempt += 1
                    continue
                raise Transport(None, str(exc)) from exc
            if resp.status_code == 429 or resp.status_code >= 500:
                if self._retry(attempt, f"HTTP {resp.status_code}"):
                    attempt += 1
                    continue
                raise Transport(resp.status_code, resp.text[:200])
            if resp.status_code != 200:
                raise Transport(resp.status_code, resp.text[:200])
            try:
                return resp.json()["choices"][0]["message"]["content"]
            except (ValueError, KeyError, IndexError, TypeError) as exc:
                raise Transport(resp.status_code, f"malformed response body: {exc}") from exc

    def close(self):
        self.client.close()


class ScriptedProvider(Provider):
    """Answers from a Python callable; for tests and fixture authoring."""

    def __init__(self, respond: Callable[[ChatRequest], str]):
        self.respond = respond
        self.calls: List[ChatRequest] = []
        self._lock = threading.Lock()

    def complete(self, req: ChatRequest) -> str:
        with self._lock:
            self.calls.append(req)
        return self.respond(req)


class RecordingProvider(Provider):
    def __init__(self, inner: Provider, path: Union[str, Path], clock: Callable[[], str] = None):
        self.inner = inner
        self.writer = TranscriptWriter(path)
        self.clock = clock or (lambda: _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"))

    def complete(self, req: ChatRequest) -> str:
        text = self.inner.complete(req)
        meta = {
            "recordedAt": self.clock(),
            "model": req.model_name,
            "promptTokens": count_tokens(req.system_text) + count_tokens(req.user_text),
            "responseTokens": count_tokens(text),
        }
        self.writer.append(TranscriptRecord(prompt_digest(req), text, meta))
        return text


class ReplayProvider(Provider):
    """Serves recorded responses by digest; never touches the network."""

    def __init__(self, sources: Union[str, Path, Iterable[Union[str, Path]]]):
        if isinstance(sources, (str, Path)):
            sources = [sources]
        index: Dict[str, str] = {}
        for src in sources:
            src = Path(src)
            files = sorted(src.glob("*.jsonl")) if src.is_dir() else [src]
            for f in files:
                for rec in read_transcript(f):
                    index.setdefault(rec.prompt_digest, rec.response_text)
        self._index = index

    def __len__(self):
        return len(self._index)

    def complete(self, req: ChatRequest) -> str:
        digest = prompt_digest(req)
        try:
            return self._index[digest]
        except KeyError:
            raise ReplayMiss(digest) from None
