import dataclasses
import json

import httpx
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import TRANSCRIPTS
from hybridgen.llm import (
    ChatRequest,
    LiveProvider,
    RecordingProvider,
    ReplayMiss,
    ReplayProvider,
    Timeout,
    Transport,
    prompt_digest,
    read_transcript,
)

REQ = ChatRequest("sys", "user", "m", 0.2, 100, 0)


def ok(content="hello"):
    return httpx.Response(200, json={"choices": [{"message": {"role": "assistant", "content": content}}]})


def live(handler, **kw):
    sleeps = []
    provider = LiveProvider("http://llm.test/v1/chat/completions", api_key="k", transport=httpx.MockTransport(handler), sleep=sleeps.append, **kw)
    return provider, sleeps


def test_live_sends_openai_body():
    seen = []

    def handler(request):
        seen.append(request)
        return ok()

    provider, _ = live(handler)
    assert provider.complete(REQ) == "hello"
    body = json.loads(seen[0].content)
    assert body["messages"] == [{"role": "system", "content": "sys"}, {"role": "user", "content": "user"}]
    assert body["temperature"] == 0.2 and body["max_tokens"] == 100
    assert seen[0].headers["authorization"] == "Bearer k"


def test_live_retries_transient_failures():
    statuses = iter([429, 503, 200])

    def handler(request):
        code = next(statuses)
        return ok() if code == 200 else httpx.Response(code, text="busy")

    provider, sleeps = live(handler, max_retries=3, backoff=0.5)
    assert provider.complete(REQ) == "hello"
    assert sleeps == [0.5, 1.0]


def test_live_gives_up_after_max_retries():
    provider, sleeps = live(lambda r: httpx.Response(500, text="down"), max_retries=2)
    with pytest.raises(Transport) as info:
        provider.complete(REQ)
    assert info.value.status == 500 and len(sleeps) == 2


def test_live_does_not_retry_client_errors():
    provider, sleeps = live(lambda r: httpx.Response(401, text="no"))
    with pytest.raises(Transport):
        provider.complete(REQ)
    assert sleeps == []


def test_live_timeout_and_malformed_body():
    def slow(request):
        raise httpx.ReadTimeout("slow", request=request)

    provider, _ = live(slow, max_retries=1)
    with pytest.raises(Timeout):
        provider.complete(REQ)
    provider, _ = live(lambda r: httpx.Response(200, json={"choices": []}))
    with pytest.raises(Transport):
        provider.complete(REQ)


def test_digest_ignores_max_tokens_only():
    base = prompt_digest(REQ)
    assert prompt_digest(dataclasses.replace(REQ, max_tokens=7)) == base
    for change in (
        {"system_text": "x"},
        {"user_text": "x"},
        {"model_name": "x"},
        {"temperature": 0.3},
        {"sample_index": 1},
    ):
        assert prompt_digest(dataclasses.replace(REQ, **change)) != base, change
    assert len(base) == 64 and int(base, 16) >= 0


@given(st.text(), st.text(), st.floats(0, 2), st.integers(0, 50))
def test_digest_is_a_function_of_its_fields(system, user, temperature, index):
    a = ChatRequest(system, user, "m", temperature, 10, index)
    b = ChatRequest(system, user, "m", temperature, 999, index)
    assert prompt_digest(a) == prompt_digest(b)


def test_request_validation():
    for bad in ({"temperature": 2.5}, {"max_tokens": 0}, {"sample_index": -1}):
        with pytest.raises(ValueError):
            dataclasses.replace(REQ, **bad)


def test_record_then_replay(tmp_path, no_network):
    path = tmp_path / "t.jsonl"
    from hybridgen.llm import ScriptedProvider

    recorder = RecordingProvider(ScriptedProvider(lambda r: r.user_text.upper()), path, clock=lambda: "T")
    assert recorder.complete(REQ) == "USER"
    lines = path.read_text().splitlines()
    assert json.loads(lines[0]) == {"schema": "hybridgen-transcript", "version": 1}
    rec = read_transcript(path)[0]
    assert rec.prompt_digest == prompt_digest(REQ)
    assert rec.meta["recordedAt"] == "T" and rec.meta["model"] == "m"
    replay = ReplayProvider(path)
    assert replay.complete(REQ) == "USER"
    with pytest.raises(ReplayMiss) as info:
        replay.complete(dataclasses.replace(REQ, sample_index=3))
    assert info.value.digest == prompt_digest(dataclasses.replace(REQ, sample_index=3))


def test_replay_rejects_foreign_files(tmp_path):
    path = tmp_path / "x.jsonl"
    path.write_text('{"schema": "other", "version": 1}\n')
    from hybridgen.llm import LLMError

    with pytest.raises(LLMError):
        ReplayProvider(path)


def test_shipped_transcripts_load():
    provider = ReplayProvider(TRANSCRIPTS)
    assert len(provider) > 100
