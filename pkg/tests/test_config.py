import pytest

from conftest import TRANSCRIPTS
from hybridgen.config import ConfigError, load_config
from hybridgen.llm import LiveProvider, RecordingProvider, ReplayProvider

BASE = {("provider", "transcripts"): str(TRANSCRIPTS)}


def cfg(tmp_path=None, text=None, env=None, **over):
    path = None
    if text is not None:
        path = tmp_path / "run.ini"
        path.write_text(text)
    overrides = dict(BASE)
    overrides.update({tuple(k.split("__")): v for k, v in over.items()})
    return load_config(path, env or {}, overrides)


def test_defaults():
    c = cfg()
    assert (c.mode, c.model_name, c.n, c.ks, c.jobs) == ("replay", "reference-fixture", 5, [1, 3], 1)
    assert c.temperature == 0.8 and c.max_fix_iterations == 3 and not c.flags.any()
    assert isinstance(c.provider(), ReplayProvider)


def test_precedence(tmp_path):
    text = "[eval]\nn = 4\njobs = 2\n[provider]\ntemperature = 0.5\n"
    c = cfg(tmp_path, text)
    assert (c.n, c.jobs, c.temperature) == (4, 2, 0.5)
    c = cfg(tmp_path, text, env={"HYBRIDGEN_EVAL_JOBS": "3", "HYBRIDGEN_PROVIDER_TEMPERATURE": "0.1"})
    assert (c.jobs, c.temperature) == (3, 0.1)
    c = cfg(tmp_path, text, env={"HYBRIDGEN_EVAL_JOBS": "3"}, eval__jobs=7, pipeline__no_fix=True)
    assert c.jobs == 7 and c.flags.no_fix


def test_single_sample_uses_low_temperature():
    assert cfg(eval__n=1, eval__k=[1]).temperature == 0.2


@pytest.mark.parametrize(
    "text",
    [
        "[nonsense]\nx = 1\n",
        "[eval]\ncolour = red\n",
        "[eval]\nk = 1,9\n",
        "[eval]\nn = five\n",
        "[provider]\nmode = psychic\n",
        "[provider]\ntemperature = 3\n",
        "[backend]\nname = external\n",
        "[backend]\nname = external\ncommand = cc {files}\npattern = (?P<line>\\d+)\n",
        "[pipeline]\ntest_source = oracle\n",
        "[pipeline]\nno_fix = maybe\n",
        "[pipeline]\nmax_fix_iterations = -1\n",
        "not an ini file",
    ],
)
def test_invalid_settings(tmp_path, text):
    with pytest.raises(ConfigError):
        cfg(tmp_path, text)


def test_replay_needs_existing_transcripts(tmp_path):
    with pytest.raises(ConfigError):
        load_config(None, {}, {("provider", "transcripts"): str(tmp_path / "missing")})


def test_live_and_record_providers(tmp_path):
    live = cfg(provider__mode="live").provider({"HYBRIDGEN_API_KEY": "secret"})
    assert isinstance(live, LiveProvider)
    assert live.client.headers["authorization"] == "Bearer secret"
    rec = cfg(provider__mode="record", provider__transcripts=str(tmp_path)).provider({})
    assert isinstance(rec, RecordingProvider) and rec.writer.path == tmp_path / "transcript.jsonl"


def test_external_backend_from_config():
    c = cfg(backend__name="external", backend__command="minioo-check {files}")
    assert c.backend().name == "external:minioo"
