import importlib.util
import socket
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from hybridgen.evaluation import load_bench, load_problem
from hybridgen.minioo import MiniOOBackend
from hybridgen.model import read_model_file

ROOT = Path(__file__).resolve().parent.parent
BENCH = ROOT / "bench"
TRANSCRIPTS = BENCH / "transcripts"
FIXTURES = Path(__file__).resolve().parent / "fixtures"

# one line per acceptance criterion, repeated in the terminal summary
ACCEPTANCE_LINES = []

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def load_recorder():
    """The fixture-recording script, imported by path (it is not a package module)."""
    spec = importlib.util.spec_from_file_location("record_fixtures", ROOT / "scripts" / "record_fixtures.py")
    mod = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(mod)
    return mod


@pytest.fixture
def backend():
    return MiniOOBackend()


@pytest.fixture(scope="session")
def problems():
    return load_bench(BENCH)


@pytest.fixture(scope="session")
def employee():
    return load_problem(BENCH / "employee")


@pytest.fixture
def employee_model():
    return read_model_file(BENCH / "employee" / "model.cmdl")


@pytest.fixture
def no_network(monkeypatch):
    """Fail loudly if anything tries to open a socket."""

    def guard(*args, **kwargs):
        raise AssertionError("network access attempted")

    monkeypatch.setattr(socket.socket, "connect", guard)
    monkeypatch.setattr(socket, "create_connection", guard)


def annotated_model(problem):
    from hybridgen.decompose import passthrough_annotation

    return passthrough_annotation(problem.model(), problem.requirement)


def skeleton_of(problem, backend=None):
    return (backend or MiniOOBackend()).generate_skeleton(annotated_model(problem))


def typo_units():
    """The injected-typo fixture, in skeleton order (enums, classes, factory)."""
    from hybridgen.backend import SourceUnit

    root = FIXTURES / "typo" / "units"
    order = {"Level": 0, "Employee": 1, "HrFactory": 2}
    paths = sorted(root.rglob("*.mo"), key=lambda p: order.get(p.stem, 9))
    return [SourceUnit(p.relative_to(root).as_posix(), p.stem, p.read_text(encoding="utf-8")) for p in paths]


def replay_settings(**kw):
    from hybridgen.evaluation import RunSettings
    from hybridgen.llm import ReplayProvider
    from hybridgen.session import LLMSettings

    kw.setdefault("provider", ReplayProvider(TRANSCRIPTS))
    kw.setdefault("llm", LLMSettings("reference-fixture", 0.8))
    kw.setdefault("provider_mode", "replay")
    return RunSettings(backend=MiniOOBackend(), **kw)


def reference_units(problem, backend=None):
    """The skeleton with every operation body taken from the reference solution."""
    from hybridgen.completion import class_targets

    backend = backend or MiniOOBackend()
    model = annotated_model(problem)
    solution = {u.class_id: u for u in backend.split_units((problem.root / "reference" / "solution.mo").read_text())}
    out = []
    for u in backend.generate_skeleton(model):
        if u.class_id in solution:
            u, _ = backend.merge(u, solution[u.class_id], class_targets(model, u.class_id))
        out.append(u)
    return out


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
