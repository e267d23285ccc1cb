import itertools
import json
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hybridgen.evaluation.metrics import DomainError, IncompleteSamples, SampleRecord, aggregate, estimator
from hybridgen.evaluation.report import emit_report, format_delta, render_table


def brute_force(n, c, k):
    """Fraction of k-subsets of n samples (the first c correct) holding a correct one."""
    subsets = list(itertools.combinations(range(n), k))
    return Fraction(sum(any(i < c for i in s) for s in subsets), len(subsets))


def records(approach, cs, n=5, compiled=None):
    out = []
    for p, c in enumerate(cs):
        cc = n if compiled is None else compiled[p]
        for i in range(n):
            ok = i < c
            out.append(SampleRecord(f"p{p:02d}", approach, i, ok or i < cc, 3, 3 if ok else 0, ok))
    return out


def test_matches_enumeration_up_to_eight():
    for n in range(1, 9):
        for c in range(n + 1):
            for k in range(1, n + 1):
                assert abs(estimator(n, c, k) - float(brute_force(n, c, k))) <= 1e-12, (n, c, k)


@pytest.mark.parametrize("n,c,k,want", [(5, 0, 1, 0.0), (5, 5, 3, 1.0), (5, 2, 3, 0.9), (5, 1, 1, 0.2)])
def test_spot_values(n, c, k, want):
    assert estimator(n, c, k) == pytest.approx(want, abs=1e-12)


@pytest.mark.parametrize("args", [(5, 6, 1), (5, -1, 1), (5, 2, 0), (5, 2, 6), (5.0, 2, 1), (5, True, 1)])
def test_domain_errors(args):
    with pytest.raises(DomainError):
        estimator(*args)


@st.composite
def triples(draw):
    n = draw(st.integers(1, 200))
    return n, draw(st.integers(0, n)), draw(st.integers(1, n))


@given(triples())
def test_monotone_in_c_and_k(t):
    n, c, k = t
    v = estimator(n, c, k)
    assert 0.0 <= v <= 1.0
    if c < n:
        assert estimator(n, c + 1, k) >= v - 1e-12
    if k < n:
        assert estimator(n, c, k + 1) >= v - 1e-12


def test_aggregate_means():
    report = aggregate(records("a", [3, 5]), [1, 3])
    assert report.pass_at("a", 1) == pytest.approx(0.8)
    assert report.compilation_at("a", 1) == 1.0 and report.compilation_at("a", 3) == 1.0
    assert report.per_problem[("a", "p00")] == (5, 3, 5)
    assert report.pass_at("a", 3) <= report.compilation_at("a", 3)


def test_aggregate_rejects_bad_input():
    recs = records("a", [3, 5])
    with pytest.raises(IncompleteSamples) as info:
        aggregate(recs[:-1], [1], n=5)
    assert info.value.problem_id == "p01"
    with pytest.raises(DomainError):
        aggregate(recs, [6])
    with pytest.raises(ValueError):
        SampleRecord("p", "a", 0, False, 3, 1, False)
    with pytest.raises(ValueError):
        SampleRecord("p", "a", 0, True, 3, 2, True)


def test_delta_formatting():
    assert format_delta(0.58, 0.75) == "↓23%"
    assert format_delta(0.89, 0.75) == "↑19%"
    assert format_delta(0.75, 0.75) == "–"
    assert format_delta(0.5, 0.0) == "n/a"


def reference_table_report():
    # 20 problems at n=5: 75 and 58 passing samples give means 0.75 and 0.58
    top = [4] * 15 + [3] * 5
    base = [3] * 18 + [2] * 2
    assert sum(top) == 75 and sum(base) == 58
    return aggregate(records("iecoregen", top) + records("base-r-cd-fix", base), [1])


def test_table_shows_relative_deltas():
    table = render_table(reference_table_report())
    rows = {line.split("|")[1].strip(): line for line in table.splitlines()[2:]}
    assert "0.75 (–)" in rows["iecoregen"]
    assert "0.58 (↓23%)" in rows["base-r-cd-fix"]


def test_single_approach_table_and_records(tmp_path):
    report = aggregate(records("solo", [2]), [1])
    table = emit_report(report, "text", tmp_path)
    lines = table.splitlines()
    assert len(lines) == 3 and [c.strip() for c in lines[0].split("|")[2:4]] == ["pass@1", "comp@1"]
    assert table.count("(–)") == 2
    rows = [json.loads(l) for l in (tmp_path / "records.jsonl").read_text().splitlines()]
    assert rows[0] == {"schema": "hybridgen-report", "version": 1, "n": 5, "ks": [1]}
    metric = next(r for r in rows[1:] if r["type"] == "metric")
    assert metric["pass"] == 0.4 and metric["deltaPass"] == 0.0
    assert sum(r["type"] == "sample" for r in rows[1:]) == 5
    with pytest.raises(ValueError):
        emit_report(report, "xml")
