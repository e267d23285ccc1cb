"""Unbiased pass@k / compilation@k estimation and aggregation over problems."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple


class DomainError(ValueError):
    pass


class IncompleteSamples(ValueError):
    def __init__(self, problem_id: str, approach: str, found: int, expected: int):
        super().__init__(f"{approach}/{problem_id}: {found} samples, expected {expected}")
        self.problem_id = problem_id


def estimator(n: int, c: int, k: int) -> float:
    """1 - C(n-c, k) / C(n, k), as a running product of ratios."""
    for name, v in (("n", n), ("c", c), ("k", k)):
        if isinstance(v, bool) or not isinstance(v, int):
            raise DomainError(f"{name} must be an integer")
    if not 0 <= c <= n:
        raise DomainError(f"need 0 <= c <= n, got c={c}, n={n}")
    if not 1 <= k <= n:
        raise DomainError(f"need 1 <= k <= n, got k={k}, n={n}")
    if n - c < k:
        return 1.0
    # C(n-c,k)/C(n,k) = prod_{i=0}^{k-1} (n-c-i)/(n-i)
    ratio = 1.0
    for i in range(k):
        ratio *= (n - c - i) / (n - i)
    return 1.0 - ratio


@dataclass(frozen=True)
class SampleRecord:
    problem_id: str
    approach: str
    sample_index: int
    compiled: bool
    tests_total: int
    tests_passed: int
    passed: bool
    reason: Optional[str] = None

    def __post_init__(self):
        if not 0 <= self.tests_passed <= self.tests_total:
            raise ValueError("tests_passed must lie in [0, tests_total]")
        if self.passed and not (self.compiled and self.tests_passed == self.tests_total):
            raise ValueError("a passing sample must compile and pass every test")
        if not self.compiled and self.tests_passed:
            raise ValueError("a sample that does not compile passes no tests")

    def to_dict(self) -> dict:
        return {
            "problemId": self.problem_id,
            "approach": self.approach,
            "sampleIndex": self.sample_index,
            "compiled": self.compiled,
            "testsTotal": self.tests_total,
            "testsPassed": self.tests_passed,
            "passed": self.passed,
            "reason": self.reason,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SampleRecord":
        return cls(
            d["problemId"], d["approach"], d["sampleIndex"], d["compiled"],
            d["testsTotal"], d["testsPassed"], d["passed"], d.get("reason"),
        )


@dataclass
class MetricReport:
    approaches: List[str]
    ks: List[int]
    n: int
    # (approach, k) -> (pass@k, compilation@k)
    values: Dict[Tuple[str, int], Tuple[float, float]] = field(default_factory=dict)
    # (approach, problem) -> (n, c_pass, c_compile)
    per_problem: Dict[Tuple[str, str], Tuple[int, int, int]] = field(default_factory=dict)
    records: List[SampleRecord] = field(default_factory=list)

    def pass_at(self, approach: str, k: int) -> float:
        return self.values[(approach, k)][0]

    def compilation_at(self, approach: str, k: int) -> float:
        return self.values[(approach, k)][1]

    def problems(self) -> List[str]:
        return sorted({p for _, p in self.per_problem})


def aggregate(records: Iterable[SampleRecord], ks: Sequence[int], n: Optional[int] = None) -> MetricReport:
    """Per-problem estimates averaged without weights; approaches keep first-seen order."""
    records = list(records)
    approaches: List[str] = []
    groups: Dict[Tuple[str, str], List[SampleRecord]] = {}
    for r in records:
        if r.approach not in approaches:
            approaches.append(r.approach)
        groups.setdefault((r.approach, r.problem_id), []).append(r)
    if n is None:
        n = max((len(g) for g in groups.values()), default=0)
    for k in ks:
        if not 1 <= k <= n:
            raise DomainError(f"k={k} outside [1, n={n}]")
    report = MetricReport(approaches, list(ks), n, records=sorted(records, key=_order(approaches)))
    for (approach, pid), g in sorted(groups.items()):
        if len(g) != n or len({r.sample_index for r in g}) != n:
            raise IncompleteSamples(pid, approach, len(g), n)
        report.per_problem[(approach, pid)] = (n, sum(r.passed for r in g), sum(r.compiled for r in g))
    for approach in approaches:
        rows = [v for (a, _), v in sorted(report.per_problem.items()) if a == approach]
        for k in ks:
            p = sum(estimator(nn, cp, k) for nn, cp, _ in rows) / len(rows)
            c = sum(estimator(nn, cc, k) for nn, _, cc in rows) / len(rows)
            report.values[(approach, k)] = (p, c)
    return report


def _order(approaches: List[str]):
    pos = {a: i for i, a in enumerate(approaches)}
    return lambda r: (pos[r.approach], r.problem_id, r.sample_index)
