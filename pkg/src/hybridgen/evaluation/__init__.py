"""Benchmark loading, sample orchestration, metrics and reports."""

from .bench import BenchError, Problem, load_bench, load_problem
from .metrics import DomainError, IncompleteSamples, MetricReport, SampleRecord, aggregate, estimator
from .report import emit_report, format_delta, relative_delta, render_records, render_table
from .runner import (
    APPROACH_KINDS,
    BASE_R,
    BASE_R_CD,
    BASE_R_CD_FIX,
    BASELINES,
    IECOREGEN,
    ApproachConfig,
    RunSettings,
    generate_tests,
    provider_failures,
    run_eval,
    run_sample,
)

__all__ = [
    "APPROACH_KINDS",
    "BASE_R",
    "BASE_R_CD",
    "BASE_R_CD_FIX",
    "BASELINES",
    "IECOREGEN",
    "ApproachConfig",
    "BenchError",
    "DomainError",
    "IncompleteSamples",
    "MetricReport",
    "Problem",
    "RunSettings",
    "SampleRecord",
    "aggregate",
    "emit_report",
    "estimator",
    "format_delta",
    "generate_tests",
    "load_bench",
    "load_problem",
    "provider_failures",
    "relative_delta",
    "render_records",
    "render_table",
    "run_eval",
    "run_sample",
]
