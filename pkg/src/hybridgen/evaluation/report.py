"""Render a MetricReport as an aligned table and as a JSONL record file."""

from __future__ import annotations

import json
from decimal import ROUND_HALF_UP, Decimal
from pathlib import Path
from typing import List, Optional, Tuple

from .metrics import MetricReport

REPORT_SCHEMA = "hybridgen-report"
REPORT_VERSION = 1


def relative_delta(value: float, ref: float) -> Optional[float]:
    if value == ref:
        return 0.0
    if ref == 0:
        return None
    return (value - ref) / ref


def format_delta(value: float, ref: float) -> str:
    """``↓23%`` / ``↑5%``; ``–`` when equal; ``n/a`` against a zero reference."""
    if value == ref:
        return "–"
    d = relative_delta(value, ref)
    if d is None:
        return "n/a"
    pct = Decimal(str(abs(d) * 100)).quantize(Decimal("1"), rounding=ROUND_HALF_UP)
    return f"{'↑' if d > 0 else '↓'}{pct}%"


def _columns(report: MetricReport) -> List[Tuple[str, int, int]]:
    return [(f"pass@{k}", k, 0) for k in report.ks] + [(f"comp@{k}", k, 1) for k in report.ks]


def render_table(report: MetricReport) -> str:
    cols = _columns(report)
    ref = report.approaches[0] if report.approaches else None
    header = ["approach"] + [c[0] for c in cols]
    rows = []
    for a in report.approaches:
        row = [a]
        for _, k, idx in cols:
            v = report.values[(a, k)][idx]
            r = report.values[(ref, k)][idx]
            row.append(f"{v:.2f} ({format_delta(v, r) if a != ref else '–'})")
        rows.append(row)
    widths = [max(len(x) for x in col) for col in zip(header, *rows)]

    def line(cells):
        return "| " + " | ".join(c.ljust(w) for c, w in zip(cells, widths)) + " |"

    out = [line(header), "|" + "|".join("-" * (w + 2) for w in widths) + "|"]
    out += [line(r) for r in rows]
    return "\n".join(out) + "\n"


def render_records(report: MetricReport) -> str:
    ref = report.approaches[0] if report.approaches else None
    lines = [json.dumps({"schema": REPORT_SCHEMA, "version": REPORT_VERSION, "n": report.n, "ks": report.ks}, sort_keys=True)]
    for a in report.approaches:
        for k in report.ks:
            p, c = report.values[(a, k)]
            rp, rc = report.values[(ref, k)]
            lines.append(json.dumps({
                "type": "metric", "approach": a, "k": k, "pass": p, "compilation": c,
                "deltaPass": relative_delta(p, rp), "deltaCompilation": relative_delta(c, rc),
            }, sort_keys=True, ensure_ascii=False))
    pos = {a: i for i, a in enumerate(report.approaches)}
    for (a, pid), (n, cp, cc) in sorted(report.per_problem.items(), key=lambda kv: (pos[kv[0][0]], kv[0][1])):
        lines.append(json.dumps({"type": "problem", "approach": a, "problemId": pid, "n": n, "cPass": cp, "cCompile": cc}, sort_keys=True))
    for r in report.records:
        lines.append(json.dumps(dict(type="sample", **r.to_dict()), sort_keys=True, ensure_ascii=False))
    return "\n".join(lines) + "\n"


def emit_report(report: MetricReport, fmt: str = "text", out_dir: Optional[Path] = None) -> str:
    """Return the table (``text``) or the record file (``jsonl``); optionally write both."""
    table, records = render_table(report), render_records(report)
    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "report.txt").write_text(table, encoding="utf-8")
        (out_dir / "records.jsonl").write_text(records, encoding="utf-8")
    if fmt == "text":
        return table
    if fmt == "jsonl":
        return records
    raise ValueError(f"unknown report format {fmt!r}")
