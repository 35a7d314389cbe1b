"""Deterministic JSON, CSV and plain-text renderings of criterion reports."""

from __future__ import annotations

import csv
import io
import json

from .criteria import CriterionReport, InterlacingViolation, NormWitness
from .errors import InvalidInput
from .intervals import rational_to_str

__all__ = ["render_report", "parse_report", "FORMATS"]

FORMATS = ("json", "csv", "text")
CSV_HEADER = ["condition_id", "verdict", "rule", "x", "ratio_lo", "ratio_hi"]


def render_report(report: CriterionReport, fmt: str = "json") -> bytes:
    """Bytes that depend only on the report contents."""
    if fmt == "json":
        return (json.dumps(report.to_dict(), sort_keys=True, indent=2, ensure_ascii=True) + "\n").encode()
    if fmt == "csv":
        return _csv(report).encode()
    if fmt == "text":
        return _text(report).encode()
    raise InvalidInput(f"unknown report format {fmt!r}; expected one of {', '.join(FORMATS)}")


def parse_report(data) -> CriterionReport:
    if isinstance(data, (bytes, bytearray)):
        data = data.decode()
    return CriterionReport.from_dict(json.loads(data))


def _csv(report: CriterionReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for row in report.rows:
        if not row.checkpoints:
            w.writerow([row.condition_id, row.verdict, row.rule, "", "", ""])
        for cp in row.checkpoints:
            lo = hi = ""
            if cp.ratio is not None:
                lo, hi = rational_to_str(cp.ratio.lo), rational_to_str(cp.ratio.hi)
            w.writerow([row.condition_id, row.verdict, row.rule, rational_to_str(cp.x), lo, hi])
    return buf.getvalue()


def _short(v, digits=12) -> str:
    # text output only; JSON and CSV keep exact bounds
    return format(float(v), f".{digits}g")


def _text(report: CriterionReport) -> str:
    lines = [f"criterion report ({report.schema})", f"theorem: {report.theorem}"]
    field = report.metadata.get("field")
    if field:
        lines.append(f"base: {field.get('minpoly_text')}  [{field.get('classification', {}).get('kind')}]")
    lines.append("")
    for row in report.rows:
        lines.append(f"{row.condition_id:8} {row.verdict:14} {row.description}")
        if row.note:
            lines.append(f"{'':8} note: {row.note}")
        for cp in row.checkpoints:
            if cp.ratio is None:
                lines.append(f"{'':8} x={rational_to_str(cp.x)}")
            else:
                lines.append(f"{'':8} x={rational_to_str(cp.x)}  ratio in [{_short(cp.ratio.lo)}, {_short(cp.ratio.hi)}]")
    lines.append("")
    norm = [w for w in report.witnesses if isinstance(w, NormWitness)]
    inter = [w for w in report.witnesses if isinstance(w, InterlacingViolation)]
    if norm:
        lines.append(f"norm witnesses: {len(norm)}")
        for w in sorted(norm, key=lambda w: (w.u, w.N)):
            v = w.value_interval
            lines.append(f"  u={w.u} N={w.N} u*xi_N in [{_short(v.lo)}, {_short(v.hi)}] "
                         f"conj<={_short(w.conjugate_product.hi)} {w.conclusion}")
    if inter:
        lines.append(f"interlacing violations: {len(inter)}")
        for w in inter:
            lo, hi = w.window
            lines.append(f"  m={w.m} m+={w.m_next} mu={rational_to_str(w.mu)} "
                         f"window=[{rational_to_str(lo)}, {rational_to_str(hi)})")
    if not report.witnesses:
        lines.append("witnesses: none")
    failing = report.metadata.get("failing_count")
    if failing:
        lines.append(f"denominators without a witness: {failing}")
    return "\n".join(lines) + "\n"
