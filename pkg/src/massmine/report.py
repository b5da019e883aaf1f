"""Rendering findings as JSON/text/CSV, the tester worklist, and corpus totals."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .detector import CandidatePair, FlaggedCounts, OperationRef, SpecReport
from .extract import AttributeRecord
from .loader import Diagnostic

__all__ = [
    "FORMATS",
    "UnknownFormat",
    "CorpusRow",
    "CorpusSummary",
    "display_ratio",
    "report_to_dict",
    "report_from_dict",
    "render_report",
    "export_records",
    "export_downstream",
    "aggregate",
    "render_summary",
    "CSV_HEADER",
    "SUMMARY_HEADER",
]

FORMATS = ("json", "text", "csv")
CSV_HEADER = ("write_method", "write_path", "attribute", "read_method", "read_path", "similarity")
SUMMARY_HEADER = (
    "api",
    "total_endpoints",
    "total_operations",
    "flagged_endpoints",
    "flagged_operations",
    "flagged_attributes",
)


class UnknownFormat(ValueError):
    pass


def display_ratio(value: Fraction, places: int = 2) -> str:
    """Round half up to ``places`` decimals: ``2/3 -> "0.67"``."""
    value = Fraction(value)
    scale = 10**places
    scaled = (value.numerator * scale * 2 + value.denominator) // (2 * value.denominator)
    whole, frac = divmod(scaled, scale)
    return f"{whole}.{frac:0{places}d}" if places else str(whole)


# -- JSON form ----------------------------------------------------------------


def _pair_to_dict(pair: CandidatePair) -> dict:
    return {
        "write": {"method": pair.write_op.method, "path": pair.write_op.path},
        "read": {"method": pair.read_op.method, "path": pair.read_op.path},
        "similarity": {"exact": str(pair.similarity), "display": display_ratio(pair.similarity)},
        "sizes": {"res_count": pair.res_count, "req_count": pair.req_count},
        "candidates": [a.to_dict() for a in pair.candidate_attrs],
    }


def report_to_dict(report: SpecReport) -> dict:
    return {
        "source_name": report.source_name,
        "tool_version": report.tool_version,
        "config": dict(report.config),
        "totals": {"endpoints": report.total_endpoints, "operations": report.total_operations},
        "flagged": {
            "endpoints": report.flagged.endpoints,
            "operations": report.flagged.operations,
            "attributes": report.flagged.attributes,
        },
        "pairs": [_pair_to_dict(p) for p in report.pairs],
        "warnings": [w.to_dict() for w in report.warnings],
    }


def report_from_dict(data: dict) -> SpecReport:
    pairs = tuple(
        CandidatePair(
            write_op=OperationRef(p["write"]["method"], p["write"]["path"]),
            read_op=OperationRef(p["read"]["method"], p["read"]["path"]),
            similarity=Fraction(p["similarity"]["exact"]),
            candidate_attrs=tuple(AttributeRecord.from_dict(a) for a in p["candidates"]),
            res_count=p["sizes"]["res_count"],
            req_count=p["sizes"]["req_count"],
        )
        for p in data["pairs"]
    )
    return SpecReport(
        source_name=data["source_name"],
        total_endpoints=data["totals"]["endpoints"],
        total_operations=data["totals"]["operations"],
        flagged=FlaggedCounts(**data["flagged"]),
        pairs=pairs,
        warnings=tuple(Diagnostic(**w) for w in data["warnings"]),
        config=dict(data["config"]),
        tool_version=data["tool_version"],
    )


def _dump_json(obj) -> bytes:
    return (json.dumps(obj, indent=2, ensure_ascii=False) + "\n").encode("utf-8")


# -- text / csv ----------------------------------------------------------------


def _render_text(report: SpecReport) -> str:
    f = report.flagged
    lines = [
        f"{report.source_name}: {report.total_endpoints} endpoints, {report.total_operations} operations",
        f"flagged: {f.endpoints} endpoints, {f.operations} operations, {f.attributes} attributes",
    ]
    if not report.pairs:
        lines.append("no mass assignment candidates")
    for pair in report.pairs:
        lines.append("")
        lines.append(
            f"{pair.write_op}  <- similar to  {pair.read_op}"
            f"  (similarity {display_ratio(pair.similarity)} = {pair.similarity},"
            f" response {pair.res_count} > request {pair.req_count})"
        )
        for attr in pair.candidate_attrs:
            note = "  [declared readOnly]" if attr.declared_readonly else ""
            lines.append(f"  candidate {attr.raw_name}  ({attr.location})  #{attr.pointer}{note}")
    for w in report.warnings:
        lines.append(f"warning: {w.kind} at #{w.json_pointer}: {w.message}")
    return "\n".join(lines) + "\n"


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _render_csv(report: SpecReport) -> str:
    rows = [
        (
            pair.write_op.method,
            pair.write_op.path,
            attr.raw_name,
            pair.read_op.method,
            pair.read_op.path,
            display_ratio(pair.similarity),
        )
        for pair in report.pairs
        for attr in pair.candidate_attrs
    ]
    return _csv_text(CSV_HEADER, rows)


def render_report(report: SpecReport, format: str = "json") -> bytes:
    if format == "json":
        return _dump_json(report_to_dict(report))
    if format == "text":
        return _render_text(report).encode("utf-8")
    if format == "csv":
        return _render_csv(report).encode("utf-8")
    raise UnknownFormat(f"unknown format {format!r}; expected one of {', '.join(FORMATS)}")


# -- downstream worklist ---------------------------------------------------------


def export_records(report: SpecReport) -> list[dict]:
    """One record per (pair, candidate attribute), for a dynamic tester to probe."""
    return [
        {
            "method": pair.write_op.method,
            "path": pair.write_op.path,
            "attribute_raw_name": attr.raw_name,
            "attribute_location": attr.location,
            "evidence": {
                "read_method": pair.read_op.method,
                "read_path": pair.read_op.path,
                "similarity": float(display_ratio(pair.similarity)),
            },
        }
        for pair in report.pairs
        for attr in pair.candidate_attrs
    ]


def export_downstream(report: SpecReport) -> bytes:
    return _dump_json(export_records(report))


# -- corpus aggregation ----------------------------------------------------------


@dataclass(frozen=True)
class CorpusRow:
    api: str
    total_endpoints: int
    total_operations: int
    flagged_endpoints: int
    flagged_operations: int
    flagged_attributes: int

    def counts(self) -> tuple[int, int, int, int, int]:
        return (
            self.total_endpoints,
            self.total_operations,
            self.flagged_endpoints,
            self.flagged_operations,
            self.flagged_attributes,
        )


@dataclass(frozen=True)
class CorpusSummary:
    rows: tuple[CorpusRow, ...]
    total_row: CorpusRow


def aggregate(reports: Iterable[SpecReport]) -> CorpusSummary:
    rows = tuple(
        CorpusRow(
            r.source_name,
            r.total_endpoints,
            r.total_operations,
            r.flagged.endpoints,
            r.flagged.operations,
            r.flagged.attributes,
        )
        for r in reports
    )
    sums = [sum(col) for col in zip(*(row.counts() for row in rows))] or [0] * 5
    return CorpusSummary(rows=rows, total_row=CorpusRow("Total", *sums))


def render_summary(summary: CorpusSummary, format: str = "text") -> bytes:
    all_rows = list(summary.rows) + [summary.total_row]
    if format == "csv":
        return _csv_text(SUMMARY_HEADER, [(r.api, *r.counts()) for r in all_rows]).encode("utf-8")
    if format == "json":
        as_dict = lambda r: dict(zip(SUMMARY_HEADER, (r.api, *r.counts())))  # noqa: E731
        return _dump_json({"rows": [as_dict(r) for r in summary.rows], "total": as_dict(summary.total_row)})
    if format == "text":
        header = ("API", "#Endpoints", "#Operations", "Flagged endpoints", "Flagged operations", "Flagged attributes")
        cells = [header] + [(r.api, *map(str, r.counts())) for r in all_rows]
        widths = [max(len(row[i]) for row in cells) for i in range(len(header))]
        fmt = lambda row: "  ".join(  # noqa: E731
            c.ljust(w) if i == 0 else c.rjust(w) for i, (c, w) in enumerate(zip(row, widths))
        ).rstrip()
        rule = "-" * len(fmt(header))
        body = [fmt(r) for r in cells[1:-1]]
        return "\n".join([fmt(header), rule, *body, rule, fmt(cells[-1])]).encode("utf-8") + b"\n"
    raise UnknownFormat(f"unknown format {format!r}; expected one of {', '.join(FORMATS)}")
