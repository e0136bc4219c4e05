"""Run outputs: the Report record and its JSON/CSV forms, plus trace CSV."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, fields
from typing import IO, Iterable

TRACE_HEADER = ("tick", "kind", "agent_id", "task_signifier", "completion_level")


@dataclass(frozen=True)
class Report:
    seed: int
    ticks_elapsed: int
    number_of_submissions: int
    number_of_submissions_completed: int
    accepted_submissions: int
    tasks_completed: int
    total_cost: float
    mean_task_completion: float


REPORT_FIELDS = tuple(f.name for f in fields(Report))
_REAL_FIELDS = {"total_cost", "mean_task_completion"}


def tally(state) -> Report:
    kb = state.kb
    pool = state.it.task_pool
    mean = sum(t.completion for t in pool) / len(pool) if pool else 0.0
    return Report(
        seed=state.seed,
        ticks_elapsed=state.tick - 1,
        number_of_submissions=kb.total_submissions,
        number_of_submissions_completed=kb.completed_submissions,
        accepted_submissions=kb.accepted_submissions,
        tasks_completed=kb.tasks_completed,
        total_cost=float(kb.total_cost),
        mean_task_completion=float(mean),
    )


def format_real(x: float) -> str:
    """Up to 6 significant digits, always recognisably a real."""
    s = format(x, ".6g")
    if not any(ch in s for ch in ".en"):
        s += ".0"
    return s


def _csv_cell(name, value) -> str:
    if value is None:
        return ""
    return format_real(value) if name in _REAL_FIELDS else str(value)


def report_csv_header() -> str:
    return ",".join(REPORT_FIELDS) + "\n"


def report_csv_row(r: Report) -> str:
    return ",".join(_csv_cell(k, getattr(r, k)) for k in REPORT_FIELDS) + "\n"


def emit_report(r: Report, format: str = "json") -> bytes:
    if format == "json":
        return (json.dumps(asdict(r)) + "\n").encode("utf-8")
    if format == "csv":
        return (report_csv_header() + report_csv_row(r)).encode("utf-8")
    raise ValueError(f"unknown report format {format!r}; expected 'json' or 'csv'")


def emit_reports(reports: Iterable[Report], format: str = "csv") -> bytes:
    """Several reports in one document: CSV rows under one header, or a JSON array."""
    reports = list(reports)
    if format == "csv":
        return (report_csv_header() + "".join(report_csv_row(r) for r in reports)).encode("utf-8")
    if format == "json":
        return (json.dumps([asdict(r) for r in reports]) + "\n").encode("utf-8")
    raise ValueError(f"unknown report format {format!r}; expected 'json' or 'csv'")


def parse_report(data: bytes | str) -> Report:
    doc = json.loads(data)
    if list(doc) != list(REPORT_FIELDS):
        raise ValueError(f"report keys must be exactly {REPORT_FIELDS}")
    return Report(**doc)


def emit_trace(trace, sink: IO[bytes] | IO[str]) -> None:
    """Write trace events as CSV; empty optional fields become empty cells."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TRACE_HEADER)
    for ev in trace or ():
        w.writerow(
            (
                ev.tick,
                ev.kind.value,
                "" if ev.agent_id is None else ev.agent_id,
                "" if ev.task_signifier is None else ev.task_signifier,
                "" if ev.completion_level is None else repr(ev.completion_level),
            )
        )
    text = buf.getvalue()
    try:
        sink.write(text.encode("utf-8"))
    except TypeError:
        sink.write(text)


def trace_bytes(trace) -> bytes:
    out = io.BytesIO()
    emit_trace(trace, out)
    return out.getvalue()
