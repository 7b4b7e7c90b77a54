"""Report serialization: canonical JSON, terminal text, sequence diagrams.

The JSON form is schema-versioned, loses nothing (``parse_report`` returns an
equal report) and is byte-deterministic for a given contract and solver
configuration; wall-clock timings therefore stay out of it and appear only in
the text rendering.
"""

from __future__ import annotations

import json

from .checks import Finding, Severity
from .orchestrator import (AnalysisOutcome, ExecutionTrace, RedFlag, Report,
                           TraceEvent, TraceNote)

SCHEMA_VERSION = 1


def _trace_to_dict(trace: ExecutionTrace | None) -> dict | None:
    if trace is None:
        return None
    return {
        "participants": list(trace.participants),
        "events": [
            {
                "day": e.day,
                "claim": e.claim_id,
                "action": e.action,
                "actor": e.actor,
                "counterparty": e.counterparty,
                "amount": e.amount,
            }
            for e in trace.events
        ],
        "unperformed": [{"claim": n.claim_id, "party": n.party}
                        for n in trace.unperformed],
        "satisfied": [{"claim": n.claim_id, "party": n.party}
                      for n in trace.satisfied],
    }


def _trace_from_dict(data: dict | None) -> ExecutionTrace | None:
    if data is None:
        return None
    return ExecutionTrace(
        participants=tuple(data["participants"]),
        events=tuple(TraceEvent(e["day"], e["claim"], e["action"], e["actor"],
                                e["counterparty"], e.get("amount"))
                     for e in data["events"]),
        unperformed=tuple(TraceNote(n["claim"], n["party"])
                          for n in data["unperformed"]),
        satisfied=tuple(TraceNote(n["claim"], n["party"])
                        for n in data["satisfied"]),
    )


def report_to_dict(report: Report) -> dict:
    return {
        "version": SCHEMA_VERSION,
        "contract": report.contract_id,
        "findings": [f.to_dict() for f in report.findings],
        "analyses": [
            {
                "kind": o.kind,
                "target": o.target,
                "status": o.status,
                "verdict": o.verdict,
                "vars": o.vars,
                "constraints": o.constraints,
                "trace": _trace_to_dict(o.trace),
                "message": o.message,
            }
            for o in report.outcomes
        ],
        "flags": [
            {
                "kind": f.kind,
                "targets": list(f.targets),
                "block_ids": list(f.block_ids),
                "explanation": f.explanation,
            }
            for f in report.flags
        ],
        "blocks": dict(report.block_texts),
        "summary": {
            "flags": len(report.flags),
            "static_errors": sum(1 for f in report.findings
                                 if f.severity is Severity.ERROR),
            "analyses": len(report.outcomes),
        },
    }


def to_json(report: Report) -> str:
    """Canonical JSON: stable key order, two-space indent, trailing newline."""
    return json.dumps(report_to_dict(report), indent=2, ensure_ascii=False) + "\n"


def parse_report(text: str) -> Report:
    data = json.loads(text)
    if data.get("version") != SCHEMA_VERSION:
        raise ValueError(f"unsupported report version {data.get('version')!r}")
    findings = tuple(
        Finding(Severity(f["severity"]), f["code"], f["message"],
                tuple(f["block_ids"]))
        for f in data["findings"])
    outcomes = tuple(
        AnalysisOutcome(
            kind=o["kind"], target=o["target"], status=o["status"],
            verdict=o["verdict"], vars=o["vars"], constraints=o["constraints"],
            trace=_trace_from_dict(o.get("trace")), message=o.get("message"))
        for o in data["analyses"])
    flags = tuple(
        RedFlag(f["kind"], tuple(f["targets"]), tuple(f["block_ids"]),
                f["explanation"])
        for f in data["flags"])
    return Report(data["contract"], findings, outcomes, flags,
                  dict(data.get("blocks", {})))


def to_text(report: Report) -> str:
    """Terminal-friendly summary with flagged block texts side by side."""
    lines = [f"Contract {report.contract_id}"]
    errors = [f for f in report.findings if f.severity is Severity.ERROR]
    warnings = [f for f in report.findings if f.severity is Severity.WARNING]
    if report.findings:
        lines.append("")
        lines.append(f"Static findings ({len(errors)} errors, "
                     f"{len(warnings)} warnings):")
        for f in report.findings:
            blocks = ", ".join(f.block_ids)
            lines.append(f"  [{f.severity.value}] {f.code} ({blocks}): {f.message}")
    if report.outcomes:
        lines.append("")
        lines.append("Analyses:")
        for o in report.outcomes:
            target = f" {o.target}" if o.target else ""
            status = o.status.upper() if o.status == "flag" else o.status
            timing = f", {o.solve_ms:.0f} ms" if o.solve_ms else ""
            lines.append(f"  {o.kind}{target}: {status} "
                         f"({o.verdict or o.message}; vars {o.vars}, "
                         f"constraints {o.constraints}{timing})")
    if report.flags:
        lines.append("")
        lines.append(f"Red flags ({len(report.flags)}):")
        for i, flag in enumerate(report.flags, 1):
            targets = ", ".join(t for t in flag.targets if t)
            lines.append(f"  ({i}) {flag.kind} on {targets or 'the contract'} "
                         f"— blocks {', '.join(flag.block_ids)}")
            for block_id in flag.block_ids:
                text = report.block_texts.get(block_id)
                if text:
                    lines.append(f"      {block_id} | {text}")
            for line in flag.explanation.splitlines():
                lines.append(f"      {line}")
    elif not errors:
        lines.append("")
        lines.append("No inconsistencies found.")
    return "\n".join(lines) + "\n"


def to_sequence_diagram(trace: ExecutionTrace) -> str:
    """Mermaid sequence diagram: participants are the contract parties,
    arrows are dated performances, notes mark unperformed independent claims
    and satisfied warranties."""
    lines = ["sequenceDiagram"]
    for p in trace.participants:
        lines.append(f"    participant {p}")
    for e in trace.events:
        label = f"{e.claim_id} {e.action} (day {e.day})"
        if e.amount is not None:
            label = f"{e.claim_id} {e.action} {e.amount} EUR (day {e.day})"
        lines.append(f"    {e.actor}->>{e.counterparty}: {label}")
    for note in trace.unperformed:
        lines.append(f"    Note over {note.party}: {note.claim_id} unperformed")
    for note in trace.satisfied:
        lines.append(f"    Note over {note.party}: {note.claim_id} satisfied")
    return "\n".join(lines) + "\n"
