"""Command-line interface.

``contractcheck analyze FILE`` runs the pipeline and writes the report;
``contractcheck serve`` starts the HTTP service backing the web UI.

Exit codes for ``analyze``: 0 when no inconsistencies or static errors were
found, 2 when the analysis raised red flags or static errors, 1 on tool
failures (unreadable file, parse error, solver missing).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .checks import Severity
from .errors import ContractCheckError
from .pipeline import analyze_document, parse_kinds
from .reporting import to_json, to_sequence_diagram, to_text
from .solver import MaxSmtMode, config_from_env

EXIT_OK = 0
EXIT_TOOL_ERROR = 1
EXIT_INCONSISTENT = 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="contractcheck",
        description="Consistency analysis for share purchase agreements "
                    "written as parameterized text blocks.")
    sub = parser.add_subparsers(dest="command", required=True)

    analyze = sub.add_parser("analyze", help="analyze a block file")
    analyze.add_argument("path", help="block document (JSON array of blocks)")
    analyze.add_argument("--analysis", default="all",
                         help="all, I (claim consistency), II (executability), "
                              "unsat, defense, limitation; comma-separated")
    analyze.add_argument("--solver", default=None,
                         help="solver executable (overrides CONTRACTCHECK_SOLVER)")
    analyze.add_argument("--timeout", type=float, default=10.0,
                         help="seconds per solver call (default 10)")
    analyze.add_argument("--maxsmt", choices=[MaxSmtMode.NATIVE, MaxSmtMode.ITERATIVE],
                         default=None, help="MaxSMT strategy (default native)")
    analyze.add_argument("--format", choices=["json", "text", "mermaid"],
                         default="text", help="output format (default text)")
    analyze.add_argument("--out", default=None, metavar="DIR",
                         help="write report.json, report.txt and one .mmd "
                              "file per trace into DIR")

    serve = sub.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--addr", default="127.0.0.1:8734",
                       help="host:port to bind (default 127.0.0.1:8734)")
    serve.add_argument("--store", default="./contracts",
                       help="directory for stored contracts (default ./contracts)")
    serve.add_argument("--timeout", type=float, default=10.0,
                       help="seconds per solver call (default 10)")
    return parser


def _solver_config(args):
    overrides = {"timeout": args.timeout}
    if getattr(args, "maxsmt", None):
        overrides["maxsmt_mode"] = args.maxsmt
    config = config_from_env(**overrides)
    if getattr(args, "solver", None):
        from dataclasses import replace
        extra = args.solver.split()
        solver_args = tuple(extra[1:])
        if not solver_args and "z3" in Path(extra[0]).name:
            solver_args = ("-in", "-smt2")
        config = replace(config, executable=extra[0], args=solver_args,
                         persistent=False)
    return config


def cli_analyze(args) -> int:
    path = Path(args.path)
    try:
        document = path.read_text(encoding="utf-8")
    except OSError as exc:
        print(f"error: cannot read {path}: {exc}", file=sys.stderr)
        return EXIT_TOOL_ERROR
    try:
        kinds = parse_kinds(args.analysis)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_TOOL_ERROR
    try:
        report = analyze_document(document, contract_id=path.stem,
                                  config=_solver_config(args), kinds=kinds)
    except ContractCheckError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_TOOL_ERROR

    traces = [(o.kind, o.target, o.trace) for o in report.outcomes
              if o.trace is not None]
    if args.out:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "report.json").write_text(to_json(report), encoding="utf-8")
        (out_dir / "report.txt").write_text(to_text(report), encoding="utf-8")
        for kind, target, trace in traces:
            stem = kind + (f"_{target}" if target else "")
            (out_dir / f"{stem}.mmd").write_text(to_sequence_diagram(trace),
                                                 encoding="utf-8")
    if args.format == "json":
        sys.stdout.write(to_json(report))
    elif args.format == "mermaid":
        for kind, target, trace in traces:
            header = kind + (f" {target}" if target else "")
            sys.stdout.write(f"%% {header}\n{to_sequence_diagram(trace)}\n")
        if not traces:
            print("%% no execution traces", file=sys.stdout)
    else:
        sys.stdout.write(to_text(report))

    solver_failures = any(o.status == "error" for o in report.outcomes)
    if solver_failures:
        return EXIT_TOOL_ERROR
    static_errors = any(f.severity is Severity.ERROR for f in report.findings)
    if report.flags or static_errors:
        return EXIT_INCONSISTENT
    return EXIT_OK


def cli_serve(args) -> int:
    from .service import serve

    host, _, port = args.addr.rpartition(":")
    if not host:
        host = "127.0.0.1"
    try:
        serve(host, int(port), Path(args.store), _solver_config(args))
    except KeyboardInterrupt:
        pass
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "analyze":
        return cli_analyze(args)
    return cli_serve(args)


if __name__ == "__main__":
    sys.exit(main())
