"""HTTP service exposing the analysis pipeline to the web UI.

JSON over HTTP on top of the standard library server; contracts are
persisted as plain files in a store directory, one JSON document per
contract id, plus the last analysis report.

Endpoints:

* ``GET  /health`` — liveness probe
* ``GET  /contracts`` — stored contract ids
* ``GET/PUT/DELETE /contracts/{id}`` — the block document (stored verbatim)
* ``POST /contracts/{id}/analyze?kinds=...`` — run analyses, return the report
* ``GET  /contracts/{id}/report`` — the last stored report
* ``GET  /contracts/{id}/diagram/{analysis}[?target=...]`` — Mermaid text
* ``GET  /library/blocks`` — the shipped block-template library
* ``GET  /library/contracts[/{name}]`` — shipped example contracts

Analyze requests for one contract are serialized: a second concurrent
request gets 409.  Every response carries the report schema version.
"""

from __future__ import annotations

import json
import re
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from importlib import resources
from pathlib import Path
from urllib.parse import parse_qs, urlparse

from .checks import has_errors, run_static_checks
from .errors import (BlockParseError, ContractCheckError,
                     ReferenceResolutionError)
from .ontology import diagram_json
from .orchestrator import run_all
from .pipeline import model_from_document, parse_kinds
from .reporting import SCHEMA_VERSION, parse_report, to_json, to_sequence_diagram
from .solver import SolverConfig, config_from_env

_ID_RE = re.compile(r"^[A-Za-z0-9_-]{1,128}$")


class ContractStore:
    """Directory of contract documents, one writer per contract id."""

    def __init__(self, root: Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._locks: dict[str, threading.Lock] = {}
        self._guard = threading.Lock()

    def lock_for(self, contract_id: str) -> threading.Lock:
        with self._guard:
            return self._locks.setdefault(contract_id, threading.Lock())

    def _path(self, contract_id: str, suffix: str = ".json") -> Path:
        if not _ID_RE.match(contract_id):
            raise ValueError(f"invalid contract id {contract_id!r}")
        return self.root / f"{contract_id}{suffix}"

    def list_ids(self) -> list[str]:
        return sorted(p.stem for p in self.root.glob("*.json")
                      if not p.name.endswith(".report.json"))

    def get(self, contract_id: str) -> bytes | None:
        path = self._path(contract_id)
        return path.read_bytes() if path.exists() else None

    def put(self, contract_id: str, document: bytes) -> None:
        with self.lock_for(contract_id):
            self._path(contract_id).write_bytes(document)

    def delete(self, contract_id: str) -> bool:
        with self.lock_for(contract_id):
            path = self._path(contract_id)
            existed = path.exists()
            if existed:
                path.unlink()
            report = self._path(contract_id, ".report.json")
            if report.exists():
                report.unlink()
            return existed

    def get_report(self, contract_id: str) -> bytes | None:
        path = self._path(contract_id, ".report.json")
        return path.read_bytes() if path.exists() else None

    def put_report(self, contract_id: str, report_json: str) -> None:
        self._path(contract_id, ".report.json").write_bytes(
            report_json.encode("utf-8"))


def load_library_blocks() -> dict:
    data = resources.files("contractcheck").joinpath("library/templates.json")
    return json.loads(data.read_text(encoding="utf-8"))


def library_contract_names() -> list[str]:
    folder = resources.files("contractcheck").joinpath("library/contracts")
    return sorted(p.name.removesuffix(".json") for p in folder.iterdir()
                  if p.name.endswith(".json"))


def load_library_contract(name: str) -> str | None:
    if not _ID_RE.match(name):
        return None
    path = resources.files("contractcheck").joinpath(f"library/contracts/{name}.json")
    try:
        return path.read_text(encoding="utf-8")
    except FileNotFoundError:
        return None


def _problem_findings(exc: ContractCheckError) -> list[dict]:
    if isinstance(exc, ReferenceResolutionError):
        return [{"severity": "error", "code": "UNRESOLVED_REFERENCE",
                 "message": p, "block_ids": []} for p in exc.problems]
    code = "PARSE_ERROR" if isinstance(exc, BlockParseError) else "MODEL_ERROR"
    block_ids = [exc.block_id] if getattr(exc, "block_id", None) else []
    return [{"severity": "error", "code": code, "message": str(exc),
             "block_ids": block_ids}]


class AnalysisService:
    """Request-independent service state shared by all handler threads."""

    def __init__(self, store: ContractStore, config: SolverConfig | None = None):
        self.store = store
        self.config = config or config_from_env()
        self._busy: set[str] = set()
        self._busy_guard = threading.Lock()

    # returns (status, payload, content_type)
    def analyze(self, contract_id: str, kinds_param: str | None) -> tuple[int, bytes, str]:
        document = self.store.get(contract_id)
        if document is None:
            return 404, _json_error("unknown contract"), "application/json"
        try:
            kinds = parse_kinds(kinds_param)
        except ValueError as exc:
            return 400, _json_error(str(exc)), "application/json"
        try:
            model = model_from_document(document.decode("utf-8"), contract_id)
        except ContractCheckError as exc:
            payload = {"error": "the contract cannot be analyzed",
                       "findings": _problem_findings(exc)}
            return 422, _dump(payload), "application/json"
        findings = run_static_checks(model)
        if has_errors(findings):
            payload = {"error": "static checks failed",
                       "findings": [f.to_dict() for f in findings]}
            return 422, _dump(payload), "application/json"
        with self._busy_guard:
            if contract_id in self._busy:
                return 409, _json_error("an analysis for this contract is "
                                        "already running"), "application/json"
            self._busy.add(contract_id)
        try:
            report = run_all(model, self.config, kinds)
            report_json = to_json(report)
            self.store.put_report(contract_id, report_json)
            return 200, report_json.encode("utf-8"), "application/json"
        finally:
            with self._busy_guard:
                self._busy.discard(contract_id)

    def diagram(self, contract_id: str, analysis: str,
                target: str | None) -> tuple[int, bytes, str]:
        raw = self.store.get_report(contract_id)
        if raw is None:
            return 404, _json_error("no report stored; run an analysis first"), \
                "application/json"
        report = parse_report(raw.decode("utf-8"))
        try:
            kinds = parse_kinds(analysis)
        except ValueError as exc:
            return 400, _json_error(str(exc)), "application/json"
        wanted = {k.value for k in kinds} if kinds else None
        for outcome in report.outcomes:
            if wanted is not None and outcome.kind not in wanted:
                continue
            if target and outcome.target != target:
                continue
            if outcome.trace is not None:
                text = to_sequence_diagram(outcome.trace)
                return 200, text.encode("utf-8"), "text/plain; charset=utf-8"
        return 404, _json_error("no trace for that analysis"), "application/json"

    def inspect(self, contract_id: str) -> tuple[int, bytes, str]:
        document = self.store.get(contract_id)
        if document is None:
            return 404, _json_error("unknown contract"), "application/json"
        try:
            model = model_from_document(document.decode("utf-8"), contract_id)
        except ContractCheckError as exc:
            payload = {"error": "the contract cannot be parsed",
                       "findings": _problem_findings(exc)}
            return 422, _dump(payload), "application/json"
        return 200, _dump(diagram_json(model)), "application/json"


def _dump(payload) -> bytes:
    return (json.dumps(payload, indent=2, ensure_ascii=False) + "\n").encode("utf-8")


def _json_error(message: str) -> bytes:
    return _dump({"error": message})


class _Handler(BaseHTTPRequestHandler):
    service: AnalysisService  # set by make_server
    protocol_version = "HTTP/1.1"

    def log_message(self, fmt, *args):  # quiet by default
        pass

    # -- plumbing ----------------------------------------------------------

    def _send(self, status: int, body: bytes,
              content_type: str = "application/json") -> None:
        self.send_response(status)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        self.send_header("X-Schema-Version", str(SCHEMA_VERSION))
        self.end_headers()
        self.wfile.write(body)

    def _body(self) -> bytes:
        length = int(self.headers.get("Content-Length", "0") or "0")
        return self.rfile.read(length) if length else b""

    # -- routing -----------------------------------------------------------

    def do_GET(self):
        url = urlparse(self.path)
        parts = [p for p in url.path.split("/") if p]
        query = parse_qs(url.query)
        if parts == ["health"]:
            self._send(200, b"ok", "text/plain; charset=utf-8")
        elif parts == ["contracts"]:
            ids = self.service.store.list_ids()
            self._send(200, _dump({"contracts": ids}))
        elif len(parts) == 2 and parts[0] == "contracts":
            document = self.service.store.get(parts[1])
            if document is None:
                self._send(404, _json_error("unknown contract"))
            else:
                self._send(200, document)
        elif len(parts) == 3 and parts[0] == "contracts" and parts[2] == "report":
            report = self.service.store.get_report(parts[1])
            if report is None:
                self._send(404, _json_error("no report stored"))
            else:
                self._send(200, report)
        elif len(parts) == 3 and parts[0] == "contracts" and parts[2] == "model":
            status, body, ctype = self.service.inspect(parts[1])
            self._send(status, body, ctype)
        elif len(parts) == 4 and parts[0] == "contracts" and parts[2] == "diagram":
            target = query.get("target", [None])[0]
            status, body, ctype = self.service.diagram(parts[1], parts[3], target)
            self._send(status, body, ctype)
        elif parts == ["library", "blocks"]:
            self._send(200, _dump(load_library_blocks()))
        elif parts == ["library", "contracts"]:
            self._send(200, _dump({"contracts": library_contract_names()}))
        elif len(parts) == 3 and parts[:2] == ["library", "contracts"]:
            document = load_library_contract(parts[2])
            if document is None:
                self._send(404, _json_error("unknown library contract"))
            else:
                self._send(200, document.encode("utf-8"))
        else:
            self._send(404, _json_error("not found"))

    def do_PUT(self):
        parts = [p for p in urlparse(self.path).path.split("/") if p]
        if len(parts) == 2 and parts[0] == "contracts":
            contract_id = parts[1]
            if not _ID_RE.match(contract_id):
                self._send(400, _json_error("invalid contract id"))
                return
            body = self._body()
            try:
                from .blocks import parse_contract
                parse_contract(body.decode("utf-8"))
            except (ContractCheckError, UnicodeDecodeError) as exc:
                findings = (_problem_findings(exc)
                            if isinstance(exc, ContractCheckError)
                            else [{"severity": "error", "code": "ENCODING",
                                   "message": str(exc), "block_ids": []}])
                self._send(422, _dump({"error": "invalid block document",
                                       "findings": findings}))
                return
            self.service.store.put(contract_id, body)
            self._send(200, _dump({"stored": contract_id}))
        else:
            self._send(404, _json_error("not found"))

    def do_DELETE(self):
        parts = [p for p in urlparse(self.path).path.split("/") if p]
        if len(parts) == 2 and parts[0] == "contracts":
            if self.service.store.delete(parts[1]):
                self._send(200, _dump({"deleted": parts[1]}))
            else:
                self._send(404, _json_error("unknown contract"))
        else:
            self._send(404, _json_error("not found"))

    def do_POST(self):
        url = urlparse(self.path)
        parts = [p for p in url.path.split("/") if p]
        query = parse_qs(url.query)
        if len(parts) == 3 and parts[0] == "contracts" and parts[2] == "analyze":
            kinds = query.get("kinds", [None])[0]
            status, body, ctype = self.service.analyze(parts[1], kinds)
            self._send(status, body, ctype)
        else:
            self._send(404, _json_error("not found"))


def make_server(host: str, port: int, store_dir: Path,
                config: SolverConfig | None = None) -> ThreadingHTTPServer:
    service = AnalysisService(ContractStore(store_dir), config)
    handler = type("BoundHandler", (_Handler,), {"service": service})
    return ThreadingHTTPServer((host, port), handler)


def serve(host: str, port: int, store_dir: Path,
          config: SolverConfig | None = None) -> None:
    server = make_server(host, port, store_dir, config)
    address = f"http://{server.server_address[0]}:{server.server_address[1]}"
    print(f"contractcheck service listening on {address}, "
          f"store at {Path(store_dir).resolve()}", flush=True)
    server.serve_forever()
