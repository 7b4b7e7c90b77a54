from __future__ import annotations

import json
import subprocess
import sys
import threading
import urllib.error
import urllib.request

import pytest

from contractcheck.service import make_server
from conftest import fixture_text


@pytest.fixture()
def server(tmp_path, solver_config):
    srv = make_server("127.0.0.1", 0, tmp_path / "store", solver_config)
    thread = threading.Thread(target=srv.serve_forever, daemon=True)
    thread.start()
    yield srv
    srv.shutdown()


def call(srv, method: str, path: str, data: bytes | None = None):
    port = srv.server_address[1]
    request = urllib.request.Request(f"http://127.0.0.1:{port}{path}",
                                     data=data, method=method)
    try:
        with urllib.request.urlopen(request, timeout=120) as response:
            return response.status, response.read(), dict(response.headers)
    except urllib.error.HTTPError as err:
        return err.code, err.read(), dict(err.headers)


def test_health(server):
    status, body, headers = call(server, "GET", "/health")
    assert (status, body) == (200, b"ok")
    assert headers["X-Schema-Version"] == "1"


def test_store_round_trip(server):
    document = fixture_text("bakery").encode("utf-8")
    status, _, _ = call(server, "PUT", "/contracts/bakery", document)
    assert status == 200
    status, body, _ = call(server, "GET", "/contracts/bakery")
    assert status == 200
    assert body == document  # stored verbatim
    status, body, _ = call(server, "GET", "/contracts")
    assert json.loads(body)["contracts"] == ["bakery"]
    status, _, _ = call(server, "DELETE", "/contracts/bakery")
    assert status == 200
    assert call(server, "GET", "/contracts/bakery")[0] == 404


def test_analyze_returns_report(server):
    call(server, "PUT", "/contracts/bakery", fixture_text("bakery").encode())
    status, body, _ = call(server, "POST", "/contracts/bakery/analyze")
    assert status == 200
    report = json.loads(body)
    assert report["version"] == 1
    assert len(report["flags"]) >= 2
    status, stored, _ = call(server, "GET", "/contracts/bakery/report")
    assert status == 200 and stored == body


def test_analyze_unknown_contract_is_404(server):
    assert call(server, "POST", "/contracts/ghost/analyze")[0] == 404


def test_put_invalid_document_is_422(server):
    status, body, _ = call(server, "PUT", "/contracts/bad", b"[{\"ID\": 3}]")
    assert status == 422
    assert json.loads(body)["findings"][0]["code"] == "PARSE_ERROR"


def test_analyze_static_errors_are_422_with_findings(server):
    call(server, "PUT", "/contracts/empty", b"[]")
    status, body, _ = call(server, "POST", "/contracts/empty/analyze")
    assert status == 422
    codes = [f["code"] for f in json.loads(body)["findings"]]
    assert "ESSENTIALIA_SELLER" in codes


def test_analyze_unresolved_reference_is_422(server):
    document = json.dumps([{"ID": "B1", "Text": "see $ghost", "Object": []}])
    call(server, "PUT", "/contracts/dangling", document.encode())
    status, body, _ = call(server, "POST", "/contracts/dangling/analyze")
    assert status == 422
    assert json.loads(body)["findings"][0]["code"] == "UNRESOLVED_REFERENCE"


def test_concurrent_analyze_is_409(server):
    call(server, "PUT", "/contracts/bakery", fixture_text("bakery").encode())
    handler_service = server.RequestHandlerClass.service
    with handler_service._busy_guard:
        handler_service._busy.add("bakery")
    try:
        status, body, _ = call(server, "POST", "/contracts/bakery/analyze")
        assert status == 409
        assert "already running" in json.loads(body)["error"]
    finally:
        with handler_service._busy_guard:
            handler_service._busy.discard("bakery")


def test_diagram_endpoint(server):
    call(server, "PUT", "/contracts/bakery", fixture_text("bakery").encode())
    call(server, "POST", "/contracts/bakery/analyze")
    status, body, _ = call(server, "GET", "/contracts/bakery/diagram/II")
    assert status == 200
    assert body.decode().startswith("sequenceDiagram")
    status, _, _ = call(server, "GET", "/contracts/bakery/diagram/defense")
    assert status == 404  # no defense trace on the bakery


def test_library_endpoints(server):
    status, body, _ = call(server, "GET", "/library/blocks")
    assert status == 200
    templates = json.loads(body)["templates"]
    assert any(t["id"] == "numeric-warranty" for t in templates)
    status, body, _ = call(server, "GET", "/library/contracts")
    names = json.loads(body)["contracts"]
    assert "bakery" in names and "bakery_repaired" in names
    status, body, _ = call(server, "GET", "/library/contracts/bakery")
    assert status == 200
    assert json.loads(body)[0]["ID"] == "Block1"


def test_model_inspector(server):
    call(server, "PUT", "/contracts/bakery", fixture_text("bakery").encode())
    status, body, _ = call(server, "GET", "/contracts/bakery/model")
    assert status == 200
    diagram = json.loads(body)
    assert {p["id"] for p in diagram["persons"]} == {"Eva", "Chris", "Bank"}
    assert len(diagram["claims"]) == 7


def test_cli_and_service_reports_are_byte_identical(server, tmp_path):
    """The same contract and solver configuration produce the same canonical
    report bytes through both entry points."""
    document = fixture_text("bakery")
    path = tmp_path / "bakery.json"
    path.write_text(document, encoding="utf-8")
    proc = subprocess.run(
        [sys.executable, "-m", "contractcheck.cli", "analyze", str(path),
         "--format", "json"],
        capture_output=True, text=True, timeout=300)
    assert proc.returncode == 2, proc.stderr
    call(server, "PUT", "/contracts/bakery", document.encode())
    status, body, _ = call(server, "POST", "/contracts/bakery/analyze")
    assert status == 200
    assert body.decode("utf-8") == proc.stdout
