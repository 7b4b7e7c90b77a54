from __future__ import annotations

import json
from contextlib import contextmanager
from importlib import resources

import pytest

from contractcheck.blocks import parse_contract
from contractcheck.ontology import build_model
from contractcheck.references import resolve_references
from contractcheck.solver import SolverConfig

# acceptance criteria results, printed in the terminal summary
ACCEPTANCE_RESULTS: dict[str, tuple[str, str]] = {}


@contextmanager
def criterion(number: str, title: str):
    """Record one acceptance criterion; it passes only when the block does."""
    ACCEPTANCE_RESULTS[number] = ("FAIL", title)
    yield
    ACCEPTANCE_RESULTS[number] = ("PASS", title)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for number in sorted(ACCEPTANCE_RESULTS, key=lambda c: (len(c), c)):
        status, title = ACCEPTANCE_RESULTS[number]
        terminalreporter.write_line(f"ACCEPTANCE {number}: {status} — {title}")


def fixture_text(name: str) -> str:
    path = resources.files("contractcheck").joinpath(f"library/contracts/{name}.json")
    return path.read_text(encoding="utf-8")


def fixture_blocks(name: str):
    return parse_contract(fixture_text(name))


def fixture_model(name: str):
    blocks = fixture_blocks(name)
    return build_model(blocks, resolve_references(blocks), name)


@pytest.fixture(scope="session")
def bakery_blocks():
    return fixture_blocks("bakery")


@pytest.fixture(scope="session")
def bakery_model():
    return fixture_model("bakery")


@pytest.fixture(scope="session")
def solver_config():
    # persistent workers keep the suite fast; nothing is shared between
    # requests (each runs in a fresh solver context)
    return SolverConfig(timeout=20.0, workers=4)


def document_of(blocks) -> str:
    from contractcheck.blocks import serialize_contract

    return serialize_contract(list(blocks))


def drop_block(blocks, block_id: str):
    return [b for b in blocks if b.id != block_id]


def edit_assignment(document: str, block_id: str, old: str, new: str) -> str:
    """Textually replace one assignment inside one block of a JSON document."""
    data = json.loads(document)
    for block in data:
        if block["ID"] == block_id:
            block["Assignment"] = [a.replace(old, new) for a in block["Assignment"]]
    return json.dumps(data)
