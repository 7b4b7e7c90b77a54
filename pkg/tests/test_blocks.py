from __future__ import annotations

import json

import pytest

from contractcheck.blocks import (AttrTarget, DeclTarget, SelectorTarget,
                                  parse_contract, serialize_contract)
from contractcheck.errors import BlockParseError
from conftest import fixture_text


def test_bakery_block1_structure(bakery_blocks):
    block = bakery_blocks[0]
    assert block.id == "Block1"
    decls = [(d.name, d.type_name, d.is_reference) for d in block.objects]
    assert decls == [
        ("spa", "SPA", False),
        ("seller", "Person", False),
        ("purchaser", "Person", False),
        ("shares", "Shares", False),
        ("transfer", "PrimaryClaim", False),
    ]
    assert len(block.assignments) == 13
    rendered = [a.render() for a in block.assignments]
    assert "transfer.DueDate=28" in rendered


def test_order_preserved(bakery_blocks):
    assert [b.id for b in bakery_blocks] == [f"Block{i}" for i in range(1, 12)]


def test_reference_declarations_parsed(bakery_blocks):
    block3 = bakery_blocks[2]
    claim = block3.decl("claim")
    assert claim is not None and claim.is_reference and claim.type_name == "Claim"


def test_selector_assignment_parsed(bakery_blocks):
    block10 = bakery_blocks[9]
    selectors = [a.lhs for a in block10.assignments
                 if isinstance(a.lhs, SelectorTarget)]
    assert len(selectors) == 2
    assert selectors[0].class_name == "Claim"
    assert selectors[0].attr == "Limitation"


def test_empty_document():
    assert parse_contract("[]") == []


def test_duplicate_block_id_rejected():
    doc = json.dumps([{"ID": "Block1", "Text": ""}, {"ID": "Block1", "Text": ""}])
    with pytest.raises(BlockParseError) as err:
        parse_contract(doc)
    assert "duplicate" in str(err.value)
    assert err.value.block_id == "Block1"


def test_unknown_ontology_class_rejected():
    doc = json.dumps([{"ID": "B1", "Text": "", "Object": ["x:Gadget"]}])
    with pytest.raises(BlockParseError) as err:
        parse_contract(doc)
    assert "Gadget" in str(err.value)


def test_reference_decl_may_use_any_name():
    doc = json.dumps([{"ID": "B1", "Text": "", "Object": ["x:$Gadget"]}])
    blocks = parse_contract(doc)
    assert blocks[0].objects[0].is_reference


def test_syntax_error_reports_block_and_field():
    doc = json.dumps([{"ID": "B1", "Text": "", "Object": ["noseparator"]}])
    with pytest.raises(BlockParseError) as err:
        parse_contract(doc)
    assert err.value.block_id == "B1"
    assert err.value.field == "Object"


def test_invalid_json_rejected():
    with pytest.raises(BlockParseError):
        parse_contract("not json")


def test_assignment_lhs_forms():
    doc = json.dumps([{
        "ID": "B1", "Text": "",
        "Object": ["c:PrimaryClaim", "d:Date"],
        "Assignment": ["d=5", "c.DueDate=$d", "B1_c.Limitation=9"],
    }])
    block = parse_contract(doc)[0]
    kinds = [type(a.lhs) for a in block.assignments]
    assert kinds == [DeclTarget, AttrTarget, AttrTarget]
    assert block.assignments[2].lhs.obj_token == "B1_c"


@pytest.mark.parametrize("name", [
    "bakery", "bakery_repaired", "bakery_precede_base",
    "bakery_precede_variant", "seeded_errors", "seeded_errors_repaired",
])
def test_serialize_round_trip(name):
    blocks = parse_contract(fixture_text(name))
    assert parse_contract(serialize_contract(blocks)) == blocks


def test_text_placeholders(bakery_blocks):
    assert bakery_blocks[0].text_placeholders()[:2] == ["$seller.Name", "$shares.Name"]
