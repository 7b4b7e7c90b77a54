"""Parsing of block documents.

A contract file is a JSON array of text blocks.  Each block carries an
``ID``, a parameterized ``Text``, a list of ``Object`` declarations
(``name:Type`` or ``name:$Type`` for references) and a list of ``Assignment``
strings (``lhs=rhs``).  This module turns the container format into typed
:class:`Block` values; no references are bound here.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass

from . import schema
from .errors import BlockParseError
from .expr import IDENT_RE, ValueExpr, parse_value, render_value

_SELECTOR_RE = re.compile(r"^\$\{//\$(?P<block>[A-Za-z][A-Za-z0-9_]*)//(?P<cls>[A-Za-z][A-Za-z0-9_]*)\}"
                          r"\.(?P<attr>[A-Za-z][A-Za-z0-9_]*)$")
_TEXT_PLACEHOLDER_RE = re.compile(
    r"\$\{//\$[A-Za-z][A-Za-z0-9_]*//[A-Za-z][A-Za-z0-9_]*\}"
    r"|\$[A-Za-z][A-Za-z0-9_]*(?:\.[A-Za-z][A-Za-z0-9_]*)*")


@dataclass(frozen=True)
class ObjectDecl:
    """One ``name:Type`` entry; ``is_reference`` when the type was ``$Type``."""

    name: str
    type_name: str
    is_reference: bool

    def render(self) -> str:
        sigil = "$" if self.is_reference else ""
        return f"{self.name}:{sigil}{self.type_name}"


@dataclass(frozen=True)
class DeclTarget:
    """Assignment to a declaration itself: ``claim=$Block1_transfer`` binds a
    reference declaration, ``d=28+42`` gives a scalar its value."""

    name: str

    def render(self) -> str:
        return self.name


@dataclass(frozen=True)
class AttrTarget:
    """Assignment to one attribute slot: ``transfer.DueDate=...``.  The
    object token may be local (``transfer``) or cross-block
    (``Block1_spa``); it is resolved later."""

    obj_token: str
    attr: str

    def render(self) -> str:
        return f"{self.obj_token}.{self.attr}"


@dataclass(frozen=True)
class SelectorTarget:
    """Path-selector assignment ``${//$block//Claim}.Limitation=...``:
    assigns the attribute on every object of the class (or a subclass)
    declared in the referenced block."""

    block_token: str
    class_name: str
    attr: str

    def render(self) -> str:
        return f"${{//${self.block_token}//{self.class_name}}}.{self.attr}"


AssignmentTarget = DeclTarget | AttrTarget | SelectorTarget


@dataclass(frozen=True)
class Assignment:
    lhs: AssignmentTarget
    rhs: ValueExpr

    def render(self) -> str:
        return f"{self.lhs.render()}={render_value(self.rhs)}"


@dataclass(frozen=True)
class Block:
    id: str
    text: str
    objects: tuple[ObjectDecl, ...] = ()
    assignments: tuple[Assignment, ...] = ()

    def decl(self, name: str) -> ObjectDecl | None:
        for d in self.objects:
            if d.name == name:
                return d
        return None

    def text_placeholders(self) -> list[str]:
        """All `$` tokens appearing in the text template."""
        return _TEXT_PLACEHOLDER_RE.findall(self.text)


def _parse_object_decl(entry: str, block_id: str) -> ObjectDecl:
    raw = entry.strip().strip('"')
    if ":" not in raw:
        raise BlockParseError(f"expected name:Type, got {raw!r}",
                              block_id=block_id, field="Object")
    name, type_name = (part.strip() for part in raw.split(":", 1))
    is_reference = type_name.startswith("$")
    if is_reference:
        type_name = type_name[1:]
    if not IDENT_RE.fullmatch(name):
        raise BlockParseError(f"invalid object name {name!r}",
                              block_id=block_id, field="Object")
    if not IDENT_RE.fullmatch(type_name):
        raise BlockParseError(f"invalid type name {type_name!r}",
                              block_id=block_id, field="Object")
    if not is_reference and not schema.is_class(type_name) and type_name not in schema.SCALARS:
        raise BlockParseError(f"unknown ontology class {type_name!r} in declaration {raw!r}",
                              block_id=block_id, field="Object")
    return ObjectDecl(name, type_name, is_reference)


_LHS_PATH_RE = re.compile(r"^(?P<obj>[A-Za-z][A-Za-z0-9_]*)\.(?P<attr>[A-Za-z][A-Za-z0-9_]*)$")


def _parse_assignment(entry: str, block_id: str) -> Assignment:
    raw = entry.strip().strip('"')
    if "=" not in raw:
        raise BlockParseError(f"expected lhs=rhs, got {raw!r}",
                              block_id=block_id, field="Assignment")
    lhs_text, rhs_text = raw.split("=", 1)
    lhs_text = lhs_text.strip()
    # formula literals start with '(' so the first '=' belongs to the rhs
    if lhs_text.endswith("(") or lhs_text.startswith("("):
        raise BlockParseError(f"assignment lhs may not be an expression: {raw!r}",
                              block_id=block_id, field="Assignment")
    target: AssignmentTarget
    selector = _SELECTOR_RE.match(lhs_text)
    if selector:
        target = SelectorTarget(selector.group("block"), selector.group("cls"),
                                selector.group("attr"))
    elif IDENT_RE.fullmatch(lhs_text):
        target = DeclTarget(lhs_text)
    else:
        path = _LHS_PATH_RE.match(lhs_text)
        if not path:
            raise BlockParseError(f"cannot parse assignment target {lhs_text!r}",
                                  block_id=block_id, field="Assignment")
        target = AttrTarget(path.group("obj"), path.group("attr"))
    try:
        rhs = parse_value(rhs_text.strip())
    except BlockParseError as exc:
        raise BlockParseError(f"bad value in {raw!r}: {exc.message}",
                              block_id=block_id, field="Assignment",
                              position=exc.position) from exc
    return Assignment(target, rhs)


def parse_contract(document: str) -> list[Block]:
    """Parse a block document into an ordered list of blocks.

    Raises :class:`BlockParseError` on malformed JSON, duplicate block ids,
    unknown ontology classes and unparsable assignments.
    """
    try:
        data = json.loads(document)
    except json.JSONDecodeError as exc:
        raise BlockParseError(f"invalid JSON: {exc}") from exc
    if not isinstance(data, list):
        raise BlockParseError("top-level JSON value must be an array of blocks")
    blocks: list[Block] = []
    seen: set[str] = set()
    for i, item in enumerate(data):
        if not isinstance(item, dict):
            raise BlockParseError(f"entry {i} is not an object")
        block_id = item.get("ID")
        if not isinstance(block_id, str) or not IDENT_RE.fullmatch(block_id):
            raise BlockParseError(f"entry {i} has a missing or invalid ID")
        if block_id in seen:
            raise BlockParseError("duplicate block id", block_id=block_id, field="ID")
        seen.add(block_id)
        text = item.get("Text", "")
        if not isinstance(text, str):
            raise BlockParseError("Text must be a string", block_id=block_id, field="Text")
        raw_objects = item.get("Object", []) or []
        raw_assignments = item.get("Assignment", []) or []
        if not isinstance(raw_objects, list) or not all(isinstance(o, str) for o in raw_objects):
            raise BlockParseError("Object must be a list of strings",
                                  block_id=block_id, field="Object")
        if not isinstance(raw_assignments, list) or not all(isinstance(a, str) for a in raw_assignments):
            raise BlockParseError("Assignment must be a list of strings",
                                  block_id=block_id, field="Assignment")
        objects = tuple(_parse_object_decl(o, block_id) for o in raw_objects)
        names = [d.name for d in objects]
        if len(names) != len(set(names)):
            raise BlockParseError("duplicate object declaration name",
                                  block_id=block_id, field="Object")
        assignments = tuple(_parse_assignment(a, block_id) for a in raw_assignments)
        blocks.append(Block(block_id, text, objects, assignments))
    return blocks


def serialize_contract(blocks: list[Block]) -> str:
    """Render blocks back to the container format.

    ``parse_contract(serialize_contract(bs))`` produces a structurally equal
    block list (expression rendering always parenthesizes).
    """
    doc = [
        {
            "ID": b.id,
            "Text": b.text,
            "Object": [d.render() for d in b.objects],
            "Assignment": [a.render() for a in b.assignments],
        }
        for b in blocks
    ]
    return json.dumps(doc, indent=2, ensure_ascii=False)
