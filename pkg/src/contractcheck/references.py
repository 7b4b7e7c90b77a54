"""Binding of `$` references across blocks.

Resolution turns raw reference tokens into keys of declared objects:

* ``$var`` — the declaring block's own object,
* ``$BlockID_var`` — an object declared in another block (the token is split
  at the last underscore that yields a known block id),
* ``$x.Attr`` — an attribute slot of a resolved object,
* ``$Block8`` — a text block itself (for ``Block``-typed declarations),
* ``${//$b//Type}`` — all objects of ``Type`` (or a subclass) declared in
  block ``$b``.

Reference declarations (``claim:$Claim``) are aliases: a ``DeclTarget``
assignment such as ``claim=$Block1_transfer`` binds them, and lookups follow
alias chains to the declaring object.  Binding happens in two passes so the
result does not depend on block order; every dangling or cyclic reference is
collected and reported in one error.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import schema
from .blocks import AttrTarget, Block, DeclTarget, ObjectDecl, SelectorTarget
from .errors import ReferenceResolutionError
from .expr import (ArithExpr, FormulaLiteral, OpCall, Ref, StringLiteral,
                   ValueExpr, iter_refs)
from .schema import SlotType

# slot types whose values are objects of a known class (for chain validation)
_REF_SLOT_CLASS = {
    SlotType.PERSON_REF: "Person",
    SlotType.OBJECT_REF: "Object",
    SlotType.CLAIM_REF: "Claim",
    SlotType.CLAIM_LIST: "Claim",
}


@dataclass(frozen=True)
class EntityKey:
    """Identity of a declared (non-reference) object: block id + decl name."""

    block_id: str
    name: str

    def __str__(self) -> str:
        return f"{self.block_id}_{self.name}"


@dataclass(frozen=True)
class BlockKey:
    """A reference to a whole text block."""

    block_id: str

    def __str__(self) -> str:
        return self.block_id


@dataclass(frozen=True)
class Resolved:
    """A fully resolved reference: the target plus any attribute chain."""

    target: EntityKey | BlockKey
    attrs: tuple[str, ...] = ()


@dataclass
class SymbolTable:
    """All resolved declarations and assignments of one contract."""

    blocks: dict[str, Block]
    decls: dict[EntityKey, ObjectDecl]
    # flattened alias targets for reference declarations
    aliases: dict[EntityKey, EntityKey | BlockKey] = field(default_factory=dict)
    # value expressions assigned directly to scalar declarations
    scalar_values: dict[EntityKey, tuple[ValueExpr, str]] = field(default_factory=dict)
    # (entity, attr, rhs, origin block id) with selector targets expanded
    attr_assignments: list[tuple[EntityKey, str, ValueExpr, str]] = field(default_factory=list)

    def decl_of(self, key: EntityKey) -> ObjectDecl:
        return self.decls[key]

    def class_of(self, key: EntityKey) -> str:
        return self.decls[key].type_name

    def binding_map(self) -> dict[str, str]:
        """Deterministic snapshot of every binding, for equality checks."""
        out = {str(k): str(v) for k, v in self.aliases.items()}
        for key, decl in self.decls.items():
            if not decl.is_reference:
                out.setdefault(str(key), str(key))
        return dict(sorted(out.items()))

    # -- lookup ------------------------------------------------------------

    def _shallow(self, block_id: str, token: str) -> EntityKey | BlockKey:
        """Resolve a token to its immediate declaration, without dealiasing."""
        block = self.blocks[block_id]
        if block.decl(token) is not None:
            return EntityKey(block_id, token)
        if token in self.blocks:
            return BlockKey(token)
        pos = len(token)
        while True:
            pos = token.rfind("_", 0, pos)
            if pos < 0:
                break
            prefix, rest = token[:pos], token[pos + 1:]
            if prefix in self.blocks and rest and self.blocks[prefix].decl(rest) is not None:
                return EntityKey(prefix, rest)
        raise ReferenceResolutionError(
            [f"unresolved reference ${token} in block {block_id}"])

    def deref(self, key: EntityKey) -> EntityKey | BlockKey:
        """Follow alias chains from ``key`` to a concrete object or block."""
        seen: set[EntityKey] = set()
        cur: EntityKey | BlockKey = key
        while isinstance(cur, EntityKey) and self.decls[cur].is_reference:
            if cur in seen:
                raise ReferenceResolutionError(
                    [f"cyclic alias chain through ${cur.name} in block {cur.block_id}"])
            seen.add(cur)
            nxt = self.aliases.get(cur)
            if nxt is None:
                raise ReferenceResolutionError(
                    [f"reference declaration ${cur.name} in block {cur.block_id} "
                     f"is never bound"])
            cur = nxt
        return cur

    def resolve_token(self, block_id: str, token: str) -> EntityKey | BlockKey:
        """Resolve a bare reference token in the scope of ``block_id``."""
        target = self._shallow(block_id, token)
        if isinstance(target, EntityKey):
            return self.deref(target)
        return target

    def resolve_ref(self, block_id: str, ref: Ref) -> Resolved:
        target = self.resolve_token(block_id, ref.token)
        if ref.attrs and isinstance(target, BlockKey):
            raise ReferenceResolutionError(
                [f"block reference ${ref.token} in block {block_id} has no attributes"])
        return Resolved(target, ref.attrs)

    def select(self, block_id: str, sel: SelectorTarget) -> list[EntityKey]:
        """Objects of ``sel.class_name`` (or a subclass) declared in the
        referenced block, in declaration order."""
        target = self.resolve_token(block_id, sel.block_token)
        if isinstance(target, EntityKey):
            raise ReferenceResolutionError(
                [f"selector ${sel.block_token} in block {block_id} does not name a block"])
        selected = [
            EntityKey(target.block_id, d.name)
            for d in self.blocks[target.block_id].objects
            if not d.is_reference and schema.is_class(d.type_name)
            and schema.is_subclass(d.type_name, sel.class_name)
        ]
        if not selected:
            raise ReferenceResolutionError(
                [f"selector over block {target.block_id} matched no {sel.class_name} "
                 f"object (used in block {block_id})"])
        return selected


def _chain_problems(table: SymbolTable, block_id: str, resolved: Resolved) -> list[str]:
    """Check that an attribute chain walks declared slots of known classes."""
    if not resolved.attrs or isinstance(resolved.target, BlockKey):
        return []
    decl = table.decl_of(resolved.target)
    if decl.type_name in schema.SCALARS:
        return [f"scalar ${resolved.target.name} in block {block_id} has no "
                f"attribute {resolved.attrs[0]!r}"]
    cls = decl.type_name
    for i, attr in enumerate(resolved.attrs):
        stype = schema.slot_type(cls, attr)
        if stype is None:
            return [f"class {cls} has no attribute {attr!r} (referenced in block {block_id})"]
        cls = _REF_SLOT_CLASS.get(stype, "")
        if not cls and i < len(resolved.attrs) - 1:
            return [f"attribute {attr!r} is not an object and cannot be dereferenced "
                    f"further (block {block_id})"]
    return []


def _is_name_literal(expr: ValueExpr, stype: SlotType | None) -> bool:
    """Bare identifiers in string positions are literals, not references."""
    return (stype is SlotType.STRING and isinstance(expr, Ref)
            and not expr.sigil and not expr.attrs)


def _validate_rhs(table: SymbolTable, block_id: str, expr: ValueExpr,
                  stype: SlotType | None, problems: list[str]) -> None:
    if isinstance(expr, StringLiteral) or _is_name_literal(expr, stype):
        return
    # bare operation-call receivers may name an object by its Name attribute;
    # the model builder resolves those, so skip them here
    skip: set[int] = set()

    def collect_bare_receivers(e: ValueExpr) -> None:
        if isinstance(e, OpCall):
            if not e.receiver.sigil:
                skip.add(id(e.receiver))
            for arg in e.args:
                collect_bare_receivers(arg)
        elif isinstance(e, (ArithExpr, FormulaLiteral)):
            collect_bare_receivers(e.left)
            collect_bare_receivers(e.right)

    collect_bare_receivers(expr)
    for ref in iter_refs(expr):
        if id(ref) in skip:
            continue
        try:
            resolved = table.resolve_ref(block_id, ref)
            problems.extend(_chain_problems(table, block_id, resolved))
        except ReferenceResolutionError as exc:
            problems.extend(exc.problems)


def resolve_references(blocks: list[Block]) -> SymbolTable:
    """Bind every reference in ``blocks`` and return the symbol table.

    The result does not depend on block order.  All problems are gathered
    into one :class:`ReferenceResolutionError`; no `$` token is silently
    dropped.
    """
    block_map = {b.id: b for b in blocks}
    decls: dict[EntityKey, ObjectDecl] = {}
    for b in blocks:
        for d in b.objects:
            decls[EntityKey(b.id, d.name)] = d

    table = SymbolTable(block_map, decls)
    problems: list[str] = []

    # Pass 1: record shallow alias targets and scalar values.
    for b in blocks:
        for a in b.assignments:
            if not isinstance(a.lhs, DeclTarget):
                continue
            decl = b.decl(a.lhs.name)
            if decl is None:
                problems.append(
                    f"assignment to undeclared name {a.lhs.name!r} in block {b.id}")
                continue
            key = EntityKey(b.id, decl.name)
            if decl.is_reference or decl.type_name == "Block":
                if not isinstance(a.rhs, Ref) or a.rhs.attrs:
                    problems.append(
                        f"reference declaration {decl.name!r} in block {b.id} must be "
                        f"bound to a plain reference")
                    continue
                try:
                    target = table._shallow(b.id, a.rhs.token)
                except ReferenceResolutionError as exc:
                    problems.extend(exc.problems)
                    continue
                if target == key:
                    problems.append(
                        f"reference {decl.name!r} in block {b.id} bound to itself")
                    continue
                previous = table.aliases.get(key)
                if previous is not None and previous != target:
                    problems.append(
                        f"reference {decl.name!r} in block {b.id} bound twice to "
                        f"different targets")
                table.aliases[key] = target
            else:
                stype = (SlotType.STRING if decl.type_name == "String"
                         else SlotType.INT if decl.type_name in ("Integer", "Date")
                         else None)
                if _is_name_literal(a.rhs, SlotType.STRING) and decl.type_name == "String":
                    value: ValueExpr = StringLiteral(a.rhs.token)
                else:
                    value = a.rhs
                previous = table.scalar_values.get(key)
                if previous is not None and previous[0] != value:
                    problems.append(
                        f"scalar {decl.name!r} in block {b.id} assigned twice with "
                        f"different values")
                table.scalar_values[key] = (value, b.id)

    # Pass 2: flatten alias chains (detects cycles and unbound references
    # reachable through chains).
    for key in sorted(table.aliases, key=str):
        try:
            table.aliases[key] = table.deref(key)
        except ReferenceResolutionError as exc:
            problems.extend(exc.problems)

    # Pass 3: resolve attribute assignments (incl. selector expansion) and
    # validate every reference in right-hand sides and text templates.
    for b in blocks:
        for a in b.assignments:
            if isinstance(a.lhs, DeclTarget):
                decl = b.decl(a.lhs.name)
                if decl is not None and not decl.is_reference and decl.type_name != "Block":
                    stype = SlotType.STRING if decl.type_name == "String" else SlotType.INT
                    _validate_rhs(table, b.id, a.rhs, stype, problems)
                continue
            targets: list[tuple[EntityKey, str]] = []
            if isinstance(a.lhs, AttrTarget):
                try:
                    target = table.resolve_token(b.id, a.lhs.obj_token)
                except ReferenceResolutionError as exc:
                    problems.extend(exc.problems)
                    continue
                if isinstance(target, BlockKey):
                    problems.append(
                        f"cannot assign attribute {a.lhs.attr!r} to block "
                        f"{target.block_id} (in block {b.id})")
                    continue
                targets.append((target, a.lhs.attr))
            elif isinstance(a.lhs, SelectorTarget):
                try:
                    targets.extend((key, a.lhs.attr) for key in table.select(b.id, a.lhs))
                except ReferenceResolutionError as exc:
                    problems.extend(exc.problems)
                    continue
            for key, attr in targets:
                decl = table.decl_of(key)
                if decl.type_name in schema.SCALARS:
                    problems.append(
                        f"scalar {decl.name!r} has no attribute {attr!r} "
                        f"(assigned in block {b.id})")
                    continue
                stype = schema.slot_type(decl.type_name, attr)
                if stype is None:
                    problems.append(
                        f"class {decl.type_name} has no attribute {attr!r} "
                        f"(assigned in block {b.id})")
                    continue
                _validate_rhs(table, b.id, a.rhs, stype, problems)
                table.attr_assignments.append((key, attr, a.rhs, b.id))

        for token in b.text_placeholders():
            if token.startswith("${"):
                continue  # selectors in text are validated via assignments
            parts = token[1:].split(".")
            try:
                resolved = table.resolve_ref(b.id, Ref(parts[0], tuple(parts[1:])))
                problems.extend(_chain_problems(table, b.id, resolved))
            except ReferenceResolutionError as exc:
                problems.extend(exc.problems)

    if problems:
        raise ReferenceResolutionError(sorted(set(problems)))
    return table
