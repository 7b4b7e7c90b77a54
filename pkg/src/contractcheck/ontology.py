"""Instantiation of the contract ontology from resolved blocks.

``build_model`` turns the symbol table into a validated
:class:`ContractModel`: persons and legal objects (unified by name), stated
property rights, and claims with their trigger/precede links and date
attributes.  Derived structure lives here too: trigger sets (connected
components of the trigger relation), the execution count, and symbolic
performance windows for each claim.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum

from . import schema, terms
from .blocks import Block
from .errors import ConstEvalError, ModelBuildError, ReferenceResolutionError
from .expr import (ArithExpr, FormulaLiteral, IntLiteral, OpCall, Ref,
                   RelativeDate, StringLiteral, ValueExpr, eval_const,
                   iter_refs, render_value)
from .references import BlockKey, EntityKey, SymbolTable
from .schema import SlotType
from .terms import Add, Const, IntTerm, Var

SIGNING_DAY = 0
UNPERFORMED = -1  # reserved date value: the claim was not performed


class ClaimKind(Enum):
    PRIMARY = "Primary"
    WARRANTY = "Warranty"
    PERFORMANCE = "Performance"
    RESTITUTION = "Restitution"
    COMPENSATION = "Compensation"


_KIND_BY_CLASS = {
    "PrimaryClaim": ClaimKind.PRIMARY,
    "WarrantyClaim": ClaimKind.WARRANTY,
    "PerformanceClaim": ClaimKind.PERFORMANCE,
    "RestitutionClaim": ClaimKind.RESTITUTION,
    "CompensationClaim": ClaimKind.COMPENSATION,
}

SECONDARY_KINDS = (ClaimKind.PERFORMANCE, ClaimKind.RESTITUTION, ClaimKind.COMPENSATION)


@dataclass(frozen=True)
class Absolute:
    day: int


@dataclass(frozen=True)
class Relative:
    offset: int


DateSpec = Absolute | Relative


@dataclass(frozen=True)
class Transfer:
    """Ownership transfer of ``object_id`` by the debtor to ``to_person``."""

    object_id: str
    to_person: str


@dataclass(frozen=True)
class Formula:
    """Boolean condition over integer facts (warranty content)."""

    term: terms.BoolTerm


Performance = Transfer | Formula


@dataclass(frozen=True)
class Person:
    id: str
    name: str
    block_id: str


@dataclass(frozen=True)
class LegalObject:
    id: str
    name: str
    class_name: str
    block_id: str
    amount: int | None = None


@dataclass(frozen=True)
class Claim:
    id: str
    kind: ClaimKind
    block_id: str
    debtor: str | None = None
    creditor: str | None = None
    arise: DateSpec | None = None
    due: DateSpec | None = None
    limitation: DateSpec | None = None
    performance: Performance | None = None
    trigger: str | None = None
    precede: str | None = None
    min_amount: int | None = None
    max_amount: int | None = None
    compensation: IntTerm | None = None
    # blocks that declared the claim or contributed attribute values
    origin_blocks: frozenset[str] = frozenset()


@dataclass(frozen=True)
class BuildNote:
    """Non-fatal problem found while building (feeds the static checks)."""

    severity: str  # "error" | "warning"
    code: str
    message: str
    block_ids: tuple[str, ...]


@dataclass(frozen=True)
class PropertyRightFact:
    """A stated ownership fact and the block stating it."""

    owner: str
    object_id: str
    block_id: str


@dataclass
class ContractModel:
    contract_id: str
    persons: dict[str, Person]
    objects: dict[str, LegalObject]
    property_rights: list[PropertyRightFact]
    claims: dict[str, Claim]
    seller: str | None
    purchaser: str | None
    spa_object: str | None
    spa_price: str | None
    signing_day: int
    closing_day: int | None
    unknowns: dict[str, str]  # free integer variable -> declaring block
    spa_block: str | None
    notes: list[BuildNote] = field(default_factory=list)
    blocks: dict[str, Block] = field(default_factory=dict)

    def roots(self) -> list[Claim]:
        """Primary claims and independent warranties (no trigger)."""
        return [c for c in self.claims.values() if c.trigger is None]

    def consequences_of(self, claim_id: str) -> list[Claim]:
        return [c for c in self.claims.values() if c.trigger == claim_id]

    def block_text(self, block_id: str) -> str:
        block = self.blocks.get(block_id)
        return block.text if block else ""


def _ident(name: str) -> str:
    cleaned = re.sub(r"[^A-Za-z0-9_]", "", name)
    if not cleaned or not cleaned[0].isalpha():
        cleaned = "X" + cleaned
    return cleaned


class _Builder:
    def __init__(self, blocks: list[Block], table: SymbolTable):
        self.blocks = blocks
        self.table = table
        self.notes: list[BuildNote] = []
        self.slots: dict[tuple[EntityKey, str], list[tuple[ValueExpr, str]]] = {}
        for key, attr, expr, origin in table.attr_assignments:
            self.slots.setdefault((key, attr), []).append((expr, origin))
        self._memo: dict[tuple[EntityKey, str], object] = {}
        self._busy: set[tuple[EntityKey, str]] = set()
        # entity id maps, filled by _build_entities
        self.person_ids: dict[EntityKey, str] = {}
        self.object_ids: dict[EntityKey, str] = {}
        self.claim_ids: dict[EntityKey, str] = {}
        self.persons: dict[str, Person] = {}
        self.objects: dict[str, LegalObject] = {}

    # -- declarations by class ---------------------------------------------

    def decls_of(self, ancestor: str) -> list[EntityKey]:
        out = []
        for b in self.blocks:
            for d in b.objects:
                if d.is_reference or not schema.is_class(d.type_name):
                    continue
                if schema.is_subclass(d.type_name, ancestor):
                    out.append(EntityKey(b.id, d.name))
        return out

    def note(self, severity: str, code: str, message: str, block_ids: list[str]) -> None:
        self.notes.append(BuildNote(severity, code, message, tuple(block_ids)))

    # -- slot evaluation -----------------------------------------------------

    def slot_value(self, key: EntityKey, attr: str):
        """Evaluate one attribute slot to a raw typed value (memoized).

        Raw values keep entity references as declaration keys; conversion to
        model ids happens when the entities are assembled.
        """
        memo_key = (key, attr)
        if memo_key in self._memo:
            return self._memo[memo_key]
        if memo_key in self._busy:
            raise ModelBuildError(
                f"cyclic attribute dependency through {key}.{attr}")
        assignments = self.slots.get(memo_key, [])
        stype = schema.slot_type(self.table.class_of(key), attr)
        if stype is None:
            raise ModelBuildError(f"class {self.table.class_of(key)} has no slot {attr}")
        self._busy.add(memo_key)
        try:
            if stype is SlotType.CLAIM_LIST:
                values: list[EntityKey] = []
                for expr, origin in assignments:
                    v = self._eval(expr, origin, SlotType.CLAIM_REF)
                    if v not in values:
                        values.append(v)
                result: object = tuple(values)
            else:
                result = None
                for expr, origin in assignments:
                    v = self._eval(expr, origin, stype)
                    if result is None:
                        result = v
                    elif result != v:
                        raise ModelBuildError(
                            f"conflicting assignments to {key}.{attr}: "
                            f"{result!r} vs {v!r} (block {origin})")
            self._memo[memo_key] = result
            return result
        finally:
            self._busy.discard(memo_key)

    def _scalar_raw(self, key: EntityKey, stype: SlotType, origin_hint: str):
        """Value of a scalar declaration in the expected slot type."""
        decl = self.table.decl_of(key)
        entry = self.table.scalar_values.get(key)
        if entry is None:
            if decl.type_name == "Integer" and stype is SlotType.ARITH:
                return Var(str(key))  # free integer unknown
            raise ModelBuildError(
                f"scalar {key} has no value (needed in block {origin_hint})")
        expr, origin = entry
        return self._eval(expr, origin, stype)

    def _deref_value(self, ref: Ref, origin: str, stype: SlotType):
        resolved = self.table.resolve_ref(origin, ref)
        target = resolved.target
        if isinstance(target, BlockKey):
            raise ModelBuildError(
                f"block reference ${ref.token} cannot be used as a value "
                f"(block {origin})")
        # walk the attribute chain
        for i, attr in enumerate(resolved.attrs):
            decl = self.table.decl_of(target)
            if decl.type_name in schema.SCALARS:
                raise ModelBuildError(
                    f"scalar {target} has no attribute {attr} (block {origin})")
            last = i == len(resolved.attrs) - 1
            chain_type = schema.slot_type(decl.type_name, attr)
            value = self.slot_value(target, attr)
            if value is None:
                raise ModelBuildError(
                    f"attribute {target}.{attr} is unset (referenced in block {origin})")
            if not last:
                if not isinstance(value, EntityKey):
                    raise ModelBuildError(
                        f"attribute {target}.{attr} is not an object reference "
                        f"(block {origin})")
                target = value
                continue
            return self._coerce(value, chain_type, stype, origin,
                                f"{target}.{attr}")
        # no attribute chain: the declaration itself
        decl = self.table.decl_of(target)
        if decl.type_name in schema.SCALARS:
            return self._scalar_raw(target, stype, origin)
        expected_class = {
            SlotType.PERSON_REF: "Person",
            SlotType.OBJECT_REF: "Object",
            SlotType.CLAIM_REF: "Claim",
        }.get(stype)
        if expected_class is None:
            raise ModelBuildError(
                f"object ${ref.token} used where a {stype.value} value is "
                f"expected (block {origin})")
        if not schema.is_subclass(decl.type_name, expected_class):
            raise ModelBuildError(
                f"type mismatch: {target} is a {decl.type_name}, expected "
                f"{expected_class} (block {origin})")
        return target

    def _coerce(self, value, actual: SlotType | None, expected: SlotType,
                origin: str, what: str):
        """Convert a chained slot value to the expected slot type."""
        if actual is expected:
            return value
        if expected is SlotType.DATE and isinstance(value, int):
            return Absolute(value)
        if expected is SlotType.ARITH and isinstance(value, int):
            return Const(value)
        if expected is SlotType.INT and isinstance(value, int):
            return value
        if expected is SlotType.CLAIM_REF and isinstance(value, EntityKey):
            return value
        raise ModelBuildError(
            f"type mismatch: {what} has type {actual.value if actual else '?'}, "
            f"expected {expected.value} (block {origin})")

    def _eval(self, expr: ValueExpr, origin: str, stype: SlotType):
        if stype is SlotType.STRING:
            if isinstance(expr, StringLiteral):
                return expr.value
            if isinstance(expr, Ref) and not expr.sigil and not expr.attrs:
                return expr.token
            if isinstance(expr, Ref):
                return self._deref_value(expr, origin, stype)
            if isinstance(expr, IntLiteral):
                return str(expr.value)
            raise ModelBuildError(
                f"expected a string, got {render_value(expr)} (block {origin})")
        if stype is SlotType.INT:
            if isinstance(expr, Ref):
                value = self._deref_value(expr, origin, stype)
                if isinstance(value, Var):
                    raise ModelBuildError(
                        f"{render_value(expr)} is not a constant (block {origin})")
                return value
            try:
                return eval_const(expr)
            except ConstEvalError as exc:
                raise ModelBuildError(
                    f"type mismatch: expected an integer, got "
                    f"{render_value(expr)} (block {origin}): {exc}") from exc
        if stype is SlotType.DATE:
            if isinstance(expr, RelativeDate):
                return Relative(expr.offset)
            if isinstance(expr, Ref):
                value = self._deref_value(expr, origin, stype)
                if isinstance(value, int):
                    return Absolute(value)
                if isinstance(value, (Absolute, Relative)):
                    return value
                if isinstance(value, Const):
                    return Absolute(value.value)
                raise ModelBuildError(
                    f"type mismatch: {render_value(expr)} is not a date "
                    f"(block {origin})")
            try:
                return Absolute(eval_const(expr))
            except ConstEvalError as exc:
                raise ModelBuildError(
                    f"type mismatch: expected a date, got {render_value(expr)} "
                    f"(block {origin}): {exc}") from exc
        if stype in (SlotType.PERSON_REF, SlotType.OBJECT_REF, SlotType.CLAIM_REF):
            if isinstance(expr, Ref):
                value = self._deref_value(expr, origin, stype)
                if isinstance(value, EntityKey):
                    return value
                raise ModelBuildError(
                    f"{render_value(expr)} does not name an object (block {origin})")
            raise ModelBuildError(
                f"type mismatch: expected an object reference, got "
                f"{render_value(expr)} (block {origin})")
        if stype is SlotType.PERFORMANCE:
            return self._eval_performance(expr, origin)
        if stype is SlotType.ARITH:
            return self._arith_term(expr, origin)
        raise ModelBuildError(f"unsupported slot type {stype}")

    def _eval_performance(self, expr: ValueExpr, origin: str) -> Performance:
        if isinstance(expr, OpCall):
            if expr.method != "transfer":
                raise ModelBuildError(
                    f"unsupported operation {expr.method!r} (block {origin}); "
                    f"only transfer(...) is defined")
            receiver = self._resolve_object(expr.receiver, origin)
            if len(expr.args) != 1:
                raise ModelBuildError(
                    f"transfer(...) takes exactly one argument (block {origin})")
            to = self._eval(expr.args[0], origin, SlotType.PERSON_REF)
            return _RawTransfer(receiver, to)
        if isinstance(expr, FormulaLiteral):
            left = self._arith_term(expr.left, origin)
            right = self._arith_term(expr.right, origin)
            op = expr.op
            if op == "=":
                term = terms.eq(left, right)
            elif op == "<=":
                term = terms.le(left, right)
            elif op == "<":
                term = terms.lt(left, right)
            elif op == ">=":
                term = terms.le(right, left)
            else:
                term = terms.lt(right, left)
            return Formula(term)
        if isinstance(expr, Ref):
            value = self._deref_value(expr, origin, SlotType.PERFORMANCE)
            if isinstance(value, (_RawTransfer, Formula)):
                return value
            raise ModelBuildError(
                f"{render_value(expr)} is not a performance (block {origin})")
        raise ModelBuildError(
            f"type mismatch: expected a performance, got {render_value(expr)} "
            f"(block {origin})")

    def _resolve_object(self, ref: Ref, origin: str) -> EntityKey:
        """Resolve an operation-call receiver to a legal object.

        A bare receiver (``Bakery.transfer(...)``) may name an object by its
        Name attribute instead of a declaration.
        """
        try:
            value = self._eval(ref, origin, SlotType.OBJECT_REF)
            if isinstance(value, EntityKey):
                return value
        except (ModelBuildError, ReferenceResolutionError):
            if ref.sigil or ref.attrs:
                raise
        for key in self.decls_of("Object"):
            if self.slot_value(key, "Name") == ref.token or key.name == ref.token:
                return key
        raise ModelBuildError(
            f"no object named {ref.token!r} (block {origin})")

    def _arith_term(self, expr: ValueExpr, origin: str) -> IntTerm:
        if isinstance(expr, IntLiteral):
            return Const(expr.value)
        if isinstance(expr, Ref):
            value = self._deref_value(expr, origin, SlotType.ARITH)
            if isinstance(value, int):
                return Const(value)
            if isinstance(value, (Const, Var)):
                return value
            raise ModelBuildError(
                f"{render_value(expr)} is not an integer value (block {origin})")
        if isinstance(expr, ArithExpr):
            left = self._arith_term(expr.left, origin)
            right = self._arith_term(expr.right, origin)
            if expr.op == "+":
                return terms.Add(left, right)
            if expr.op == "-":
                return terms.Sub(left, right)
            if expr.op == "*":
                if not isinstance(left, Const) and not isinstance(right, Const):
                    raise ModelBuildError(
                        f"nonlinear product in {render_value(expr)} (block {origin})")
                return terms.Mul(left, right)
            if isinstance(right, Const):
                if right.value == 0:
                    raise ModelBuildError(f"division by zero (block {origin})")
                return terms.DivConst(left, right.value)
            raise ModelBuildError(
                f"division must be by a constant literal in {render_value(expr)} "
                f"(block {origin})")
        raise ModelBuildError(
            f"type mismatch: expected an integer expression, got "
            f"{render_value(expr)} (block {origin})")

    # -- entity assembly -----------------------------------------------------

    def _build_entities(self) -> None:
        for key in self.decls_of("Person"):
            name = self.slot_value(key, "Name")
            if name is None:
                self.note("error", "MISSING_ATTRIBUTE",
                          f"person {key} has no Name", [key.block_id])
                pid = str(key)
                display = str(key)
            else:
                pid = _ident(str(name))
                display = str(name)
            self.person_ids[key] = pid
            if pid not in self.persons:
                self.persons[pid] = Person(pid, display, key.block_id)
        for key in self.decls_of("Object"):
            name = self.slot_value(key, "Name")
            cls = self.table.class_of(key)
            if name is None:
                self.note("warning", "MISSING_ATTRIBUTE",
                          f"object {key} has no Name", [key.block_id])
                oid = _ident(key.name[:1].upper() + key.name[1:])
                display = key.name
            else:
                oid = _ident(str(name))
                display = str(name)
            self.object_ids[key] = oid
            if oid not in self.objects:
                amount = None
                if cls == "PurchasePrice":
                    amount = self.slot_value(key, "Amount")
                self.objects[oid] = LegalObject(oid, display, cls, key.block_id, amount)
        used: set[str] = set()
        for key in self.decls_of("Claim"):
            decl = self.table.decl_of(key)
            if schema.CLASSES[decl.type_name].abstract:
                raise ModelBuildError(
                    f"abstract class {decl.type_name} cannot be instantiated "
                    f"(block {key.block_id})")
            name = self.slot_value(key, "Name")
            cid = _ident(str(name)) if name else str(key)
            if cid in used:
                raise ModelBuildError(
                    f"duplicate claim id {cid!r} (block {key.block_id})")
            used.add(cid)
            self.claim_ids[key] = cid

    def _build_claim(self, key: EntityKey) -> Claim:
        decl = self.table.decl_of(key)
        kind = _KIND_BY_CLASS[decl.type_name]
        cid = self.claim_ids[key]
        # a claim's origin covers its declaration, every block assigning one
        # of its attributes, and the blocks declaring the symbols those
        # assignments reference (conflicts must cite both sides)
        origins = {key.block_id}
        for attr in ("Name", "Debtor", "Creditor", "Arise", "DueDate", "Limitation",
                     "Performance", "Trigger", "Precede", "Min", "Max", "Compensation"):
            for expr, origin in self.slots.get((key, attr), []):
                origins.add(origin)
                for ref in iter_refs(expr):
                    try:
                        resolved = self.table.resolve_ref(origin, ref)
                    except ReferenceResolutionError:
                        continue
                    if isinstance(resolved.target, EntityKey):
                        origins.add(resolved.target.block_id)

        def person(attr: str) -> str | None:
            v = self.slot_value(key, attr)
            if v is None:
                return None
            return self.person_ids.get(v) or str(v)

        def claim_ref(attr: str) -> str | None:
            v = self.slot_value(key, attr)
            if v is None:
                return None
            if v not in self.claim_ids:
                raise ModelBuildError(
                    f"{cid}.{attr} does not reference a claim (block {key.block_id})")
            return self.claim_ids[v]

        performance = self.slot_value(key, "Performance")
        if isinstance(performance, _RawTransfer):
            obj = self.object_ids.get(performance.object_key)
            to = self.person_ids.get(performance.to_key)
            if obj is None or to is None:
                raise ModelBuildError(
                    f"transfer in {cid} references unknown entities (block {key.block_id})")
            performance = Transfer(obj, to)
        compensation = self.slot_value(key, "Compensation") if kind is ClaimKind.COMPENSATION else None
        min_amount = self.slot_value(key, "Min") if kind is ClaimKind.COMPENSATION else None
        max_amount = self.slot_value(key, "Max") if kind is ClaimKind.COMPENSATION else None
        claim = Claim(
            id=cid,
            kind=kind,
            block_id=key.block_id,
            debtor=person("Debtor"),
            creditor=person("Creditor"),
            arise=self.slot_value(key, "Arise"),
            due=self.slot_value(key, "DueDate"),
            limitation=self.slot_value(key, "Limitation"),
            performance=performance,
            trigger=claim_ref("Trigger"),
            precede=claim_ref("Precede"),
            min_amount=min_amount,
            max_amount=max_amount,
            compensation=compensation,
            origin_blocks=frozenset(origins),
        )
        for attr, value in (("Debtor", claim.debtor), ("Creditor", claim.creditor)):
            if value is None:
                self.note("error", "MISSING_ATTRIBUTE",
                          f"claim {cid} has no {attr}", [key.block_id])
        if kind in SECONDARY_KINDS and claim.trigger is None:
            self.note("error", "NO_TRIGGER",
                      f"{kind.value} claim {cid} has no trigger", [key.block_id])
        if kind in (ClaimKind.PRIMARY, ClaimKind.WARRANTY) and claim.trigger is not None:
            self.note("warning", "UNEXPECTED_TRIGGER",
                      f"{kind.value.lower()} claim {cid} should not have a trigger",
                      [key.block_id])
        if (claim.min_amount is not None and claim.max_amount is not None
                and claim.min_amount > claim.max_amount):
            self.note("warning", "MIN_ABOVE_MAX",
                      f"claim {cid} has Min {claim.min_amount} above Max "
                      f"{claim.max_amount}", sorted(origins))
        return claim

    def build(self, contract_id: str) -> ContractModel:
        spa_decls = self.decls_of("SPA")
        if len(spa_decls) > 1:
            raise ModelBuildError("more than one SPA declared; multi-SPA files "
                                  "are not supported")
        self._build_entities()
        spa_key = spa_decls[0] if spa_decls else None

        seller = purchaser = spa_object = spa_price = None
        closing = None
        signing = SIGNING_DAY
        if spa_key is not None:
            v = self.slot_value(spa_key, "Seller")
            seller = self.person_ids.get(v) if v else None
            v = self.slot_value(spa_key, "Purchaser")
            purchaser = self.person_ids.get(v) if v else None
            v = self.slot_value(spa_key, "Object")
            spa_object = self.object_ids.get(v) if v else None
            v = self.slot_value(spa_key, "Price")
            spa_price = self.object_ids.get(v) if v else None
            closing = self.slot_value(spa_key, "Closing")
            signing = self.slot_value(spa_key, "Signing") or SIGNING_DAY
        if seller is not None and seller == purchaser:
            self.note("error", "SELLER_IS_PURCHASER",
                      "seller and purchaser are the same person",
                      [spa_key.block_id if spa_key else "contract"])

        property_rights: list[PropertyRightFact] = []
        pr_origin: dict[str, str] = {}
        for key in self.decls_of("PropertyRight"):
            owner_key = self.slot_value(key, "Owner")
            prop_key = self.slot_value(key, "Property")
            if owner_key is None or prop_key is None:
                self.note("error", "MISSING_ATTRIBUTE",
                          f"property right {key} needs Owner and Property",
                          [key.block_id])
                continue
            fact = PropertyRightFact(self.person_ids[owner_key],
                                     self.object_ids[prop_key], key.block_id)
            if any(f.owner == fact.owner and f.object_id == fact.object_id
                   for f in property_rights):
                continue
            if fact.object_id in pr_origin:
                self.note("warning", "DOUBLE_OWNERSHIP",
                          f"object {fact.object_id} has more than one stated owner",
                          sorted({pr_origin[fact.object_id], key.block_id}))
            property_rights.append(fact)
            pr_origin.setdefault(fact.object_id, key.block_id)

        claims: dict[str, Claim] = {}
        for key in self.decls_of("Claim"):
            claim = self._build_claim(key)
            claims[claim.id] = claim
        for claim in claims.values():
            for attr, target in (("trigger", claim.trigger), ("precede", claim.precede)):
                if target is not None and target not in claims:
                    raise ModelBuildError(
                        f"claim {claim.id} {attr} references unknown claim {target}")
        _check_trigger_acyclic(claims)

        unknowns: dict[str, str] = {}
        for b in self.blocks:
            for d in b.objects:
                if d.is_reference or d.type_name != "Integer":
                    continue
                key = EntityKey(b.id, d.name)
                if key not in self.table.scalar_values:
                    unknowns[str(key)] = b.id

        model = ContractModel(
            contract_id=contract_id,
            persons=self.persons,
            objects=self.objects,
            property_rights=property_rights,
            claims=claims,
            seller=seller,
            purchaser=purchaser,
            spa_object=spa_object,
            spa_price=spa_price,
            signing_day=signing,
            closing_day=closing,
            unknowns=unknowns,
            spa_block=spa_key.block_id if spa_key else None,
            notes=self.notes,
            blocks={b.id: b for b in self.blocks},
        )
        return model


@dataclass(frozen=True)
class _RawTransfer:
    object_key: EntityKey
    to_key: EntityKey


def _check_trigger_acyclic(claims: dict[str, Claim]) -> None:
    for start in claims.values():
        seen = set()
        cur = start
        while cur.trigger is not None:
            if cur.id in seen:
                raise ModelBuildError(f"trigger cycle involving claim {cur.id}")
            seen.add(cur.id)
            cur = claims[cur.trigger]


def build_model(blocks: list[Block], table: SymbolTable,
                contract_id: str = "contract") -> ContractModel:
    """Instantiate the object diagram described by the resolved blocks."""
    return _Builder(blocks, table).build(contract_id)


# -- derived structure -------------------------------------------------------

def trigger_sets(model: ContractModel) -> list[set[str]]:
    """Partition of the claims into connected components of the trigger
    relation, ordered by smallest member id."""
    parent: dict[str, str] = {cid: cid for cid in model.claims}

    def find(x: str) -> str:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a: str, b: str) -> None:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb

    for claim in model.claims.values():
        if claim.trigger is not None:
            union(claim.id, claim.trigger)
    groups: dict[str, set[str]] = {}
    for cid in model.claims:
        groups.setdefault(find(cid), set()).add(cid)
    return sorted(groups.values(), key=lambda s: min(s))


def count_executions(model: ContractModel) -> int:
    """Number of distinct claim-execution combinations: one performed claim
    per trigger set (empty product is 1)."""
    total = 1
    for group in trigger_sets(model):
        total *= len(group)
    return total


# -- performance windows ------------------------------------------------------

@dataclass(frozen=True)
class Window:
    """Symbolic bounds for a claim's performance date.

    ``lower`` is inclusive for primary claims and warranties (the due date)
    and strict for triggered claims (the trigger's breach date ``d'``).
    ``due_upper`` is the deadline derived from a relative due date;
    ``lim_upper`` comes from the limitation and is the bound dropped by the
    limitation analysis.  ``extra_lower`` carries an absolute due date on a
    triggered claim.
    """

    lower: IntTerm
    lower_strict: bool = False
    due_upper: IntTerm | None = None
    lim_upper: IntTerm | None = None
    extra_lower: IntTerm | None = None

    @property
    def upper(self) -> IntTerm | None:
        return self.due_upper if self.due_upper is not None else self.lim_upper


def dprime_var(claim_id: str) -> str:
    return f"dprime_{claim_id}"


def date_var(claim_id: str) -> str:
    return f"d_{claim_id}"


def compensation_var(claim_id: str) -> str:
    return f"l_{claim_id}"


def resolve_window(model: ContractModel, claim: Claim) -> Window:
    """Resolve due date and limitation into symbolic bounds.

    Anchoring: absolute dates stay constants; a relative due date on a
    triggered claim anchors on the trigger's breach date ``d'``; a relative
    limitation anchors on the claim's own due date for untriggered claims and
    on ``d'`` for triggered ones; a missing due date defaults to the arise
    date (signing unless stated); a missing limitation leaves the claim
    unbounded above.
    """
    if claim.trigger is not None:
        dprime = Var(dprime_var(claim.trigger))
        due_upper = None
        extra_lower = None
        if isinstance(claim.due, Relative):
            due_upper = Add(dprime, Const(claim.due.offset))
        elif isinstance(claim.due, Absolute):
            extra_lower = Const(claim.due.day)
        lim_upper = None
        if isinstance(claim.limitation, Absolute):
            lim_upper = Const(claim.limitation.day)
        elif isinstance(claim.limitation, Relative):
            lim_upper = Add(dprime, Const(claim.limitation.offset))
        return Window(lower=dprime, lower_strict=True, due_upper=due_upper,
                      lim_upper=lim_upper, extra_lower=extra_lower)

    arise_day = model.signing_day
    if isinstance(claim.arise, Absolute):
        arise_day = claim.arise.day
    elif isinstance(claim.arise, Relative):
        arise_day = model.signing_day + claim.arise.offset
    if claim.due is None:
        if claim.kind is ClaimKind.WARRANTY and claim.arise is None:
            raise ModelBuildError(
                f"warranty {claim.id} needs an explicit due date")
        lower_day = arise_day
    elif isinstance(claim.due, Absolute):
        lower_day = claim.due.day
    else:
        lower_day = model.signing_day + claim.due.offset
    lim_upper = None
    if isinstance(claim.limitation, Absolute):
        lim_upper = Const(claim.limitation.day)
    elif isinstance(claim.limitation, Relative):
        lim_upper = Const(lower_day + claim.limitation.offset)
    return Window(lower=Const(lower_day), lower_strict=False, lim_upper=lim_upper)


def diagram_json(model: ContractModel) -> dict:
    """Debug export of the object diagram (objects, attributes, links)."""
    claims = []
    for c in model.claims.values():
        claims.append({
            "id": c.id,
            "kind": c.kind.value,
            "block": c.block_id,
            "debtor": c.debtor,
            "creditor": c.creditor,
            "due": _date_json(c.due),
            "limitation": _date_json(c.limitation),
            "trigger": c.trigger,
            "precede": c.precede,
            "min": c.min_amount,
            "max": c.max_amount,
            "performance": _performance_json(c.performance),
        })
    return {
        "contract": model.contract_id,
        "persons": [{"id": p.id, "name": p.name, "block": p.block_id}
                    for p in model.persons.values()],
        "objects": [{"id": o.id, "name": o.name, "class": o.class_name,
                     "amount": o.amount} for o in model.objects.values()],
        "property_rights": [{"owner": f.owner, "object": f.object_id,
                             "block": f.block_id}
                            for f in model.property_rights],
        "claims": claims,
        "seller": model.seller,
        "purchaser": model.purchaser,
        "signing": model.signing_day,
        "closing": model.closing_day,
    }


def _date_json(date: DateSpec | None):
    if date is None:
        return None
    if isinstance(date, Absolute):
        return {"day": date.day}
    return {"offset": date.offset}


def _performance_json(perf: Performance | None):
    if perf is None:
        return None
    if isinstance(perf, Transfer):
        return {"transfer": perf.object_id, "to": perf.to_person}
    return {"formula": terms.pretty(perf.term)}
