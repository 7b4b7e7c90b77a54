"""Class table for the contract ontology.

Declares the classes a block may instantiate, their inheritance, and the
typed attribute slots each class carries.  The table drives parser
validation, reference resolution and model building.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum


class SlotType(Enum):
    STRING = "string"
    INT = "int"
    DATE = "date"            # absolute day or +offset
    PERSON_REF = "person"
    OBJECT_REF = "object"
    CLAIM_REF = "claim"
    CLAIM_LIST = "claim-list"
    PERFORMANCE = "performance"  # transfer op call or boolean formula
    ARITH = "arith"          # integer expression over declared unknowns


@dataclass(frozen=True)
class ClassDef:
    name: str
    parent: str | None
    abstract: bool = False
    slots: tuple[tuple[str, SlotType], ...] = ()


_CLASSES = [
    ClassDef("SPA", None, slots=(
        ("Seller", SlotType.PERSON_REF),
        ("Purchaser", SlotType.PERSON_REF),
        ("Object", SlotType.OBJECT_REF),
        ("Price", SlotType.OBJECT_REF),
        ("Claim", SlotType.CLAIM_LIST),
        ("Signing", SlotType.INT),
        ("Closing", SlotType.INT),
    )),
    ClassDef("Person", None, slots=(("Name", SlotType.STRING),)),
    ClassDef("Object", None, abstract=True, slots=(("Name", SlotType.STRING),)),
    ClassDef("Shares", "Object"),
    ClassDef("PurchasePrice", "Object", slots=(("Amount", SlotType.INT),)),
    ClassDef("PropertyRight", None, slots=(
        ("Owner", SlotType.PERSON_REF),
        ("Property", SlotType.OBJECT_REF),
    )),
    ClassDef("Claim", None, abstract=True, slots=(
        ("Name", SlotType.STRING),
        ("Debtor", SlotType.PERSON_REF),
        ("Creditor", SlotType.PERSON_REF),
        ("Arise", SlotType.DATE),
        ("DueDate", SlotType.DATE),
        ("Limitation", SlotType.DATE),
        ("Performance", SlotType.PERFORMANCE),
        ("Trigger", SlotType.CLAIM_REF),
        ("Precede", SlotType.CLAIM_REF),
    )),
    ClassDef("PrimaryClaim", "Claim"),
    ClassDef("SecondaryClaim", "Claim", abstract=True),
    ClassDef("WarrantyClaim", "SecondaryClaim"),
    ClassDef("PerformanceClaim", "SecondaryClaim"),
    ClassDef("RestitutionClaim", "SecondaryClaim"),
    ClassDef("CompensationClaim", "SecondaryClaim", slots=(
        ("Min", SlotType.INT),
        ("Max", SlotType.INT),
        ("Compensation", SlotType.ARITH),
    )),
]

CLASSES: dict[str, ClassDef] = {c.name: c for c in _CLASSES}

# Scalar declaration types; Block declarations bind to other text blocks.
SCALARS = {"Integer", "String", "Date", "Block"}


def is_class(name: str) -> bool:
    return name in CLASSES


def is_subclass(name: str, ancestor: str) -> bool:
    """True when ``name`` equals ``ancestor`` or inherits from it."""
    cur: str | None = name
    while cur is not None:
        if cur == ancestor:
            return True
        cur = CLASSES[cur].parent if cur in CLASSES else None
    return False


def slot_type(class_name: str, attr: str) -> SlotType | None:
    """Look up ``attr`` on ``class_name`` or any ancestor; None if unknown."""
    cur: str | None = class_name
    while cur is not None and cur in CLASSES:
        for name, stype in CLASSES[cur].slots:
            if name == attr:
                return stype
        cur = CLASSES[cur].parent
    return None
