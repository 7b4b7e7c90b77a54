"""Syntactic completeness checks run before any solving.

Findings use a fixed catalog of codes so the UI and tests can match them:

* ``ESSENTIALIA_SELLER`` / ``ESSENTIALIA_PURCHASER`` / ``ESSENTIALIA_OBJECT``
  / ``ESSENTIALIA_PRICE`` — a missing essential contract element,
* ``NO_CONSEQUENCE`` — a primary claim without any consequence claim
  (warning; the dynamic breach analysis reports the semantic effect),
* ``NO_DUEDATE`` — a claim whose due date cannot be resolved,
* plus the model-builder notes (``MISSING_ATTRIBUTE``, ``NO_TRIGGER``, ...).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .errors import ModelBuildError
from .ontology import ClaimKind, ContractModel, resolve_window


class Severity(Enum):
    ERROR = "error"
    WARNING = "warning"


@dataclass(frozen=True)
class Finding:
    severity: Severity
    code: str
    message: str
    block_ids: tuple[str, ...]

    def to_dict(self) -> dict:
        return {
            "severity": self.severity.value,
            "code": self.code,
            "message": self.message,
            "block_ids": list(self.block_ids),
        }


def _blocks(model: ContractModel) -> tuple[str, ...]:
    if model.spa_block:
        return (model.spa_block,)
    if model.blocks:
        return (next(iter(model.blocks)),)
    return ("contract",)


def check_essentialia(model: ContractModel) -> list[Finding]:
    """One error per missing essential element: the parties, the purchase
    object and the purchase price."""
    findings: list[Finding] = []
    where = _blocks(model)
    if model.seller is None or model.seller not in model.persons:
        findings.append(Finding(Severity.ERROR, "ESSENTIALIA_SELLER",
                                "the contract names no seller", where))
    if model.purchaser is None or model.purchaser not in model.persons:
        findings.append(Finding(Severity.ERROR, "ESSENTIALIA_PURCHASER",
                                "the contract names no purchaser", where))
    has_shares = model.spa_object is not None or any(
        o.class_name == "Shares" for o in model.objects.values())
    if not has_shares:
        findings.append(Finding(Severity.ERROR, "ESSENTIALIA_OBJECT",
                                "the contract names no purchase object", where))
    has_price = model.spa_price is not None or any(
        o.class_name == "PurchasePrice" for o in model.objects.values())
    if not has_price:
        findings.append(Finding(Severity.ERROR, "ESSENTIALIA_PRICE",
                                "the contract names no purchase price", where))
    return findings


def check_claim_completeness(model: ContractModel) -> list[Finding]:
    """Warn about primary claims without a consequence claim; report an error
    for every claim whose due date cannot be resolved."""
    findings: list[Finding] = []
    for claim in model.claims.values():
        if claim.kind is ClaimKind.PRIMARY and not model.consequences_of(claim.id):
            findings.append(Finding(
                Severity.WARNING, "NO_CONSEQUENCE",
                f"primary claim {claim.id} has no consequence claim",
                (claim.block_id,)))
        try:
            resolve_window(model, claim)
        except ModelBuildError as exc:
            findings.append(Finding(
                Severity.ERROR, "NO_DUEDATE",
                f"claim {claim.id} has no resolvable due date: {exc}",
                (claim.block_id,)))
    return findings


def model_notes(model: ContractModel) -> list[Finding]:
    """Builder notes (missing attributes, trigger problems) as findings."""
    out = []
    for note in model.notes:
        severity = Severity.ERROR if note.severity == "error" else Severity.WARNING
        out.append(Finding(severity, note.code, note.message, note.block_ids))
    return out


def run_static_checks(model: ContractModel) -> list[Finding]:
    """All static findings in a deterministic order."""
    findings = check_essentialia(model) + check_claim_completeness(model)
    findings.extend(model_notes(model))
    return findings


def has_errors(findings: list[Finding]) -> bool:
    return any(f.severity is Severity.ERROR for f in findings)
