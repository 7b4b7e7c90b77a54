"""End-to-end convenience entry points shared by the CLI and the service."""

from __future__ import annotations

from .blocks import parse_contract
from .encoder import AnalysisKind
from .ontology import ContractModel, build_model
from .orchestrator import Report, run_all
from .references import resolve_references
from .solver import SolverConfig, config_from_env

KIND_ALIASES = {
    "all": None,
    "I": {AnalysisKind.CLAIM_CONSISTENCY},
    "consistency": {AnalysisKind.CLAIM_CONSISTENCY},
    "II": {AnalysisKind.EXECUTABILITY},
    "executability": {AnalysisKind.EXECUTABILITY},
    "unsat": {AnalysisKind.CLAIM_UNSATISFIABLE},
    "defense": {AnalysisKind.CLAIM_DEFENSE},
    "limitation": {AnalysisKind.LIMITATION},
}


def parse_kinds(names: list[str] | str | None) -> set[AnalysisKind] | None:
    """Translate CLI/HTTP analysis selectors into kinds (None means all)."""
    if names is None:
        return None
    if isinstance(names, str):
        names = [n for n in names.replace(",", " ").split() if n]
    kinds: set[AnalysisKind] = set()
    for name in names:
        if name in KIND_ALIASES:
            alias = KIND_ALIASES[name]
            if alias is None:
                return None
            kinds |= alias
        else:
            try:
                kinds.add(AnalysisKind(name))
            except ValueError:
                raise ValueError(f"unknown analysis kind {name!r}") from None
    return kinds or None


def model_from_document(document: str, contract_id: str = "contract") -> ContractModel:
    blocks = parse_contract(document)
    table = resolve_references(blocks)
    return build_model(blocks, table, contract_id)


def analyze_document(document: str, contract_id: str = "contract",
                     config: SolverConfig | None = None,
                     kinds: set[AnalysisKind] | None = None) -> Report:
    """Parse, resolve, build, check and solve one block document."""
    model = model_from_document(document, contract_id)
    return run_all(model, config or config_from_env(), kinds)
