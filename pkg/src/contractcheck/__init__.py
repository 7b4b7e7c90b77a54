"""Consistency analysis for share purchase agreements written as blocks.

Pipeline: parse the block document, resolve `$` references, instantiate the
contract ontology, compile claims into decidable constraints, run the five
consistency analyses through an external SMT solver, and report feasible
executions as sequence traces or inconsistencies as block-level red flags.
"""

from .blocks import Block, parse_contract, serialize_contract
from .checks import Finding, Severity, run_static_checks
from .encoder import AnalysisKind, build_analyses
from .errors import (BlockParseError, ContractCheckError, EncodeError,
                     ModelBuildError, ReferenceResolutionError, SolverError)
from .ontology import ContractModel, build_model, count_executions, trigger_sets
from .orchestrator import Report, run_all
from .pipeline import analyze_document, model_from_document, parse_kinds
from .references import resolve_references
from .reporting import parse_report, to_json, to_sequence_diagram, to_text
from .solver import SolverConfig, config_from_env

__version__ = "0.1.0"

__all__ = [
    "AnalysisKind", "Block", "BlockParseError", "ContractCheckError",
    "ContractModel", "EncodeError", "Finding", "ModelBuildError",
    "ReferenceResolutionError", "Report", "Severity", "SolverConfig",
    "SolverError", "analyze_document", "build_analyses", "build_model",
    "config_from_env", "count_executions", "model_from_document",
    "parse_contract", "parse_kinds", "parse_report", "resolve_references",
    "run_all", "run_static_checks", "serialize_contract", "to_json",
    "to_sequence_diagram", "to_text", "trigger_sets",
]
