"""Exception hierarchy for the contract analysis pipeline.

Every stage raises a subclass of :class:`ContractCheckError` so that the CLI
and the HTTP service can distinguish user errors (bad block files) from tool
errors (solver missing, unparsable output).
"""

from __future__ import annotations


class ContractCheckError(Exception):
    """Base class for all errors raised by this package."""


class BlockParseError(ContractCheckError):
    """Syntax or structural error in a block document.

    Carries enough context to point the user at the offending block and field.
    """

    def __init__(self, message: str, *, block_id: str | None = None,
                 field: str | None = None, position: int | None = None):
        self.block_id = block_id
        self.field = field
        self.position = position
        prefix = []
        if block_id:
            prefix.append(f"block {block_id}")
        if field:
            prefix.append(f"field {field}")
        if position is not None:
            prefix.append(f"position {position}")
        full = (": ".join([", ".join(prefix), message]) if prefix else message)
        super().__init__(full)
        self.message = message


class ReferenceResolutionError(ContractCheckError):
    """One or more `$` references could not be bound.

    ``problems`` is a list of human-readable messages, one per dangling or
    ambiguous reference, each naming the reference and the block it occurs in.
    """

    def __init__(self, problems: list[str]):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class ConstEvalError(ContractCheckError):
    """Constant folding failed (non-constant subexpression, inexact division)."""


class ModelBuildError(ContractCheckError):
    """The resolved blocks do not form a valid contract model."""


class EncodeError(ContractCheckError):
    """A claim or analysis could not be compiled into constraints."""


class SolverError(ContractCheckError):
    """External solver failed to start or produced unparsable output."""

    def __init__(self, message: str, raw_output: str = ""):
        self.raw_output = raw_output
        if raw_output:
            message = f"{message}\n--- solver output ---\n{raw_output}"
        super().__init__(message)
