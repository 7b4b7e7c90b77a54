"""SMT-LIB 2 emission and solver-output parsing.

Emission is deterministic: identical instances produce byte-identical text.
Persons and legal objects become constants of two uninterpreted sorts with
the ownership function ``owner : LegalObject -> Person``; every hard
assertion is named so unsatisfiability cores can be mapped back to blocks.
"""

from __future__ import annotations

from .encoder import AnalysisInstance
from .errors import EncodeError, SolverError
from .terms import (Add, And, Cmp, Const, Distinct, DivConst, FalseTerm,
                    Implies, IntIte, Mul, Not, Or, OwnerEq, Sub, TrueTerm, Var)

PERSON_SORT = "Person"
OBJECT_SORT = "LegalObject"


def render_term(term) -> str:
    if isinstance(term, Const):
        return str(term.value) if term.value >= 0 else f"(- {-term.value})"
    if isinstance(term, Var):
        return term.name
    if isinstance(term, Add):
        return f"(+ {render_term(term.left)} {render_term(term.right)})"
    if isinstance(term, Sub):
        return f"(- {render_term(term.left)} {render_term(term.right)})"
    if isinstance(term, Mul):
        return f"(* {render_term(term.left)} {render_term(term.right)})"
    if isinstance(term, DivConst):
        return f"(div {render_term(term.num)} {term.divisor})"
    if isinstance(term, IntIte):
        return (f"(ite {render_term(term.cond)} {render_term(term.then)} "
                f"{render_term(term.other)})")
    if isinstance(term, TrueTerm):
        return "true"
    if isinstance(term, FalseTerm):
        return "false"
    if isinstance(term, Cmp):
        op = {"<=": "<=", "<": "<", "=": "="}[term.op]
        return f"({op} {render_term(term.left)} {render_term(term.right)})"
    if isinstance(term, And):
        return "(and " + " ".join(render_term(i) for i in term.items) + ")"
    if isinstance(term, Or):
        return "(or " + " ".join(render_term(i) for i in term.items) + ")"
    if isinstance(term, Not):
        return f"(not {render_term(term.item)})"
    if isinstance(term, Implies):
        return f"(=> {render_term(term.premise)} {render_term(term.conclusion)})"
    if isinstance(term, OwnerEq):
        return f"(= (owner {term.object_id}) {term.person_id})"
    if isinstance(term, Distinct):
        return "(distinct " + " ".join(term.ids) + ")"
    raise TypeError(f"cannot render {term!r}")


def emit_smtlib(instance: AnalysisInstance, native_soft: bool = True) -> str:
    """Serialize one analysis instance to SMT-LIB 2 text ending in
    ``(check-sat)``.  Model and core queries are appended by the runner.

    With ``native_soft`` the solver's ``assert-soft`` extension carries the
    soft assertions; otherwise they are omitted (the iterative MaxSMT driver
    adds its own indicator encoding).
    """
    lines = [
        "(set-option :print-success false)",
        "(set-option :produce-models true)",
        "(set-option :produce-unsat-cores true)",
    ]
    int_vars = instance.int_vars()
    names = set(int_vars) | set(instance.persons) | set(instance.objects)
    if len(names) != len(int_vars) + len(instance.persons) + len(instance.objects):
        raise EncodeError("name collision between variables and entity constants")
    if instance.persons:
        lines.append(f"(declare-sort {PERSON_SORT} 0)")
        for p in instance.persons:
            lines.append(f"(declare-const {p} {PERSON_SORT})")
    if instance.objects:
        lines.append(f"(declare-sort {OBJECT_SORT} 0)")
        for o in instance.objects:
            lines.append(f"(declare-const {o} {OBJECT_SORT})")
        if instance.persons:
            lines.append(f"(declare-fun owner ({OBJECT_SORT}) {PERSON_SORT})")
    for v in int_vars:
        lines.append(f"(declare-const {v} Int)")
    seen: set[str] = set()
    for assertion in instance.assertions:
        if assertion.name in seen:
            raise EncodeError(f"duplicate assertion name {assertion.name}")
        seen.add(assertion.name)
        body = render_term(assertion.term)
        if assertion.soft:
            if native_soft:
                lines.append(f"(assert-soft {body} :weight {assertion.weight})")
        else:
            lines.append(f"(assert (! {body} :named {assertion.name}))")
    lines.append("(check-sat)")
    return "\n".join(lines) + "\n"


def model_queries(instance: AnalysisInstance) -> list[str]:
    """Terms to pass to ``get-value`` for a full model of the instance."""
    queries = list(instance.int_vars())
    queries.extend(instance.persons)
    queries.extend(instance.objects)
    if instance.objects and instance.persons:
        queries.extend(f"(owner {o})" for o in instance.objects)
    return queries


# -- s-expression parsing -----------------------------------------------------


def tokenize_sexpr(text: str) -> list[str]:
    tokens: list[str] = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch in "()":
            tokens.append(ch)
            i += 1
        elif ch.isspace():
            i += 1
        elif ch == "|":
            j = text.index("|", i + 1)
            tokens.append(text[i + 1:j])
            i = j + 1
        elif ch == '"':
            j = i + 1
            while j < len(text) and text[j] != '"':
                j += 1
            tokens.append(text[i:j + 1])
            i = j + 1
        elif ch == ";":
            while i < len(text) and text[i] != "\n":
                i += 1
        else:
            j = i
            while j < len(text) and not text[j].isspace() and text[j] not in "()":
                j += 1
            tokens.append(text[i:j])
            i = j
    return tokens


def parse_sexprs(text: str) -> list:
    """Parse a stream of s-expressions into nested lists of atoms."""
    tokens = tokenize_sexpr(text)
    out: list = []
    stack: list[list] = []
    for tok in tokens:
        if tok == "(":
            stack.append([])
        elif tok == ")":
            if not stack:
                raise SolverError("unbalanced parenthesis in solver output", text)
            done = stack.pop()
            if stack:
                stack[-1].append(done)
            else:
                out.append(done)
        else:
            if stack:
                stack[-1].append(tok)
            else:
                out.append(tok)
    if stack:
        raise SolverError("unterminated s-expression in solver output", text)
    return out


def sexpr_int(value) -> int:
    """Integer value from a parsed model entry (handles ``(- 1)``)."""
    if isinstance(value, list):
        if len(value) == 2 and value[0] == "-":
            return -sexpr_int(value[1])
        raise SolverError(f"expected an integer, got {value!r}")
    try:
        return int(value)
    except ValueError as exc:
        raise SolverError(f"expected an integer, got {value!r}") from exc
