"""Constraint ASTs over integers, booleans and the ownership function.

These terms are what claims compile into.  They stay inside linear integer
arithmetic plus one uninterpreted function ``owner(object) = person`` over
finite entity sorts, so satisfiability is decidable.  Division is only
allowed by a nonzero constant.

The module also provides an independent evaluator used to replay solver
models against the emitted assertions (the soundness cross-check), and an
infix pretty-printer for diagnostics.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import EncodeError


# -- integer terms ----------------------------------------------------------

@dataclass(frozen=True)
class Const:
    value: int


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Add:
    left: "IntTerm"
    right: "IntTerm"


@dataclass(frozen=True)
class Sub:
    left: "IntTerm"
    right: "IntTerm"


@dataclass(frozen=True)
class Mul:
    """Linear multiplication: at least one factor must be constant."""

    left: "IntTerm"
    right: "IntTerm"


@dataclass(frozen=True)
class DivConst:
    """Integer division by a nonzero constant literal."""

    num: "IntTerm"
    divisor: int


@dataclass(frozen=True)
class IntIte:
    cond: "BoolTerm"
    then: "IntTerm"
    other: "IntTerm"


IntTerm = Const | Var | Add | Sub | Mul | DivConst | IntIte


# -- boolean terms ----------------------------------------------------------

@dataclass(frozen=True)
class TrueTerm:
    pass


@dataclass(frozen=True)
class FalseTerm:
    pass


@dataclass(frozen=True)
class Cmp:
    """Comparison with op in {"<=", "<", "="}."""

    op: str
    left: IntTerm
    right: IntTerm


@dataclass(frozen=True)
class And:
    items: tuple["BoolTerm", ...]


@dataclass(frozen=True)
class Or:
    items: tuple["BoolTerm", ...]


@dataclass(frozen=True)
class Not:
    item: "BoolTerm"


@dataclass(frozen=True)
class Implies:
    premise: "BoolTerm"
    conclusion: "BoolTerm"


@dataclass(frozen=True)
class OwnerEq:
    """owner(object) = person, both entity constants."""

    object_id: str
    person_id: str


@dataclass(frozen=True)
class Distinct:
    """Pairwise distinctness of entity constants of one sort."""

    sort: str  # "person" | "object"
    ids: tuple[str, ...]


BoolTerm = TrueTerm | FalseTerm | Cmp | And | Or | Not | Implies | OwnerEq | Distinct

TRUE = TrueTerm()
FALSE = FalseTerm()


def conj(items: list[BoolTerm]) -> BoolTerm:
    items = [t for t in items if not isinstance(t, TrueTerm)]
    if not items:
        return TRUE
    if len(items) == 1:
        return items[0]
    return And(tuple(items))


def disj(items: list[BoolTerm]) -> BoolTerm:
    items = [t for t in items if not isinstance(t, FalseTerm)]
    if not items:
        return FALSE
    if len(items) == 1:
        return items[0]
    return Or(tuple(items))


def le(a: IntTerm, b: IntTerm) -> Cmp:
    return Cmp("<=", a, b)


def lt(a: IntTerm, b: IntTerm) -> Cmp:
    return Cmp("<", a, b)


def eq(a: IntTerm, b: IntTerm) -> Cmp:
    return Cmp("=", a, b)


def ge(a: IntTerm, b: IntTerm) -> Cmp:
    return Cmp("<=", b, a)


def check_linear(term: IntTerm | BoolTerm) -> None:
    """Reject constructs outside the decidable fragment."""
    if isinstance(term, Mul):
        if not (_is_const(term.left) or _is_const(term.right)):
            raise EncodeError("nonlinear multiplication of two variables")
        check_linear(term.left)
        check_linear(term.right)
    elif isinstance(term, DivConst):
        if term.divisor == 0:
            raise EncodeError("division by zero")
        check_linear(term.num)
    elif isinstance(term, (Add, Sub)):
        check_linear(term.left)
        check_linear(term.right)
    elif isinstance(term, IntIte):
        check_linear(term.cond)
        check_linear(term.then)
        check_linear(term.other)
    elif isinstance(term, Cmp):
        check_linear(term.left)
        check_linear(term.right)
    elif isinstance(term, (And, Or)):
        for item in term.items:
            check_linear(item)
    elif isinstance(term, Not):
        check_linear(term.item)
    elif isinstance(term, Implies):
        check_linear(term.premise)
        check_linear(term.conclusion)


def _is_const(term: IntTerm) -> bool:
    return isinstance(term, Const)


def int_vars(term: IntTerm | BoolTerm) -> set[str]:
    """All integer variable names occurring in a term."""
    out: set[str] = set()

    def walk(t) -> None:
        if isinstance(t, Var):
            out.add(t.name)
        elif isinstance(t, (Add, Sub, Mul)):
            walk(t.left)
            walk(t.right)
        elif isinstance(t, DivConst):
            walk(t.num)
        elif isinstance(t, IntIte):
            walk(t.cond)
            walk(t.then)
            walk(t.other)
        elif isinstance(t, Cmp):
            walk(t.left)
            walk(t.right)
        elif isinstance(t, (And, Or)):
            for item in t.items:
                walk(item)
        elif isinstance(t, Not):
            walk(t.item)
        elif isinstance(t, Implies):
            walk(t.premise)
            walk(t.conclusion)

    walk(term)
    return out


def entity_refs(term: IntTerm | BoolTerm) -> tuple[set[str], set[str]]:
    """Objects and persons referenced through the owner function."""
    objects: set[str] = set()
    persons: set[str] = set()

    def walk(t) -> None:
        if isinstance(t, OwnerEq):
            objects.add(t.object_id)
            persons.add(t.person_id)
        elif isinstance(t, Distinct):
            (persons if t.sort == "person" else objects).update(t.ids)
        elif isinstance(t, (Add, Sub, Mul)):
            walk(t.left)
            walk(t.right)
        elif isinstance(t, DivConst):
            walk(t.num)
        elif isinstance(t, IntIte):
            walk(t.cond)
            walk(t.then)
            walk(t.other)
        elif isinstance(t, Cmp):
            walk(t.left)
            walk(t.right)
        elif isinstance(t, (And, Or)):
            for item in t.items:
                walk(item)
        elif isinstance(t, Not):
            walk(t.item)
        elif isinstance(t, Implies):
            walk(t.premise)
            walk(t.conclusion)

    walk(term)
    return objects, persons


class ReplayEnv:
    """Variable and ownership bindings extracted from a solver model.

    ``owner_raw`` and ``person_values`` hold the solver's opaque sort values
    so that equality can be decided even for entities the model left
    unconstrained.
    """

    def __init__(self, ints: dict[str, int],
                 owner_raw: dict[str, str] | None = None,
                 person_values: dict[str, str] | None = None,
                 object_values: dict[str, str] | None = None):
        self.ints = dict(ints)
        self.owner_raw = dict(owner_raw or {})
        self.person_values = dict(person_values or {})
        self.object_values = dict(object_values or {})

    def int_value(self, name: str) -> int:
        if name not in self.ints:
            raise EncodeError(f"model is missing a value for variable {name}")
        return self.ints[name]

    def owner_is(self, object_id: str, person_id: str) -> bool:
        owner = self.owner_raw.get(object_id)
        person = self.person_values.get(person_id, person_id)
        if owner is None:
            raise EncodeError(f"model is missing owner({object_id})")
        return owner == person

    def entity_value(self, sort: str, entity_id: str) -> str:
        table = self.person_values if sort == "person" else self.object_values
        return table.get(entity_id, entity_id)


def eval_int(term: IntTerm, env: ReplayEnv) -> int:
    if isinstance(term, Const):
        return term.value
    if isinstance(term, Var):
        return env.int_value(term.name)
    if isinstance(term, Add):
        return eval_int(term.left, env) + eval_int(term.right, env)
    if isinstance(term, Sub):
        return eval_int(term.left, env) - eval_int(term.right, env)
    if isinstance(term, Mul):
        return eval_int(term.left, env) * eval_int(term.right, env)
    if isinstance(term, DivConst):
        if term.divisor <= 0:
            raise EncodeError("divisor must be a positive literal")
        # SMT-LIB integer division with positive divisor is floor division
        return eval_int(term.num, env) // term.divisor
    if isinstance(term, IntIte):
        return eval_int(term.then if eval_bool(term.cond, env) else term.other, env)
    raise TypeError(f"not an integer term: {term!r}")


def eval_bool(term: BoolTerm, env: ReplayEnv) -> bool:
    if isinstance(term, TrueTerm):
        return True
    if isinstance(term, FalseTerm):
        return False
    if isinstance(term, Cmp):
        left = eval_int(term.left, env)
        right = eval_int(term.right, env)
        if term.op == "<=":
            return left <= right
        if term.op == "<":
            return left < right
        if term.op == "=":
            return left == right
        raise EncodeError(f"unknown comparison {term.op!r}")
    if isinstance(term, And):
        return all(eval_bool(item, env) for item in term.items)
    if isinstance(term, Or):
        return any(eval_bool(item, env) for item in term.items)
    if isinstance(term, Not):
        return not eval_bool(term.item, env)
    if isinstance(term, Implies):
        return (not eval_bool(term.premise, env)) or eval_bool(term.conclusion, env)
    if isinstance(term, OwnerEq):
        return env.owner_is(term.object_id, term.person_id)
    if isinstance(term, Distinct):
        values = [env.entity_value(term.sort, i) for i in term.ids]
        return len(values) == len(set(values))
    raise TypeError(f"not a boolean term: {term!r}")


def pretty(term: IntTerm | BoolTerm) -> str:
    """Human-readable infix rendering for reports and flag explanations."""
    if isinstance(term, Const):
        return str(term.value)
    if isinstance(term, Var):
        return term.name
    if isinstance(term, Add):
        return f"({pretty(term.left)} + {pretty(term.right)})"
    if isinstance(term, Sub):
        return f"({pretty(term.left)} - {pretty(term.right)})"
    if isinstance(term, Mul):
        return f"({pretty(term.left)} * {pretty(term.right)})"
    if isinstance(term, DivConst):
        return f"({pretty(term.num)} div {term.divisor})"
    if isinstance(term, IntIte):
        return f"ite({pretty(term.cond)}, {pretty(term.then)}, {pretty(term.other)})"
    if isinstance(term, TrueTerm):
        return "true"
    if isinstance(term, FalseTerm):
        return "false"
    if isinstance(term, Cmp):
        return f"{pretty(term.left)} {term.op} {pretty(term.right)}"
    if isinstance(term, And):
        return "(" + " and ".join(pretty(i) for i in term.items) + ")"
    if isinstance(term, Or):
        return "(" + " or ".join(pretty(i) for i in term.items) + ")"
    if isinstance(term, Not):
        return f"not {pretty(term.item)}"
    if isinstance(term, Implies):
        return f"({pretty(term.premise)} => {pretty(term.conclusion)})"
    if isinstance(term, OwnerEq):
        return f"owner({term.object_id}) = {term.person_id}"
    if isinstance(term, Distinct):
        return f"distinct({', '.join(term.ids)})"
    raise TypeError(f"not a term: {term!r}")
