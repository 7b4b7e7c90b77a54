"""Value expressions used on the right-hand side of block assignments.

The mini-language covers everything that appears in block files: integer and
string literals, date offsets (``+14``), infix arithmetic (``28+42``,
``((a-b)/100)*1000``), references (``$seller``, ``$Block1_spa.Closing``),
operation calls (``$shares.transfer($purchaser)``) and parenthesized
comparison formulas (``(Block6_count=Block6_amount)``).

Expressions are parsed into small immutable ASTs.  Reference tokens are kept
raw here; binding happens later in :mod:`contractcheck.references` once all
block ids are known.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import BlockParseError, ConstEvalError

IDENT_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*")

ARITH_OPS = ("+", "-", "*", "/")
CMP_OPS = ("<=", ">=", "=", "<", ">")


@dataclass(frozen=True)
class IntLiteral:
    value: int


@dataclass(frozen=True)
class StringLiteral:
    value: str


@dataclass(frozen=True)
class RelativeDate:
    """Leading-plus date offset, e.g. ``+14``; relative to an anchor date."""

    offset: int


@dataclass(frozen=True)
class Ref:
    """A `$` reference: ``token`` without the dollar sign, plus an optional
    attribute chain (``$spa.Closing`` -> token "spa", attrs ("Closing",)).

    Bare identifiers inside formulas and arithmetic (``Block6_count``) parse
    to the same node with ``sigil=False``; in string-valued positions a bare
    identifier is a name literal, not a reference.
    """

    token: str
    attrs: tuple[str, ...] = ()
    sigil: bool = True


@dataclass(frozen=True)
class ArithExpr:
    op: str  # one of + - * /
    left: "ValueExpr"
    right: "ValueExpr"


@dataclass(frozen=True)
class OpCall:
    """``receiver.method(arg, ...)`` — the only supported method is
    ``transfer`` (ownership transfer of the receiver object)."""

    receiver: Ref
    method: str
    args: tuple["ValueExpr", ...]


@dataclass(frozen=True)
class FormulaLiteral:
    """Parenthesized comparison, e.g. ``(Block6_count=Block6_amount)``."""

    op: str  # one of = <= >= < >
    left: "ValueExpr"
    right: "ValueExpr"


ValueExpr = (
    IntLiteral | StringLiteral | RelativeDate | Ref | ArithExpr | OpCall | FormulaLiteral
)


class _Scanner:
    """Tokenizer for the expression language."""

    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, message: str) -> BlockParseError:
        return BlockParseError(message, position=self.pos)

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos] in " \t":
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def eat(self, token: str) -> bool:
        self.skip_ws()
        if self.text.startswith(token, self.pos):
            self.pos += len(token)
            return True
        return False

    def expect(self, token: str) -> None:
        if not self.eat(token):
            raise self.error(f"expected {token!r}")

    def ident(self) -> str:
        self.skip_ws()
        m = IDENT_RE.match(self.text, self.pos)
        if not m:
            raise self.error("expected identifier")
        self.pos = m.end()
        return m.group(0)

    def integer(self) -> int:
        self.skip_ws()
        m = re.compile(r"\d+").match(self.text, self.pos)
        if not m:
            raise self.error("expected integer")
        self.pos = m.end()
        return int(m.group(0))

    def at_end(self) -> bool:
        self.skip_ws()
        return self.pos >= len(self.text)


def _parse_ref(s: _Scanner) -> Ref:
    # caller consumed "$"; stop the attribute chain before a method call,
    # which is handled by _maybe_opcall
    token = s.ident()
    attrs: list[str] = []
    while s.peek() == ".":
        save = s.pos
        s.eat(".")
        name = s.ident()
        if s.peek() == "(":
            s.pos = save
            break
        attrs.append(name)
    return Ref(token, tuple(attrs))


def _parse_atom(s: _Scanner) -> ValueExpr:
    ch = s.peek()
    if ch == "(":
        s.expect("(")
        inner = _parse_comparison(s)
        s.expect(")")
        return inner
    if ch == "$":
        s.eat("$")
        ref = _parse_ref(s)
        return _maybe_opcall(s, ref)
    if ch.isdigit():
        return IntLiteral(s.integer())
    # bare identifier: reference without the $ sigil (formula/arith context)
    ref = Ref(s.ident(), sigil=False)
    while s.peek() == ".":
        save = s.pos
        s.eat(".")
        name = s.ident()
        if s.peek() == "(":
            s.pos = save
            return _maybe_opcall(s, ref)
        ref = Ref(ref.token, ref.attrs + (name,), sigil=False)
    return _maybe_opcall(s, ref)


def _maybe_opcall(s: _Scanner, ref: Ref) -> ValueExpr:
    if s.peek() != ".":
        return ref
    save = s.pos
    s.eat(".")
    try:
        method = s.ident()
    except BlockParseError:
        s.pos = save
        return ref
    if s.peek() != "(":
        s.pos = save
        return ref
    s.expect("(")
    args: list[ValueExpr] = []
    if s.peek() != ")":
        while True:
            args.append(_parse_additive(s))
            if not s.eat(","):
                break
    s.expect(")")
    return OpCall(ref, method, tuple(args))


def _parse_multiplicative(s: _Scanner) -> ValueExpr:
    left = _parse_atom(s)
    while True:
        if s.eat("*"):
            left = ArithExpr("*", left, _parse_atom(s))
        elif s.eat("/"):
            left = ArithExpr("/", left, _parse_atom(s))
        else:
            return left


def _parse_additive(s: _Scanner) -> ValueExpr:
    left = _parse_multiplicative(s)
    while True:
        if s.eat("+"):
            left = ArithExpr("+", left, _parse_multiplicative(s))
        elif s.eat("-"):
            left = ArithExpr("-", left, _parse_multiplicative(s))
        else:
            return left


def _parse_comparison(s: _Scanner) -> ValueExpr:
    left = _parse_additive(s)
    for op in CMP_OPS:
        if s.eat(op):
            right = _parse_additive(s)
            return FormulaLiteral(op, left, right)
    return left


_BARE_STRING_RE = re.compile(r"[A-Za-z][A-Za-z0-9_ .\-]*$")


def parse_value(text: str) -> ValueExpr:
    """Parse one assignment right-hand side into a :data:`ValueExpr`.

    Disambiguation mirrors how block authors write values: a leading ``+`` is
    a relative date, a parse as expression wins when the whole string is
    consumed, and anything left over that looks like plain words is a string
    literal (names like ``Eva`` or ``Restitution Purchaser``).
    """
    text = text.strip()
    if not text:
        raise BlockParseError("empty value expression")
    if text.startswith("+"):
        rest = text[1:].strip()
        s = _Scanner(rest)
        value = _parse_additive(s)
        if not s.at_end():
            raise BlockParseError(f"trailing input in relative date {text!r}",
                                  position=s.pos)
        folded = eval_const(value)
        if folded < 0:
            raise BlockParseError(f"relative date offset must be non-negative: {text!r}")
        return RelativeDate(folded)
    s = _Scanner(text)
    try:
        value = _parse_comparison(s)
        if s.at_end():
            return value
    except BlockParseError:
        pass
    if _BARE_STRING_RE.match(text):
        return StringLiteral(text)
    raise BlockParseError(f"cannot parse value expression {text!r}")


def eval_const(expr: ValueExpr) -> int:
    """Evaluate an expression of literals and arithmetic to an exact integer.

    Division must be exact; references, dates and formulas are rejected.
    """
    if isinstance(expr, IntLiteral):
        return expr.value
    if isinstance(expr, ArithExpr):
        left = eval_const(expr.left)
        right = eval_const(expr.right)
        if expr.op == "+":
            return left + right
        if expr.op == "-":
            return left - right
        if expr.op == "*":
            return left * right
        if expr.op == "/":
            if right == 0:
                raise ConstEvalError(f"division by zero in {render_value(expr)}")
            if left % right != 0:
                raise ConstEvalError(
                    f"inexact integer division {left}/{right} in {render_value(expr)}")
            return left // right
        raise ConstEvalError(f"unknown operator {expr.op!r}")
    raise ConstEvalError(f"non-constant subexpression {render_value(expr)}")


def is_const(expr: ValueExpr) -> bool:
    try:
        eval_const(expr)
        return True
    except ConstEvalError:
        return False


def render_value(expr: ValueExpr) -> str:
    """Render an expression back to assignment syntax.

    Binary operations are always parenthesized, so rendering then re-parsing
    yields a structurally identical AST (round-trip property).
    """
    if isinstance(expr, IntLiteral):
        return str(expr.value)
    if isinstance(expr, StringLiteral):
        return expr.value
    if isinstance(expr, RelativeDate):
        return f"+{expr.offset}"
    if isinstance(expr, Ref):
        base = f"${expr.token}" if expr.sigil else expr.token
        return ".".join([base, *expr.attrs])
    if isinstance(expr, ArithExpr):
        return f"({render_value(expr.left)}{expr.op}{render_value(expr.right)})"
    if isinstance(expr, OpCall):
        args = ",".join(render_value(a) for a in expr.args)
        return f"{render_value(expr.receiver)}.{expr.method}({args})"
    if isinstance(expr, FormulaLiteral):
        return f"({render_value(expr.left)}{expr.op}{render_value(expr.right)})"
    raise TypeError(f"not a value expression: {expr!r}")


def iter_refs(expr: ValueExpr):
    """Yield every :class:`Ref` nested anywhere in ``expr``."""
    if isinstance(expr, Ref):
        yield expr
    elif isinstance(expr, ArithExpr):
        yield from iter_refs(expr.left)
        yield from iter_refs(expr.right)
    elif isinstance(expr, FormulaLiteral):
        yield from iter_refs(expr.left)
        yield from iter_refs(expr.right)
    elif isinstance(expr, OpCall):
        yield expr.receiver
        for arg in expr.args:
            yield from iter_refs(arg)
