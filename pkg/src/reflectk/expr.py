"""A small recursive-descent parser for scalar expressions.

Grammar::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := ('+' | '-') unary | power
    power  := atom (('^' | '**') unary)?
    atom   := INT | NAME | '(' expr ')'

Names are the registered indeterminates plus ``q``, which is sugar for
``-s^2``.  Exponents must evaluate to integer constants.
"""

from __future__ import annotations

import re
from fractions import Fraction

from reflectk.scalar import ALIASES, INDEX, ONE, Scalar

_TOKEN = re.compile(
    r"\s*(?:(?P<int>\d+)|(?P<name>[A-Za-z_Ͱ-Ͽ][A-Za-z_0-9Ͱ-Ͽ]*)"
    r"|(?P<op>\*\*|[-+*/^()]))"
)


class ExpressionError(ValueError):
    """Malformed expression; ``column`` is the 1-based position of the fault."""

    def __init__(self, message: str, column: int, text: str = ""):
        super().__init__(f"{message} at column {column}")
        self.column = column
        self.text = text


def _lookup(name: str, col: int, text: str) -> Scalar:
    if name == "q":
        return -Scalar.var("s") ** 2
    name = ALIASES.get(name, name)
    if name not in INDEX:
        raise ExpressionError(f"unknown name {name!r}", col, text)
    return Scalar.var(name)


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = []
        pos = 0
        stripped = text.rstrip()
        while pos < len(stripped):
            m = _TOKEN.match(stripped, pos)
            if not m or m.end() == pos:
                col = pos + 1 + (len(stripped[pos:]) - len(stripped[pos:].lstrip()))
                raise ExpressionError(f"unexpected character {stripped[col - 1]!r}", col, text)
            kind = m.lastgroup
            start = m.start(kind) + 1
            self.toks.append((kind, m.group(kind), start))
            pos = m.end()
        self.toks.append(("end", "", len(stripped) + 1))
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        kind, val, col = self.take()
        if val != value:
            what = "end of input" if kind == "end" else repr(val)
            raise ExpressionError(f"expected {value!r}, found {what}", col, self.text)

    def parse(self) -> Scalar:
        if self.peek()[0] == "end":
            raise ExpressionError("empty expression", 1, self.text)
        out = self.expr()
        kind, val, col = self.peek()
        if kind != "end":
            raise ExpressionError(f"unexpected {val!r}", col, self.text)
        return out

    def expr(self) -> Scalar:
        acc = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            rhs = self.term()
            acc = acc + rhs if op == "+" else acc - rhs
        return acc

    def term(self) -> Scalar:
        acc = self.unary()
        while self.peek()[1] in ("*", "/"):
            _, op, col = self.take()
            rhs = self.unary()
            if op == "*":
                acc = acc * rhs
            else:
                if rhs.is_zero():
                    raise ExpressionError("division by zero", col, self.text)
                acc = acc / rhs
        return acc

    def unary(self) -> Scalar:
        if self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            val = self.unary()
            return -val if op == "-" else val
        return self.power()

    def power(self) -> Scalar:
        base = self.atom()
        if self.peek()[1] in ("^", "**"):
            col = self.take()[2]
            exp = self.unary()
            if not exp.is_const() or exp.const_value().denominator != 1:
                raise ExpressionError("exponent must be an integer constant", col, self.text)
            e = int(exp.const_value())
            if e < 0 and base.is_zero():
                raise ExpressionError("division by zero", col, self.text)
            return base ** e
        return base

    def atom(self) -> Scalar:
        kind, val, col = self.take()
        if kind == "int":
            return Scalar.of(int(val))
        if kind == "name":
            return _lookup(val, col, self.text)
        if val == "(":
            inner = self.expr()
            self.expect(")")
            return inner
        what = "end of input" if kind == "end" else repr(val)
        raise ExpressionError(f"unexpected {what}", col, self.text)


def parse(text: str) -> Scalar:
    """Parse ``text`` into a :class:`Scalar`."""
    if not isinstance(text, str):
        raise TypeError("expression must be a string")
    return _Parser(text).parse()


def parse_value(text: str) -> Scalar:
    """Parse a binding value; accepts plain rationals such as ``3/2`` too."""
    try:
        return Scalar.of(Fraction(text.strip()))
    except (ValueError, ZeroDivisionError):
        return parse(text)


__all__ = ["ExpressionError", "parse", "parse_value", "ONE"]
