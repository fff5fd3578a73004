"""Pratt parser for the infix expression grammar.

Binding powers: ``+ -`` 10, ``* /`` 20, unary minus 25, ``^`` 30 (right
associative).  ``**`` is accepted as a synonym for ``^``.
"""

from __future__ import annotations

import math
import re
from typing import Mapping

from .nodes import (
    ALIASES,
    FUNCTIONS,
    VARIABLES,
    Expr,
    ExprError,
    Function,
    Num,
    Var,
    add,
    call,
    div,
    mul,
    neg,
    power,
    sub,
)


class ParseError(ExprError, ValueError):
    def __init__(self, message: str, text: str, offset: int):
        self.text = text
        self.offset = offset
        super().__init__(f"{message} at offset {offset}: {text!r}")


class UnknownIdentifier(ParseError):
    pass


class ArityError(ParseError):
    pass


_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>\*\*|[-+*/^(),])
    """,
    re.VERBOSE,
)

_CONSTANTS = {"pi": math.pi, "e": math.e}

_BINARY = {"+": 10, "-": 10, "*": 20, "/": 20, "^": 30, "**": 30}
_UNARY_BP = 25


def _tokenize(text: str):
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", text, pos)
        kind = m.lastgroup
        if kind != "ws":
            out.append((kind, m.group(), pos))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str, functions: Mapping[str, Function]):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0
        self.functions = functions

    def peek(self):
        return self.toks[self.i]

    def next(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, value: str):
        kind, v, pos = self.next()
        if v != value:
            found = "end of input" if kind == "end" else repr(v)
            raise ParseError(f"expected {value!r}, found {found}", self.text, pos)

    def parse(self) -> Expr:
        e = self.expr(0)
        kind, v, pos = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected {v!r}", self.text, pos)
        return e

    def expr(self, min_bp: int) -> Expr:
        left = self.prefix()
        while True:
            kind, op, pos = self.peek()
            if kind != "op" or op not in _BINARY:
                break
            bp = _BINARY[op]
            if bp < min_bp:
                break
            self.next()
            if op in ("^", "**"):
                # right associative; the exponent may carry a unary minus
                right = self.expr(bp)
                left = power(left, right)
            else:
                right = self.expr(bp + 1)
                left = self._binary(op, left, right, pos)
        return left

    def _binary(self, op, a, b, pos):
        if op == "+":
            return add(a, b)
        if op == "-":
            return sub(a, b)
        if op == "*":
            return mul(a, b)
        try:
            return div(a, b)
        except ZeroDivisionError:
            raise ParseError("division by zero", self.text, pos) from None

    def prefix(self) -> Expr:
        kind, v, pos = self.next()
        if kind == "num":
            if re.fullmatch(r"\d+", v):
                return Num(int(v))
            return Num(float(v))
        if kind == "op" and v == "-":
            return neg(self.expr(_UNARY_BP))
        if kind == "op" and v == "+":
            return self.expr(_UNARY_BP)
        if kind == "op" and v == "(":
            e = self.expr(0)
            self.expect(")")
            return e
        if kind == "name":
            return self.name(v, pos)
        found = "end of input" if kind == "end" else repr(v)
        raise ParseError(f"unexpected {found}", self.text, pos)

    def name(self, ident: str, pos: int) -> Expr:
        nxt = self.peek()
        is_call = nxt[0] == "op" and nxt[1] == "("
        fname = ALIASES.get(ident, ident)
        func = self.functions.get(fname)
        if func is not None:
            if not is_call:
                raise ArityError(f"function {ident!r} needs one argument", self.text, pos)
            self.next()
            args = [] if self.peek()[1] == ")" else [self.expr(0)]
            while self.peek()[1] == ",":
                self.next()
                args.append(self.expr(0))
            self.expect(")")
            if len(args) != 1:
                raise ArityError(
                    f"function {ident!r} takes 1 argument, got {len(args)}", self.text, pos
                )
            return call(func, args[0])
        if is_call:
            raise UnknownIdentifier(f"unknown function {ident!r}", self.text, pos)
        if ident in VARIABLES:
            return Var(ident)
        if ident in _CONSTANTS:
            return Num(_CONSTANTS[ident])
        raise UnknownIdentifier(f"unknown identifier {ident!r}", self.text, pos)


def parse(text: str, functions: Mapping[str, Function] | None = None) -> Expr:
    """Parse infix text into an expression.

    `functions` adds user functions (for instance tabulated solutions of a
    linear ODE) to the built-in ones.
    """
    table = dict(FUNCTIONS)
    if functions:
        table.update(functions)
    return _Parser(text, table).parse()
