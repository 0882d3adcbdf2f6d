# portrait_engine/expression.py
"""
Recursive-descent parser for the command-line expression language.

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | factor
    factor := base ('^' uint)?
    base   := 'z' | 't' | uint | '(' expr ')'

Rationals are written as quotients ("3/4"); implicit multiplication is a
syntax error.
"""
import re
from dataclasses import dataclass
from typing import Optional, Union

import sympy
from sympy import Rational

from portrait_engine.errors import ExpressionError
from portrait_engine.exactalg import T, Z

MAX_EXPONENT = 1024
MAX_NESTING = 200
MAX_DIGITS = 4000
MAX_DEGREE = 4096
MAX_BITS = 1 << 20

_TOKEN_RE = re.compile(r"(?P<space>[ \t\r\n]+)|(?P<number>\d+)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^(),;])")
_SYMBOLS = {"z": Z, "t": T}


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int


@dataclass(frozen=True)
class Number:
    value: int


@dataclass(frozen=True)
class Variable:
    name: str
    line: int
    column: int


@dataclass(frozen=True)
class Negate:
    operand: object


@dataclass(frozen=True)
class BinaryOp:
    op: str
    left: object
    right: object
    line: int
    column: int


@dataclass(frozen=True)
class Power:
    base: object
    exponent: int


@dataclass(frozen=True)
class MapExpression:
    source: str
    syntax: object
    value: sympy.Expr

    def to_map(self):
        from portrait_engine.dynmap import map_from_expr

        return map_from_expr(self.value)


def tokenize(text: str) -> list:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        column = pos - line_start + 1
        if match is None:
            raise ExpressionError(f"unexpected character {text[pos]!r}", line, column)
        kind = match.lastgroup
        chunk = match.group(kind)
        if kind == "space":
            for offset, ch in enumerate(chunk):
                if ch == "\n":
                    line += 1
                    line_start = pos + offset + 1
        else:
            tokens.append(Token(kind, chunk, line, column))
        pos = match.end()
    column = pos - line_start + 1
    tokens.append(Token("end", "", line, column))
    return tokens


class _Parser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.pos = 0
        self.depth = 0

    @property
    def current(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        token = self.tokens[self.pos]
        if token.kind != "end":
            self.pos += 1
        return token

    def fail(self, message, token=None):
        token = token or self.current
        raise ExpressionError(message, token.line, token.column)

    def expect(self, text):
        if self.current.text != text or self.current.kind != "op":
            self.fail(f"expected {text!r}")
        return self.advance()

    def parse(self):
        node = self.expr()
        if self.current.kind != "end":
            self.fail(f"unexpected {self.current.text!r}")
        return node

    def expr(self):
        node = self.term()
        while self.current.kind == "op" and self.current.text in "+-":
            token = self.advance()
            node = BinaryOp(token.text, node, self.term(), token.line, token.column)
        return node

    def term(self):
        node = self.unary()
        while self.current.kind == "op" and self.current.text in "*/":
            token = self.advance()
            node = BinaryOp(token.text, node, self.unary(), token.line, token.column)
        return node

    def unary(self):
        if self.current.kind == "op" and self.current.text == "-":
            self.advance()
            self.enter()
            node = Negate(self.unary())
            self.depth -= 1
            return node
        return self.factor()

    def factor(self):
        node = self.base()
        if self.current.kind == "op" and self.current.text == "^":
            self.advance()
            token = self.current
            if token.kind != "number":
                self.fail("exponent must be a nonnegative integer")
            self.advance()
            if len(token.text) > 5 or int(token.text) > MAX_EXPONENT:
                self.fail(f"exponent larger than {MAX_EXPONENT}", token)
            node = Power(node, int(token.text))
        return node

    def base(self):
        token = self.current
        if token.kind == "number":
            if len(token.text) > MAX_DIGITS:
                self.fail("integer literal too long")
            self.advance()
            return Number(int(token.text))
        if token.kind == "name":
            self.advance()
            return Variable(token.text, token.line, token.column)
        if token.kind == "op" and token.text == "(":
            self.advance()
            self.enter()
            node = self.expr()
            self.expect(")")
            self.depth -= 1
            return node
        if token.kind == "end":
            self.fail("unexpected end of input")
        self.fail(f"unexpected {token.text!r}")

    def enter(self):
        self.depth += 1
        if self.depth > MAX_NESTING:
            self.fail("expression nested too deeply")


def _measure(node):
    """(degree bound, bit-size bound) of the expanded value."""
    if isinstance(node, Number):
        return 0, node.value.bit_length()
    if isinstance(node, Variable):
        return 1, 0
    if isinstance(node, Negate):
        return _measure(node.operand)
    if isinstance(node, Power):
        degree, bits = _measure(node.base)
        return degree * node.exponent, bits * node.exponent
    left, right = _measure(node.left), _measure(node.right)
    if node.op in "+-":
        return max(left[0], right[0]), max(left[1], right[1]) + 1
    return left[0] + right[0], left[1] + right[1]


def _check_size(syntax):
    degree, bits = _measure(syntax)
    if degree > MAX_DEGREE or bits > MAX_BITS:
        raise ExpressionError("expression too large to expand")


def _evaluate(node, allowed):
    if isinstance(node, Number):
        return sympy.Integer(node.value)
    if isinstance(node, Variable):
        if node.name not in allowed:
            raise ExpressionError(f"unknown variable {node.name!r}", node.line, node.column)
        return _SYMBOLS[node.name]
    if isinstance(node, Negate):
        return -_evaluate(node.operand, allowed)
    if isinstance(node, Power):
        return _evaluate(node.base, allowed) ** node.exponent
    left = _evaluate(node.left, allowed)
    right = _evaluate(node.right, allowed)
    if node.op == "+":
        return left + right
    if node.op == "-":
        return left - right
    if node.op == "*":
        return left * right
    if sympy.cancel(right) == 0:
        raise ExpressionError("division by the zero polynomial", node.line, node.column)
    return left / right


def _decode(text: Union[str, bytes]) -> str:
    if isinstance(text, bytes):
        try:
            return text.decode("utf-8")
        except UnicodeDecodeError as e:
            raise ExpressionError("input is not valid UTF-8", 1, e.start + 1) from e
    return text


def _parse(text, allowed) -> MapExpression:
    text = _decode(text)
    try:
        syntax = _Parser(tokenize(text)).parse()
        _check_size(syntax)
        value = sympy.cancel(_evaluate(syntax, set(allowed)))
    except RecursionError as e:
        raise ExpressionError("expression nested too deeply") from e
    return MapExpression(text, syntax, value)


def parse_expression(text, allowed=("z", "t")) -> sympy.Expr:
    return _parse(text, allowed).value


def parse_map_expression(text) -> MapExpression:
    return _parse(text, ("z", "t"))


def parse_polynomial_expression(text, allowed=("t",)) -> sympy.Expr:
    value = parse_expression(text, allowed)
    _, den = sympy.fraction(value)
    if not den.is_number:
        raise ExpressionError("expected a polynomial, got a rational function")
    return sympy.expand(value)


def parse_point_expression(text) -> Optional[sympy.Expr]:
    """A point of P^1(Q(t)); returns None for the point at infinity."""
    text = _decode(text)
    if text.strip().lower() in ("inf", "infinity"):
        return None
    return parse_expression(text, ("t",))


def parse_rational(text) -> Rational:
    value = parse_expression(text, ())
    return Rational(value)


def parse_rational_list(text) -> list:
    """ "0,1,-1/2" -> [0, 1, -1/2] """
    text = _decode(text)
    return [parse_rational(chunk) for chunk in text.split(",") if chunk.strip()]


_PORTRAIT_RE = re.compile(r"\s*\(\s*(\d+)\s*,\s*(\d+)\s*\)\s*$")


def parse_portrait(text):
    from portrait_engine.dynmap import Portrait

    text = _decode(text)
    match = _PORTRAIT_RE.match(text)
    if match is None:
        raise ExpressionError(f"expected a portrait like (m,n), got {text.strip()!r}")
    m, n = int(match.group(1)), int(match.group(2))
    if n < 1:
        raise ExpressionError("period must be at least 1")
    return Portrait(m, n)


def parse_portrait_list(text) -> list:
    text = _decode(text)
    return [parse_portrait(chunk) for chunk in text.split(";") if chunk.strip()]
