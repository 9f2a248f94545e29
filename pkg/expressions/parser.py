"""
Tokenizer and recursive-descent parser for coefficient expressions.

Grammar (whitespace-insensitive)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := primary ('^' unary)?
    primary:= NUMBER | NAME | NAME '(' expr (',' expr)* ')' | '(' expr ')'

``^`` binds tightest and is right-associative, so ``-2^2`` is ``-(2^2)`` and
``2^3^2`` is ``2^(3^2)``.
"""

import logging
import math
import re
from dataclasses import dataclass

from .errors import ArityError, ExpressionSyntaxError, UnknownIdentifierError
from .nodes import CONSTANTS, FUNCTIONS, VARIABLES, Binary, Call, Constant, Number, Unary, Variable

logger = logging.getLogger(__name__)

TOKEN_RE = re.compile(
    r'(?P<ws>\s+)'
    r'|(?P<number>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)'
    r'|(?P<name>[A-Za-z_][A-Za-z_0-9]*)'
    r'|(?P<op>[-+*/^(),])'
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    offset: int


def tokenize(text):
    """Split ``text`` into tokens carrying UTF-8 byte offsets."""
    tokens = []
    pos = 0
    byte_offset = 0
    while pos < len(text):
        match = TOKEN_RE.match(text, pos)
        if match is None:
            raise ExpressionSyntaxError(byte_offset, 'a number, name, operator or parenthesis', text[pos])
        kind = match.lastgroup
        chunk = match.group()
        if kind != 'ws':
            tokens.append(Token(kind, chunk, byte_offset))
        pos = match.end()
        byte_offset += len(chunk.encode('utf-8'))
    tokens.append(Token('end', '', byte_offset))
    return tokens


class Parser:
    def __init__(self, text):
        self.text = text
        self.tokens = tokenize(text)
        self.index = 0

    @property
    def current(self):
        return self.tokens[self.index]

    def advance(self):
        token = self.tokens[self.index]
        self.index += 1
        return token

    def accept(self, *ops):
        token = self.current
        if token.kind == 'op' and token.text in ops:
            self.index += 1
            return token
        return None

    def expect(self, op, expected):
        token = self.accept(op)
        if token is None:
            self.fail(expected)
        return token

    def fail(self, expected):
        token = self.current
        found = token.text if token.kind != 'end' else None
        raise ExpressionSyntaxError(token.offset, expected, found)

    def parse(self):
        node = self.expr()
        if self.current.kind != 'end':
            self.fail("an operator or end of input")
        return node

    def expr(self):
        node = self.term()
        while (token := self.accept('+', '-')) is not None:
            node = Binary(token.text, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while (token := self.accept('*', '/')) is not None:
            node = Binary(token.text, node, self.unary())
        return node

    def unary(self):
        if self.accept('-') is not None:
            return Unary(self.unary())
        return self.power()

    def power(self):
        base = self.primary()
        if self.accept('^') is not None:
            return Binary('^', base, self.unary())
        return base

    def primary(self):
        token = self.current
        if token.kind == 'number':
            self.advance()
            value = float(token.text)
            if math.isinf(value):
                raise ExpressionSyntaxError(token.offset, 'a finite number', token.text)
            return Number(value)
        if token.kind == 'name':
            self.advance()
            return self.name(token)
        if self.accept('(') is not None:
            node = self.expr()
            self.expect(')', "')'")
            return node
        self.fail('a number, variable, function call or (')

    def name(self, token):
        if token.text in FUNCTIONS:
            arity, _ = FUNCTIONS[token.text]
            self.expect('(', f"'(' after {token.text}")
            args = [self.expr()]
            while self.accept(',') is not None:
                args.append(self.expr())
            self.expect(')', "',' or ')'")
            if len(args) != arity:
                raise ArityError(token.offset, token.text, arity, len(args))
            return Call(token.text, tuple(args))
        if token.text in VARIABLES:
            return Variable(token.text)
        if token.text in CONSTANTS:
            return Constant(token.text)
        raise UnknownIdentifierError(token.offset, token.text, set(VARIABLES) | set(CONSTANTS) | set(FUNCTIONS))


def parse(text):
    """Parse ``text`` into an expression tree.

    Raises ``ExpressionSyntaxError`` (or one of its subclasses) with the byte
    offset of the offending token.
    """
    if isinstance(text, bytes):
        text = text.decode('utf-8')
    node = Parser(text).parse()
    logger.debug('parsed %r as %s', text, node)
    return node
