from .errors import (
    ArityError,
    ExpressionDomainError,
    ExpressionError,
    ExpressionSyntaxError,
    UnknownIdentifierError,
)
from .nodes import Node as Expr
from .nodes import evaluate
from .parser import parse

__all__ = [
    'ArityError',
    'Expr',
    'ExpressionDomainError',
    'ExpressionError',
    'ExpressionSyntaxError',
    'UnknownIdentifierError',
    'evaluate',
    'parse',
]
