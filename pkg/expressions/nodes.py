"""
Abstract syntax tree of the coefficient expression language.

Nodes are frozen dataclasses: immutable once parsed, structurally comparable
and safe to share between threads and worker processes. Evaluation is
numpy-vectorized; scalar inputs give a Python float back.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ExpressionDomainError

VARIABLES = ('t', 'u', 'v')
CONSTANTS = {'pi': np.pi}


class Node:
    """Common behaviour of all expression nodes."""

    def evaluate(self, env):
        raise NotImplementedError

    def variables(self):
        """Variables the expression depends on."""
        return frozenset()

    def __call__(self, t, u, v):
        return evaluate(self, t, u, v)


@dataclass(frozen=True)
class Number(Node):
    value: float

    def evaluate(self, env):
        return self.value

    def __str__(self):
        return repr(float(self.value))


@dataclass(frozen=True)
class Variable(Node):
    name: str

    def evaluate(self, env):
        return env[self.name]

    def variables(self):
        return frozenset({self.name})

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Constant(Node):
    name: str

    def evaluate(self, env):
        return CONSTANTS[self.name]

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Unary(Node):
    operand: Node

    def evaluate(self, env):
        return np.negative(self.operand.evaluate(env))

    def variables(self):
        return self.operand.variables()

    def __str__(self):
        return f'(-{self.operand})'


def _is_integral(x):
    return np.equal(np.floor(x), x)


@dataclass(frozen=True)
class Binary(Node):
    op: str
    left: Node
    right: Node

    def evaluate(self, env):
        a = self.left.evaluate(env)
        b = self.right.evaluate(env)
        if self.op == '+':
            return np.add(a, b)
        if self.op == '-':
            return np.subtract(a, b)
        if self.op == '*':
            return np.multiply(a, b)
        if self.op == '/':
            if np.any(np.equal(b, 0.0)):
                raise ExpressionDomainError(self, 'division by zero')
            return np.divide(a, b)
        # '^'
        if np.any(np.less(a, 0.0) & ~_is_integral(b)):
            raise ExpressionDomainError(self, 'negative base with non-integer exponent')
        if np.any(np.equal(a, 0.0) & np.less(b, 0.0)):
            raise ExpressionDomainError(self, 'zero raised to a negative power')
        return np.power(np.asarray(a, dtype=float), b)

    def variables(self):
        return self.left.variables() | self.right.variables()

    def __str__(self):
        return f'({self.left} {self.op} {self.right})'


def _sqrt(node, x):
    if np.any(np.less(x, 0.0)):
        raise ExpressionDomainError(node, 'square root of a negative number')
    return np.sqrt(x)


def _log(node, x):
    if np.any(np.less_equal(x, 0.0)):
        raise ExpressionDomainError(node, 'logarithm of a non-positive number')
    return np.log(x)


FUNCTIONS = {
    'sin': (1, lambda node, x: np.sin(x)),
    'cos': (1, lambda node, x: np.cos(x)),
    'tan': (1, lambda node, x: np.tan(x)),
    'sqrt': (1, _sqrt),
    'exp': (1, lambda node, x: np.exp(x)),
    'log': (1, _log),
    'abs': (1, lambda node, x: np.abs(x)),
    'atan2': (2, lambda node, y, x: np.arctan2(y, x)),
    'min': (2, lambda node, a, b: np.minimum(a, b)),
    'max': (2, lambda node, a, b: np.maximum(a, b)),
}


@dataclass(frozen=True)
class Call(Node):
    name: str
    args: tuple

    def evaluate(self, env):
        _, fn = FUNCTIONS[self.name]
        return fn(self, *(arg.evaluate(env) for arg in self.args))

    def variables(self):
        found = frozenset()
        for arg in self.args:
            found |= arg.variables()
        return found

    def __str__(self):
        return f'{self.name}({", ".join(str(arg) for arg in self.args)})'


def evaluate(expr, t, u, v):
    """Evaluate ``expr`` at (t, u, v).

    Arguments may be floats or broadcast-compatible numpy arrays. With scalar
    arguments the result is a float; otherwise an array of the broadcast
    shape.
    """
    scalar = np.ndim(t) == 0 and np.ndim(u) == 0 and np.ndim(v) == 0
    env = {'t': t, 'u': u, 'v': v}
    with np.errstate(over='ignore', invalid='ignore'):
        value = expr.evaluate(env)
    if scalar:
        return float(value)
    shape = np.broadcast_shapes(np.shape(t), np.shape(u), np.shape(v))
    return np.broadcast_to(np.asarray(value, dtype=float), shape)
