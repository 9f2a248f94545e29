"""Errors raised while parsing or evaluating coefficient expressions."""


class ExpressionError(ValueError):
    """Base class for every expression failure."""


class ExpressionSyntaxError(ExpressionError):
    """The text is not a well-formed expression.

    ``offset`` is the UTF-8 byte offset of the offending token and
    ``expected`` describes what the parser was looking for.
    """

    def __init__(self, offset, expected, found=None):
        self.offset = offset
        self.expected = expected
        self.found = found
        message = f'syntax error at offset {offset}: expected {expected}'
        if found is not None:
            message += f', found {found!r}'
        super().__init__(message)


class UnknownIdentifierError(ExpressionSyntaxError):
    def __init__(self, offset, name, known):
        self.name = name
        super().__init__(offset, 'one of ' + ', '.join(sorted(known)), found=name)


class ArityError(ExpressionSyntaxError):
    def __init__(self, offset, name, arity, given):
        self.name = name
        self.arity = arity
        self.given = given
        plural = 's' if arity != 1 else ''
        super().__init__(offset, f'{arity} argument{plural} for {name}', found=f'{given} given')


class ExpressionDomainError(ExpressionError):
    """Evaluation left the real domain of an operator.

    ``node`` is the offending sub-expression.
    """

    def __init__(self, node, reason):
        self.node = node
        self.reason = reason
        super().__init__(f'{reason} in {node}')
