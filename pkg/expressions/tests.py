import math

import numpy as np
from django.test import SimpleTestCase

from . import (
    ArityError,
    ExpressionDomainError,
    ExpressionSyntaxError,
    UnknownIdentifierError,
    evaluate,
    parse,
)
from .nodes import Binary, Call, Number, Unary, Variable

# (text, (t, u, v), expected)
GOLDEN = [
    ('2+2*t', (3, 0, 0), 8.0),
    ('(t+5)/20', (15, 0, 0), 1.0),
    ('((t+5)+u-v)/20', (15, 2, 2), 1.0),
    ('pi', (0, 0, 0), math.pi),
    ('1', (0, 0, 0), 1.0),
    ('1.5e2', (0, 0, 0), 150.0),
    ('.25', (0, 0, 0), 0.25),
    ('3.', (0, 0, 0), 3.0),
    ('2E-3', (0, 0, 0), 0.002),
    ('-2^2', (0, 0, 0), -4.0),
    ('2^3^2', (0, 0, 0), 512.0),
    ('2^-1', (0, 0, 0), 0.5),
    ('(-2)^2', (0, 0, 0), 4.0),
    ('(-2)^3', (0, 0, 0), -8.0),
    ('--t', (4, 0, 0), 4.0),
    ('t-u-v', (10, 3, 2), 5.0),
    ('t/u/v', (12, 3, 2), 2.0),
    ('2*t^2', (3, 0, 0), 18.0),
    ('-t*u', (2, 3, 0), -6.0),
    ('1+t/10', (4, 0, 0), 1.4),
    ('2+t/5', (4, 0, 0), 2.8),
    ('2+t/10', (16, 0, 0), 3.6),
    ('1+t', (1, 0, 0), 2.0),
    ('sin(pi/2)', (0, 0, 0), 1.0),
    ('cos(0)', (0, 0, 0), 1.0),
    ('tan(0)', (0, 0, 0), 0.0),
    ('sqrt(16)', (0, 0, 0), 4.0),
    ('exp(0)', (0, 0, 0), 1.0),
    ('log(exp(2))', (0, 0, 0), 2.0),
    ('abs(-u)', (0, 3, 0), 3.0),
    ('atan2(1, 1)', (0, 0, 0), math.pi / 4),
    ('min(t, u)', (1, 2, 0), 1.0),
    ('max(t, u)', (1, 2, 0), 2.0),
    ('  t  *  ( u + v )  ', (2, 3, 4), 14.0),
    ('sqrt(u^2+v^2)', (0, 3, 4), 5.0),
    ('0^0', (0, 0, 0), 1.0),
]


class ParseAndEvaluateTest(SimpleTestCase):
    def test_golden_cases(self):
        """Every golden expression evaluates to its expected value"""
        for text, (t, u, v), expected in GOLDEN:
            with self.subTest(text=text):
                self.assertAlmostEqual(evaluate(parse(text), t, u, v), expected, places=12)

    def test_precedence_of_product_over_sum(self):
        """a+b*c parses as a+(b*c) for every choice of variables"""
        for a in 'tuv':
            for b in 'tuv':
                for c in 'tuv':
                    with self.subTest(a=a, b=b, c=c):
                        self.assertEqual(parse(f'{a}+{b}*{c}'), parse(f'{a}+({b}*{c})'))

    def test_power_is_right_associative(self):
        """2^3^2 groups to the right"""
        self.assertEqual(
            parse('2^3^2'),
            Binary('^', Number(2.0), Binary('^', Number(3.0), Number(2.0))),
        )

    def test_unary_minus_binds_looser_than_power(self):
        """-t^2 negates the square"""
        self.assertEqual(parse('-t^2'), Unary(Binary('^', Variable('t'), Number(2.0))))

    def test_call_node(self):
        """Function calls keep their argument tuple"""
        self.assertEqual(parse('atan2(u, v)'), Call('atan2', (Variable('u'), Variable('v'))))

    def test_pretty_print_round_trip(self):
        """Printing a tree and re-parsing gives the same tree"""
        for text, _, _ in GOLDEN:
            with self.subTest(text=text):
                tree = parse(text)
                self.assertEqual(parse(str(tree)), tree)

    def test_evaluation_is_deterministic(self):
        """Repeated evaluation is bit-identical"""
        expr = parse('sin(t)*exp(u)/(1+v^2)')
        first = evaluate(expr, 0.3, 0.7, 1.1)
        for _ in range(5):
            self.assertEqual(evaluate(expr, 0.3, 0.7, 1.1), first)

    def test_vectorized_evaluation(self):
        """Array arguments broadcast and match scalar evaluation"""
        expr = parse('((t+5)+u-v)/20')
        t = np.linspace(0, 16, 7)
        u = np.linspace(-3, 3, 7)
        values = evaluate(expr, t, u, 1.0)
        self.assertEqual(values.shape, (7,))
        for i in range(7):
            self.assertEqual(values[i], evaluate(expr, t[i], u[i], 1.0))

    def test_constant_expression_broadcasts(self):
        """A constant evaluated on arrays takes the broadcast shape"""
        values = evaluate(parse('2'), np.zeros((3, 4)), 0.0, 0.0)
        self.assertEqual(values.shape, (3, 4))
        self.assertTrue(np.all(values == 2.0))

    def test_callable_node(self):
        """Trees are directly callable as functions of (t, u, v)"""
        self.assertEqual(parse('t+u+v')(1, 2, 3), 6.0)

    def test_variables(self):
        """variables() reports the free variables"""
        self.assertEqual(parse('2+t/10').variables(), frozenset({'t'}))
        self.assertEqual(parse('(t+u-v)/20').variables(), frozenset({'t', 'u', 'v'}))
        self.assertEqual(parse('pi').variables(), frozenset())

    def test_bytes_input(self):
        """UTF-8 bytes are accepted"""
        self.assertEqual(evaluate(parse(b'1+t'), 1, 0, 0), 2.0)


class SyntaxErrorTest(SimpleTestCase):
    def test_unbalanced_call(self):
        """sin( fails at the end of input, offset 4"""
        with self.assertRaises(ExpressionSyntaxError) as ctx:
            parse('sin(')
        self.assertEqual(ctx.exception.offset, 4)

    def test_missing_close_paren(self):
        """An unclosed group reports the expected parenthesis"""
        with self.assertRaises(ExpressionSyntaxError) as ctx:
            parse('(t+1')
        self.assertEqual(ctx.exception.offset, 4)
        self.assertIn("')'", ctx.exception.expected)

    def test_trailing_operator(self):
        """A dangling operator is rejected"""
        with self.assertRaises(ExpressionSyntaxError) as ctx:
            parse('t+')
        self.assertEqual(ctx.exception.offset, 2)

    def test_juxtaposition(self):
        """Two operands without operator are rejected"""
        with self.assertRaises(ExpressionSyntaxError) as ctx:
            parse('2 t')
        self.assertEqual(ctx.exception.offset, 2)

    def test_offset_counts_bytes(self):
        """Offsets are UTF-8 byte offsets, not character indices"""
        with self.assertRaises(ExpressionSyntaxError) as ctx:
            parse('t+θ')
        self.assertEqual(ctx.exception.offset, 2)
        with self.assertRaises(ExpressionSyntaxError) as ctx:
            parse('\u00a0\u00a0t t')
        # two non-breaking spaces are whitespace of two bytes each
        self.assertEqual(ctx.exception.offset, 6)

    def test_unknown_identifier(self):
        """Identifiers outside t, u, v, pi and the functions are rejected"""
        with self.assertRaises(UnknownIdentifierError) as ctx:
            parse('t + x')
        self.assertEqual(ctx.exception.name, 'x')
        self.assertEqual(ctx.exception.offset, 4)

    def test_wrong_arity(self):
        """Calls must match the declared arity"""
        with self.assertRaises(ArityError):
            parse('sin(t, u)')
        with self.assertRaises(ArityError):
            parse('atan2(t)')

    def test_function_needs_call(self):
        """A bare function name is a syntax error"""
        with self.assertRaises(ExpressionSyntaxError):
            parse('sqrt + 1')

    def test_overflowing_literal(self):
        """Literals beyond double range are rejected"""
        with self.assertRaises(ExpressionSyntaxError):
            parse('1e999')

    def test_empty_input(self):
        """Empty text is a syntax error at offset 0"""
        with self.assertRaises(ExpressionSyntaxError) as ctx:
            parse('   ')
        self.assertEqual(ctx.exception.offset, 3)


class DomainErrorTest(SimpleTestCase):
    def test_sqrt_of_negative(self):
        """sqrt(-1) is a domain error naming the sub-expression"""
        with self.assertRaises(ExpressionDomainError) as ctx:
            evaluate(parse('1 + sqrt(-1)'), 0, 0, 0)
        self.assertEqual(ctx.exception.node, parse('sqrt(-1)'))

    def test_log_of_zero(self):
        """log(0) is a domain error"""
        with self.assertRaises(ExpressionDomainError):
            evaluate(parse('log(t)'), 0, 0, 0)

    def test_division_by_zero(self):
        """Division by zero is a domain error"""
        with self.assertRaises(ExpressionDomainError):
            evaluate(parse('1/(t-u)'), 2, 2, 0)

    def test_negative_base_fractional_exponent(self):
        """(-8)^(1/3) is a domain error rather than NaN"""
        with self.assertRaises(ExpressionDomainError):
            evaluate(parse('(-8)^(1/3)'), 0, 0, 0)

    def test_vectorized_domain_error(self):
        """One bad entry in an array argument raises"""
        with self.assertRaises(ExpressionDomainError):
            evaluate(parse('sqrt(t)'), np.array([1.0, -1.0]), 0.0, 0.0)
