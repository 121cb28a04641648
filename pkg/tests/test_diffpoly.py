"""
Tests for diffpoly module.
"""

import math
import random
from fractions import Fraction

import pytest
import sympy

from src.diffpoly import (
    DiffPolyError,
    DiffRatFunc,
    DivisionByZeroFunction,
    EvaluationError,
    Var,
    arith,
    reduce_mod_equation,
    reduction_table,
    total_derivative,
)
from src.equations import Family, build
from src.expressions import T

Y, DY, D2Y, D3Y = (Var('y', k) for k in range(4))
A = sympy.Symbol('@a')


def parse(text: str) -> DiffRatFunc:
    return DiffRatFunc.parse(text, ('y', 'z'))


def random_polynomial(rng: random.Random, atoms: list, terms: int = 3) -> sympy.Expr:
    expr = sympy.Integer(0)
    for _ in range(rng.randint(1, terms)):
        monomial = sympy.Integer(rng.choice([-3, -2, -1, 1, 2, 3]))
        for _ in range(rng.randint(0, 2)):
            monomial *= rng.choice(atoms)
        expr += monomial
    return expr


def random_function(rng: random.Random, with_second: bool = False) -> DiffRatFunc:
    """Small rational function in y, y', t and @a, optionally with y''."""
    atoms = [Y.symbol, DY.symbol, T, A]
    if with_second:
        atoms.append(D2Y.symbol)
    numerator = random_polynomial(rng, atoms)
    if rng.random() < 0.3:
        denominator = 1 + rng.choice([Y.symbol, T, Y.symbol**2, DY.symbol])
        return DiffRatFunc(numerator / denominator)
    return DiffRatFunc(numerator)


def random_point(rng: random.Random) -> dict:
    def value():
        return Fraction(rng.randint(-20, 20), rng.randint(1, 7))
    return {Y: value(), DY: value(), 't': value(), '@a': value()}


@pytest.fixture(scope='module')
def p2_generic():
    return build(Family.II, {'alpha': '@a'})


class TestVar:
    """Tests for jet variables."""

    def test_symbol_names(self):
        """Test primes in symbol names."""
        assert Var('y', 2).symbol.name == "y''"
        assert Var.from_symbol(sympy.Symbol("z'")) == Var('z', 1)

    def test_derivative(self):
        """Test successor variable."""
        assert Var('y').derivative() == Var('y', 1)

    def test_invalid(self):
        """Test rejected names and orders."""
        with pytest.raises(DiffPolyError):
            Var('t')
        with pytest.raises(DiffPolyError):
            Var('y', -1)


class TestArith:
    """Tests for rational function arithmetic."""

    def test_product_cancels(self):
        """Test (y/t) * (t/y) = 1."""
        assert arith(parse('y/t'), parse('t/y'), '*') == 1

    def test_identity(self):
        """Test y' + 0 = y'."""
        assert arith(DiffRatFunc.var('y', 1), 0, '+') == DiffRatFunc.var('y', 1)

    def test_gcd_cancellation(self):
        """Test (y^2 - 1)/(y - 1) reduces to y + 1."""
        value = parse('(y^2 - 1)/(y - 1)')
        assert value.denom == 1
        assert str(value) == 'y + 1'

    def test_division_by_zero_function(self):
        """Test dividing by the zero function."""
        with pytest.raises(DivisionByZeroFunction):
            arith(parse('y'), 0, '/')
        with pytest.raises(DivisionByZeroFunction):
            parse('y') / (parse('y') - parse('y'))

    def test_unknown_operator(self):
        """Test operator validation."""
        with pytest.raises(DiffPolyError):
            arith(parse('y'), parse('y'), '%')

    def test_monic_denominator(self):
        """Test that equal functions get identical representations."""
        a = parse('(2*y)/(4*t + 2)')
        b = parse('y/(2*t + 1)')
        assert str(a) == str(b)
        assert a == b

    def test_immutable(self):
        """Test that instances cannot be modified."""
        value = parse('y')
        with pytest.raises(AttributeError):
            value.numer = sympy.Integer(1)

    def test_float_rejected(self):
        """Test that floats are not coerced."""
        with pytest.raises(DiffPolyError):
            DiffRatFunc.coerce(0.5)

    def test_inspection(self):
        """Test variables, parameters and derivative orders."""
        value = DiffRatFunc.parse("(y'' + @a*z)/(t + y)", ('y', 'z'))
        assert value.variables() == {Var('y', 2), Var('z'), Var('y')}
        assert value.parameters() == {'a'}
        assert value.max_order('y') == 2
        assert value.max_order('w') == -1


class TestTotalDerivative:
    """Tests for the total derivative."""

    def test_chain_rule(self):
        """Test d/dt y^2 = 2 y y'."""
        assert total_derivative(parse('y^2')) == parse("2*y*y'")

    def test_t(self):
        """Test dt/dt = 1."""
        assert total_derivative(DiffRatFunc.t()) == 1

    def test_parameters_are_constant(self):
        """Test d/dt @a = 0."""
        assert total_derivative(DiffRatFunc.parse('@a')).is_zero

    def test_t_plus_denominator(self):
        """Test d/dt (z' + z^2 + t/2) = z'' + 2 z z' + 1/2."""
        assert total_derivative(parse("z' + z^2 + t/2")) == parse("z'' + 2*z*z' + 1/2")

    def test_quotient(self):
        """Test d/dt (1/y) = -y'/y^2."""
        assert total_derivative(parse('1/y')) == parse("-y'/y^2")


class TestReduction:
    """Tests for reduction modulo an equation."""

    def test_second_derivative_p1(self):
        """Test y'' on P_I reduces to 6y^2 + t."""
        p1 = build(Family.I)
        assert reduce_mod_equation(parse("y''"), p1, Y) == parse('6*y^2 + t')

    def test_first_derivative_unchanged(self):
        """Test y' is already reduced."""
        p1 = build(Family.I)
        assert reduce_mod_equation(parse("y'"), p1, Y) == parse("y'")

    def test_third_derivative_p1(self):
        """Test y''' on P_I reduces to 12 y y' + 1."""
        p1 = build(Family.I)
        assert reduce_mod_equation(parse("y'''"), p1, Y) == parse("12*y*y' + 1")

    def test_renamed_variable(self):
        """Test reduction in the variable z."""
        p2 = build(Family.II, {'alpha': 0})
        assert reduce_mod_equation(parse("z''"), p2, Var('z')) == parse('2*z^3 + t*z')

    def test_rhs_as_equation(self):
        """Test that a right-hand side can stand in for the equation."""
        f = parse('6*y^2 + t')
        assert reduce_mod_equation(parse("y''"), f, Y) == f

    def test_reduction_table(self, p2_generic):
        """Test the table entries are free of second and higher derivatives."""
        table = reduction_table(p2_generic, Y, 4)
        assert sorted(table) == [2, 3, 4]
        for value in table.values():
            assert value.max_order('y') <= 1


class TestEvaluation:
    """Tests for exact evaluation and compilation."""

    def test_evaluate(self):
        """Test exact evaluation at a rational point."""
        value = parse("(y' + 1)/(t - y)")
        result = value.evaluate({Y: 1, DY: Fraction(1, 2), 't': 3})
        assert result == sympy.Rational(3, 4)

    def test_evaluate_pole(self):
        """Test a vanishing denominator."""
        with pytest.raises(EvaluationError):
            parse('1/(t - y)').evaluate({Y: 2, 't': 2})

    def test_evaluate_unassigned(self):
        """Test a missing coordinate."""
        with pytest.raises(EvaluationError):
            parse('y + t').evaluate({Y: 1})

    def test_compile(self):
        """Test numeric compilation of jet variables."""
        fn = parse("y'^2/y + t").compile([Y, DY, T])
        assert math.isclose(fn(2.0, 3.0, 0.5), 5.0)

    def test_compile_unbound(self):
        """Test that unbound parameters prevent compilation."""
        with pytest.raises(EvaluationError):
            DiffRatFunc.parse('@a*y', ('y',)).compile([Y, T])

    def test_substitute_simultaneous(self):
        """Test that substitution is simultaneous."""
        value = parse("y + y'")
        swapped = value.substitute({Y: DiffRatFunc.var('y', 1), DY: DiffRatFunc.var('y')})
        assert swapped == value

    def test_rename(self):
        """Test renaming a variable with its derivatives."""
        assert parse("y'' + y").rename('y', 'z') == parse("z'' + z")


class TestProperties:
    """Randomized identities of the differential field."""

    def test_leibniz(self):
        """Test D(ab) = D(a) b + a D(b)."""
        rng = random.Random(1)
        for _ in range(500):
            a, b = random_function(rng), random_function(rng)
            assert total_derivative(a * b) == total_derivative(a) * b + a * total_derivative(b)

    def test_linearity(self):
        """Test D(p a + q b) = p D(a) + q D(b) for rational p, q."""
        rng = random.Random(2)
        for _ in range(500):
            a, b = random_function(rng), random_function(rng)
            p = Fraction(rng.randint(-5, 5), rng.randint(1, 5))
            q = Fraction(rng.randint(-5, 5), rng.randint(1, 5))
            lhs = total_derivative(a * p + b * q)
            assert lhs == total_derivative(a) * p + total_derivative(b) * q

    def test_reduction_idempotent(self, p2_generic):
        """Test reduce(reduce(a)) = reduce(a)."""
        rng = random.Random(3)
        for _ in range(500):
            a = random_function(rng, with_second=True)
            once = reduce_mod_equation(a, p2_generic, Y)
            assert once.max_order('y') <= 1
            assert reduce_mod_equation(once, p2_generic, Y) == once

    def test_reduce_derive_commute(self, p2_generic):
        """Test reduce(D(reduce(a))) = reduce(D(a))."""
        rng = random.Random(4)
        for _ in range(500):
            a = random_function(rng, with_second=True)
            lhs = reduce_mod_equation(total_derivative(reduce_mod_equation(a, p2_generic, Y)), p2_generic, Y)
            rhs = reduce_mod_equation(total_derivative(a), p2_generic, Y)
            assert lhs == rhs

    def test_evaluation_consistency(self, p2_generic):
        """Test reduce(a)(p) = a(p with y'' -> f(p)) at random rational points."""
        rng = random.Random(5)
        checked = 0
        while checked < 100:
            a = random_function(rng, with_second=True)
            point = random_point(rng)
            try:
                f_value = p2_generic.f.evaluate(point)
                expected = a.evaluate({**point, D2Y: f_value})
                reduced = reduce_mod_equation(a, p2_generic, Y).evaluate(point)
            except EvaluationError:
                continue
            assert sympy.simplify(reduced - expected) == 0
            checked += 1
