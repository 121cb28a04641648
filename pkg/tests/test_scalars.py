"""
Tests for scalars module.
"""

import random
from fractions import Fraction

import pytest
import sympy

from src.scalars import (
    HALF,
    ONE,
    ZERO,
    ExactScalar,
    GenericValueError,
    NegativeRadicand,
    ScalarError,
    UnsupportedGenericProduct,
    UnsupportedParameterField,
    is_in_lattice,
    is_integer,
    mutually_generic,
    sqrt_rational,
    squarefree_decomposition,
)
from src.expressions import parse_scalar


def random_number(rng: random.Random) -> ExactScalar:
    """Random element of Q(sqrt 2, sqrt 3)."""
    value = ExactScalar.rational(Fraction(rng.randint(-9, 9), rng.randint(1, 6)))
    for radicand in (2, 3, 6):
        if rng.random() < 0.5:
            value = value + ExactScalar.surd(radicand, Fraction(rng.randint(-5, 5), rng.randint(1, 4)))
    return value


class TestSquarefree:
    """Tests for squarefree decomposition."""

    def test_decomposition(self):
        """Test n = s^2 * d with d squarefree."""
        assert squarefree_decomposition(1) == (1, 1)
        assert squarefree_decomposition(12) == (2, 3)
        assert squarefree_decomposition(72) == (6, 2)
        assert squarefree_decomposition(49) == (7, 1)

    def test_rejects_non_positive(self):
        """Test that zero and negatives are rejected."""
        with pytest.raises(ValueError):
            squarefree_decomposition(0)


class TestConstruction:
    """Tests for building exact scalars."""

    def test_surd_is_normalized(self):
        """Test that sqrt(8) is stored as 2*sqrt(2)."""
        assert ExactScalar.surd(8) == ExactScalar.surd(2, 2)
        assert str(ExactScalar.surd(8)) == '2*sqrt(2)'

    def test_square_radicand_is_rational(self):
        """Test that sqrt(9) collapses to 3."""
        assert ExactScalar.surd(9) == ExactScalar.rational(3)
        assert ExactScalar.surd(9).is_rational

    def test_negative_radicand_unsupported(self):
        """Test that imaginary surds are refused."""
        with pytest.raises(UnsupportedParameterField):
            ExactScalar.surd(-2)

    def test_coerce_rejects_float(self):
        """Test that floats never become exact scalars."""
        with pytest.raises(ScalarError):
            ExactScalar.coerce(0.5)
        with pytest.raises(ScalarError):
            ExactScalar.coerce(True)

    def test_generic_strips_prefix(self):
        """Test that '@a' and 'a' name the same generic."""
        assert ExactScalar.generic('@a') == ExactScalar.generic('a')
        assert str(ExactScalar.generic('a')) == '@a'

    def test_kind(self):
        """Test scalar kinds."""
        a = ExactScalar.generic('a')
        assert ONE.kind == 'number'
        assert a.kind == 'generic'
        assert (a + 1).kind == 'generic-combination'
        assert (2 * a).kind == 'generic-combination'


class TestArithmetic:
    """Tests for field arithmetic."""

    def test_half_plus_half(self):
        """Test rational addition."""
        assert HALF + HALF == ONE

    def test_surd_product(self):
        """Test sqrt(2)*sqrt(3) = sqrt(6) and sqrt(2)^2 = 2."""
        assert ExactScalar.surd(2) * ExactScalar.surd(3) == ExactScalar.surd(6)
        assert ExactScalar.surd(2) ** 2 == ExactScalar.rational(2)

    def test_inverse_rationalizes(self):
        """Test 1/(1 + sqrt(2)) = sqrt(2) - 1."""
        value = ONE / (ONE + ExactScalar.surd(2))
        assert value == ExactScalar.surd(2) - 1

    def test_generic_cancellation(self):
        """Test that @a - @a is exactly zero."""
        a = ExactScalar.generic('a')
        assert (a - a).is_zero
        assert (a + 3 - a) == ExactScalar.rational(3)

    def test_generic_times_rational(self):
        """Test scaling a generic combination by a rational."""
        a = ExactScalar.generic('a')
        assert str((a + 1) * HALF) == '1/2 + 1/2*@a'

    def test_generic_product_refused(self):
        """Test that generic * generic is refused."""
        a, b = ExactScalar.generic('a'), ExactScalar.generic('b')
        with pytest.raises(UnsupportedGenericProduct):
            a * b

    def test_surd_times_generic_refused(self):
        """Test that a surd coefficient on a generic is refused."""
        with pytest.raises(UnsupportedGenericProduct):
            ExactScalar.surd(2) * ExactScalar.generic('a')

    def test_division_by_zero(self):
        """Test division by zero."""
        with pytest.raises(ZeroDivisionError):
            ONE / ZERO

    def test_negative_power(self):
        """Test integer powers with negative exponent."""
        assert ExactScalar.rational(2) ** -2 == ExactScalar.rational(Fraction(1, 4))

    def test_field_axioms_random(self):
        """Test distributivity and inverses on random multi-quadratic numbers."""
        rng = random.Random(7)
        for _ in range(200):
            x, y, z = random_number(rng), random_number(rng), random_number(rng)
            assert x * (y + z) == x * y + x * z
            assert (x + y) - y == x
            if not x.is_zero:
                assert x * x.inverse() == ONE

    def test_sympy_round_trip_random(self):
        """Test that conversion to sympy and back preserves the value."""
        rng = random.Random(11)
        a = ExactScalar.generic('a')
        for _ in range(100):
            x = random_number(rng) + Fraction(rng.randint(-3, 3)) * a
            assert ExactScalar.from_sympy(x.to_sympy()) == x
            assert parse_scalar(str(x)) == x


class TestValues:
    """Tests for numeric values and lattice tests."""

    def test_to_float(self):
        """Test float conversion of rationals and surds."""
        assert HALF.to_float() == 0.5
        assert abs(ExactScalar.surd(2).to_float() - 2 ** 0.5) < 1e-15

    def test_to_float_generic(self):
        """Test that generics have no float value."""
        with pytest.raises(GenericValueError):
            ExactScalar.generic('a').to_float()

    def test_sqrt_rational(self):
        """Test exact square roots of rationals."""
        assert sqrt_rational(Fraction(1, 4)) == HALF
        assert sqrt_rational(Fraction(1, 2)) == ExactScalar.surd(2, Fraction(1, 2))
        assert sqrt_rational(0) == ZERO
        with pytest.raises(NegativeRadicand):
            sqrt_rational(-1)

    def test_lattice_membership(self):
        """Test x in offset + modulus*Z."""
        assert is_in_lattice(ExactScalar.rational(Fraction(3, 2)), Fraction(1, 2), 1)
        assert not is_in_lattice(ExactScalar.rational(1), Fraction(1, 2), 1)
        assert is_in_lattice(ExactScalar.rational(-4), 0, 2)
        assert not is_in_lattice(ExactScalar.generic('a'), 0, 1)
        assert not is_integer(ExactScalar.surd(2))

    def test_mutually_generic(self):
        """Test mutual genericity of bare distinct generics."""
        a, b = ExactScalar.generic('a'), ExactScalar.generic('b')
        assert mutually_generic(a, b)
        assert not mutually_generic(a, a)
        assert not mutually_generic(a, b + 1)
        assert not mutually_generic(a, HALF)

    def test_to_sympy(self):
        """Test sympy conversion."""
        value = HALF + ExactScalar.surd(3)
        assert sympy.simplify(value.to_sympy() - (sympy.Rational(1, 2) + sympy.sqrt(3))) == 0
