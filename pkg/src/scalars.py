"""
Scalars module for the Painleve toolkit.
Exact arithmetic for equation parameters: rationals, rational combinations of
square roots of squarefree integers, and opaque generic symbols.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Union

import sympy
from sympy import factorint

logger = logging.getLogger(__name__)

GENERIC_PREFIX = '@'

Rationalish = Union[int, Fraction]


class ScalarError(Exception):
    """Scalar arithmetic error."""
    pass


class UnsupportedGenericProduct(ScalarError):
    """Raised when two factors both carry generic symbols."""
    pass


class NegativeRadicand(ScalarError):
    """Raised when a square root of a negative rational is requested."""
    pass


class UnsupportedParameterField(ScalarError):
    """Raised for parameters outside the real multi-quadratic field plus generics."""
    pass


class GenericValueError(ScalarError):
    """Raised when a concrete value is required but a generic symbol is present."""
    pass


@lru_cache(maxsize=4096)
def squarefree_decomposition(n: int) -> tuple[int, int]:
    """
    Split a positive integer as n = s^2 * d with d squarefree.

    Args:
        n: Positive integer

    Returns:
        Tuple (s, d)
    """
    if n <= 0:
        raise ValueError(f"squarefree decomposition needs a positive integer, got {n}")
    square, free = 1, 1
    for prime, exponent in factorint(n).items():
        square *= prime ** (exponent // 2)
        if exponent % 2:
            free *= prime
    return square, free


def _clean(terms: Mapping) -> tuple:
    return tuple(sorted((k, v) for k, v in terms.items() if v != 0))


@dataclass(frozen=True)
class ExactScalar:
    """
    Element of a real multi-quadratic extension of Q, optionally plus a
    rational linear combination of generic (mutually transcendental) symbols.

    ``surds`` maps squarefree radicand -> rational coefficient (radicand 1 is the
    rational part); ``generics`` maps symbol name -> rational coefficient.
    Both are stored as sorted tuples without zero entries.
    """

    surds: tuple[tuple[int, Fraction], ...] = ()
    generics: tuple[tuple[str, Fraction], ...] = ()

    # -- construction -------------------------------------------------------

    @classmethod
    def build(
        cls,
        surds: Mapping[int, Rationalish] | None = None,
        generics: Mapping[str, Rationalish] | None = None
    ) -> ExactScalar:
        """Build a normalized scalar from raw (possibly non-squarefree) terms."""
        reduced: dict[int, Fraction] = {}
        for radicand, coeff in (surds or {}).items():
            coeff = Fraction(coeff)
            if coeff == 0:
                continue
            if radicand < 0:
                raise UnsupportedParameterField(
                    f"sqrt({radicand}) is imaginary; only real surds are supported"
                )
            if radicand == 0:
                continue
            square, free = squarefree_decomposition(radicand)
            reduced[free] = reduced.get(free, Fraction(0)) + coeff * square
        gens: dict[str, Fraction] = {}
        for name, coeff in (generics or {}).items():
            gens[name] = gens.get(name, Fraction(0)) + Fraction(coeff)
        return cls(_clean(reduced), _clean(gens))

    @classmethod
    def rational(cls, value: Rationalish) -> ExactScalar:
        return cls.build({1: Fraction(value)})

    @classmethod
    def surd(cls, radicand: int, coeff: Rationalish = 1) -> ExactScalar:
        return cls.build({radicand: coeff})

    @classmethod
    def generic(cls, name: str) -> ExactScalar:
        name = name.lstrip(GENERIC_PREFIX)
        if not name:
            raise ScalarError("Generic symbol needs a name")
        return cls((), ((name, Fraction(1)),))

    @classmethod
    def coerce(cls, value) -> ExactScalar:
        """Accept ExactScalar, int or Fraction; reject floats."""
        if isinstance(value, ExactScalar):
            return value
        if isinstance(value, bool):
            raise ScalarError("Booleans are not scalars")
        if isinstance(value, (int, Fraction)):
            return cls.rational(value)
        if isinstance(value, float):
            raise ScalarError(f"Floating-point value {value!r} is not an exact scalar")
        raise ScalarError(f"Cannot convert {type(value).__name__} to ExactScalar")

    # -- inspection ---------------------------------------------------------

    @property
    def kind(self) -> str:
        """One of 'number', 'generic' or 'generic-combination'."""
        if not self.generics:
            return 'number'
        if not self.surds and len(self.generics) == 1 and self.generics[0][1] == 1:
            return 'generic'
        return 'generic-combination'

    @property
    def is_number(self) -> bool:
        return not self.generics

    @property
    def is_rational(self) -> bool:
        return not self.generics and all(d == 1 for d, _ in self.surds)

    @property
    def is_zero(self) -> bool:
        return not self.surds and not self.generics

    @property
    def rational_part(self) -> Fraction:
        return dict(self.surds).get(1, Fraction(0))

    def rational_value(self) -> Fraction:
        """Return the value as a Fraction; raises if surds or generics are present."""
        if not self.is_rational:
            raise ScalarError(f"{self} is not rational")
        return self.rational_part

    def number_part(self) -> ExactScalar:
        return ExactScalar(self.surds, ())

    def generic_symbols(self) -> frozenset[str]:
        return frozenset(name for name, _ in self.generics)

    def radicands(self) -> tuple[int, ...]:
        return tuple(d for d, _ in self.surds if d != 1)

    def to_float(self) -> float:
        """Float value; rationals are correctly rounded, surds evaluated at 30 digits first."""
        if self.generics:
            raise GenericValueError(f"{self} contains generic symbols")
        if self.is_rational:
            return float(self.rational_part)
        return float(sympy.N(self.to_sympy(), 30))

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other) -> ExactScalar:
        try:
            other = ExactScalar.coerce(other)
        except ScalarError:
            return NotImplemented
        surds = dict(self.surds)
        for d, q in other.surds:
            surds[d] = surds.get(d, Fraction(0)) + q
        gens = dict(self.generics)
        for name, q in other.generics:
            gens[name] = gens.get(name, Fraction(0)) + q
        return ExactScalar(_clean(surds), _clean(gens))

    __radd__ = __add__

    def __neg__(self) -> ExactScalar:
        return ExactScalar(
            tuple((d, -q) for d, q in self.surds),
            tuple((n, -q) for n, q in self.generics)
        )

    def __sub__(self, other) -> ExactScalar:
        try:
            other = ExactScalar.coerce(other)
        except ScalarError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> ExactScalar:
        return ExactScalar.coerce(other) - self

    def __mul__(self, other) -> ExactScalar:
        try:
            other = ExactScalar.coerce(other)
        except ScalarError:
            return NotImplemented
        if self.generics and other.generics:
            raise UnsupportedGenericProduct(
                f"Product of two generic expressions ({self}) * ({other})"
            )
        surds: dict[int, Fraction] = {}
        for d1, q1 in self.surds:
            for d2, q2 in other.surds:
                surds[d1 * d2] = surds.get(d1 * d2, Fraction(0)) + q1 * q2
        gens: dict[str, Fraction] = {}
        for number, combination in ((self, other), (other, self)):
            if not combination.generics:
                continue
            if not number.is_rational:
                raise UnsupportedGenericProduct(
                    f"Surd coefficient ({number}) on generic expression ({combination})"
                )
            factor = number.rational_part
            for name, q in combination.generics:
                gens[name] = q * factor
        return ExactScalar.build(surds, gens)

    __rmul__ = __mul__

    def _conjugate_at(self, prime: int) -> ExactScalar:
        return ExactScalar(
            tuple((d, -q if d % prime == 0 else q) for d, q in self.surds),
            ()
        )

    def inverse(self) -> ExactScalar:
        """Multiplicative inverse of a nonzero number, rationalized prime by prime."""
        if self.generics:
            raise UnsupportedGenericProduct(f"Cannot invert generic expression {self}")
        if self.is_zero:
            raise ZeroDivisionError("ExactScalar division by zero")
        numerator = ExactScalar.rational(1)
        denominator = self
        while True:
            primes = {p for d in denominator.radicands() for p in factorint(d)}
            if not primes:
                break
            conjugate = denominator._conjugate_at(min(primes))
            numerator = numerator * conjugate
            denominator = denominator * conjugate
        return numerator * ExactScalar.rational(1 / denominator.rational_part)

    def __truediv__(self, other) -> ExactScalar:
        try:
            other = ExactScalar.coerce(other)
        except ScalarError:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other) -> ExactScalar:
        return ExactScalar.coerce(other) * self.inverse()

    def __pow__(self, exponent: int) -> ExactScalar:
        if not isinstance(exponent, int):
            return NotImplemented
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result = ExactScalar.rational(1)
        for _ in range(exponent):
            result = result * self
        return result

    # -- conversions --------------------------------------------------------

    def to_sympy(self) -> sympy.Expr:
        expr = sympy.Integer(0)
        for radicand, coeff in self.surds:
            term = sympy.Rational(coeff.numerator, coeff.denominator)
            expr += term if radicand == 1 else term * sympy.sqrt(radicand)
        for name, coeff in self.generics:
            expr += sympy.Rational(coeff.numerator, coeff.denominator) * generic_symbol(name)
        return expr

    @classmethod
    def from_sympy(cls, expr: sympy.Expr) -> ExactScalar:
        """
        Convert a sympy expression built from rationals, sqrt of integers and
        generic symbols.

        Raises:
            UnsupportedParameterField: For imaginary values
            UnsupportedGenericProduct: For non-affine generic expressions
            ScalarError: For anything else
        """
        expr = sympy.sympify(expr)
        if expr.has(sympy.I):
            raise UnsupportedParameterField(f"Complex value {expr} is not supported")
        if isinstance(expr, sympy.Rational):
            return cls.rational(Fraction(int(expr.p), int(expr.q)))
        if isinstance(expr, sympy.Symbol):
            if expr.name.startswith(GENERIC_PREFIX):
                return cls.generic(expr.name)
            raise ScalarError(f"Variable {expr.name} is not allowed in a scalar")
        if isinstance(expr, sympy.Add):
            result = cls()
            for arg in expr.args:
                result = result + cls.from_sympy(arg)
            return result
        if isinstance(expr, sympy.Mul):
            result = cls.rational(1)
            for arg in expr.args:
                result = result * cls.from_sympy(arg)
            return result
        if isinstance(expr, sympy.Pow):
            base, exponent = expr.args
            if exponent.is_Integer:
                return cls.from_sympy(base) ** int(exponent)
            if exponent.is_Rational and exponent.q == 2 and base.is_Rational:
                root = sqrt_rational(Fraction(int(base.p), int(base.q)))
                return root ** int(exponent.p)
        raise ScalarError(f"Unsupported scalar expression: {expr}")

    # -- formatting ---------------------------------------------------------

    def __str__(self) -> str:
        parts: list[tuple[Fraction, str]] = []
        for radicand, coeff in self.surds:
            parts.append((coeff, '' if radicand == 1 else f"sqrt({radicand})"))
        for name, coeff in self.generics:
            parts.append((coeff, f"{GENERIC_PREFIX}{name}"))
        if not parts:
            return '0'
        text = ''
        for index, (coeff, atom) in enumerate(parts):
            sign = '-' if coeff < 0 else '+'
            magnitude = abs(coeff)
            if not atom:
                body = str(magnitude)
            elif magnitude == 1:
                body = atom
            else:
                body = f"{magnitude}*{atom}"
            if index == 0:
                text = f"-{body}" if sign == '-' else body
            else:
                text += f" {sign} {body}"
        return text

    def __repr__(self) -> str:
        return f"ExactScalar({str(self)!r})"


ZERO = ExactScalar()
ONE = ExactScalar.rational(1)
HALF = ExactScalar.rational(Fraction(1, 2))


def generic_symbol(name: str) -> sympy.Symbol:
    """sympy symbol standing for the generic parameter ``name``."""
    return sympy.Symbol(f"{GENERIC_PREFIX}{name.lstrip(GENERIC_PREFIX)}")


def add(a: ExactScalar, b: ExactScalar) -> ExactScalar:
    return ExactScalar.coerce(a) + b


def mul(a: ExactScalar, b: ExactScalar) -> ExactScalar:
    return ExactScalar.coerce(a) * b


def sqrt_rational(q: Rationalish) -> ExactScalar:
    """
    Exact principal square root of a non-negative rational.

    Args:
        q: Rational radicand

    Returns:
        (a/b) * sqrt(d) with d squarefree

    Raises:
        NegativeRadicand: If q < 0
    """
    q = Fraction(q)
    if q < 0:
        raise NegativeRadicand(f"sqrt({q}) is not real")
    if q == 0:
        return ZERO
    # sqrt(a/b) = sqrt(a*b) / b
    square, free = squarefree_decomposition(q.numerator * q.denominator)
    return ExactScalar.surd(free, Fraction(square, q.denominator))


def is_in_lattice(x: ExactScalar, offset: Rationalish, modulus: int) -> bool:
    """
    Test x in offset + modulus*Z.

    Generic content or a nonzero surd part always gives False.
    """
    if modulus <= 0:
        raise ValueError(f"modulus must be a positive integer, got {modulus}")
    x = ExactScalar.coerce(x)
    if not x.is_rational:
        return False
    return ((x.rational_part - Fraction(offset)) / modulus).denominator == 1


def is_integer(x: ExactScalar) -> bool:
    return is_in_lattice(x, 0, 1)


def mutually_generic(*values: ExactScalar) -> bool:
    """True when every value is a bare generic symbol and no symbol repeats."""
    names = []
    for value in values:
        if value.kind != 'generic':
            return False
        names.append(value.generics[0][0])
    return len(set(names)) == len(names)


def generic_names(values: Iterable[ExactScalar]) -> frozenset[str]:
    names: set[str] = set()
    for value in values:
        names |= value.generic_symbols()
    return frozenset(names)
