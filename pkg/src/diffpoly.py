"""
Diffpoly module for the Painleve toolkit.
Exact rational functions in t and jet variables (y, y', y'', ...) with total
differentiation and reduction modulo a second-order equation y'' = f(y, y', t).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Protocol, Sequence, Union

import sympy
from sympy.core.sorting import default_sort_key

from .expressions import T, jet_symbol, parse_expression
from .scalars import GENERIC_PREFIX, ExactScalar

logger = logging.getLogger(__name__)


class DiffPolyError(Exception):
    """Differential polynomial error."""
    pass


class DivisionByZeroFunction(DiffPolyError):
    """Raised when dividing by the zero rational function."""
    pass


class EvaluationError(DiffPolyError):
    """Raised when a point lies on the denominator's zero locus."""
    pass


@dataclass(frozen=True, order=True)
class Var:
    """Jet variable: ``name`` differentiated ``order`` times."""

    name: str
    order: int = 0

    def __post_init__(self):
        if self.order < 0:
            raise DiffPolyError(f"Negative derivative order for {self.name}")
        if not self.name.isidentifier() or self.name == 't':
            raise DiffPolyError(f"Invalid dependent variable name '{self.name}'")

    @property
    def symbol(self) -> sympy.Symbol:
        return jet_symbol(self.name, self.order)

    def derivative(self) -> Var:
        return Var(self.name, self.order + 1)

    @classmethod
    def from_symbol(cls, symbol: sympy.Symbol) -> Var:
        base = symbol.name.rstrip("'")
        return cls(base, len(symbol.name) - len(base))

    def __str__(self) -> str:
        return self.symbol.name


def is_parameter_symbol(symbol: sympy.Symbol) -> bool:
    return symbol.name.startswith(GENERIC_PREFIX)


def _has_surds(expr: sympy.Expr) -> bool:
    return any(
        p.exp.is_Rational and not p.exp.is_Integer
        for p in expr.atoms(sympy.Pow)
    )


def _generators(*exprs: sympy.Expr) -> list[sympy.Symbol]:
    symbols: set[sympy.Symbol] = set()
    for expr in exprs:
        symbols |= expr.free_symbols
    return sorted(symbols, key=default_sort_key)


def _normalize(expr: sympy.Expr) -> tuple[sympy.Expr, sympy.Expr]:
    """Reduced numerator/denominator pair with a grlex-monic denominator."""
    if expr.has(sympy.zoo, sympy.nan):
        raise DivisionByZeroFunction(f"Expression {expr} divides by zero")
    surds = _has_surds(expr)
    if surds:
        reduced = sympy.cancel(expr, extension=True)
    else:
        reduced = sympy.cancel(expr)
    numer, denom = sympy.fraction(sympy.together(reduced))
    numer, denom = sympy.expand(numer), sympy.expand(denom)
    if denom == 0:
        raise DivisionByZeroFunction(f"Expression {expr} has a zero denominator")
    if numer == 0:
        return sympy.Integer(0), sympy.Integer(1)
    gens = _generators(numer, denom)
    if gens:
        lead = sympy.Poly(denom, *gens).LC(order='grlex')
    else:
        lead = denom
    if lead != 1:
        factor = sympy.radsimp(1 / lead) if surds else 1 / lead
        numer = sympy.expand(numer * factor)
        denom = sympy.expand(denom * factor)
    return numer, denom


Coercible = Union['DiffRatFunc', ExactScalar, int, Fraction, sympy.Expr]


class DiffRatFunc:
    """
    Rational function over ExactScalar coefficients in t, jet variables and
    generic parameter symbols. Immutable; every instance is kept reduced.
    """

    __slots__ = ('numer', 'denom')

    def __init__(self, expr: sympy.Expr | int = 0):
        numer, denom = _normalize(sympy.sympify(expr))
        object.__setattr__(self, 'numer', numer)
        object.__setattr__(self, 'denom', denom)

    def __setattr__(self, name, value):
        raise AttributeError("DiffRatFunc is immutable")

    # -- constructors -------------------------------------------------------

    @classmethod
    def coerce(cls, value: Coercible) -> DiffRatFunc:
        if isinstance(value, DiffRatFunc):
            return value
        if isinstance(value, ExactScalar):
            return cls(value.to_sympy())
        if isinstance(value, Fraction):
            return cls(sympy.Rational(value.numerator, value.denominator))
        if isinstance(value, float):
            raise DiffPolyError(f"Floating-point value {value!r} is not exact")
        return cls(value)

    @classmethod
    def var(cls, name: str, order: int = 0) -> DiffRatFunc:
        return cls(Var(name, order).symbol)

    @classmethod
    def t(cls) -> DiffRatFunc:
        return cls(T)

    @classmethod
    def parse(cls, text: str, variables: Iterable[str] = ()) -> DiffRatFunc:
        return cls(parse_expression(text, variables))

    # -- inspection ---------------------------------------------------------

    def to_expr(self) -> sympy.Expr:
        return self.numer / self.denom

    @property
    def is_zero(self) -> bool:
        return self.numer == 0

    def variables(self) -> frozenset[Var]:
        """Jet variables occurring in the function."""
        return frozenset(
            Var.from_symbol(s)
            for s in self.numer.free_symbols | self.denom.free_symbols
            if s != T and not is_parameter_symbol(s)
        )

    def parameters(self) -> frozenset[str]:
        """Names of generic parameters occurring in the function."""
        return frozenset(
            s.name[len(GENERIC_PREFIX):]
            for s in self.numer.free_symbols | self.denom.free_symbols
            if is_parameter_symbol(s)
        )

    def max_order(self, name: str) -> int:
        """Highest derivative order of ``name`` present, -1 if absent."""
        orders = [v.order for v in self.variables() if v.name == name]
        return max(orders, default=-1)

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other: Coercible) -> DiffRatFunc:
        other = DiffRatFunc.coerce(other)
        return DiffRatFunc(
            (self.numer * other.denom + other.numer * self.denom) / (self.denom * other.denom)
        )

    __radd__ = __add__

    def __neg__(self) -> DiffRatFunc:
        return DiffRatFunc(-self.numer / self.denom)

    def __sub__(self, other: Coercible) -> DiffRatFunc:
        return self + (-DiffRatFunc.coerce(other))

    def __rsub__(self, other: Coercible) -> DiffRatFunc:
        return DiffRatFunc.coerce(other) - self

    def __mul__(self, other: Coercible) -> DiffRatFunc:
        other = DiffRatFunc.coerce(other)
        return DiffRatFunc((self.numer * other.numer) / (self.denom * other.denom))

    __rmul__ = __mul__

    def __truediv__(self, other: Coercible) -> DiffRatFunc:
        other = DiffRatFunc.coerce(other)
        if other.is_zero:
            raise DivisionByZeroFunction(f"Division of {self} by the zero function")
        return DiffRatFunc((self.numer * other.denom) / (self.denom * other.numer))

    def __rtruediv__(self, other: Coercible) -> DiffRatFunc:
        return DiffRatFunc.coerce(other) / self

    def __pow__(self, exponent: int) -> DiffRatFunc:
        if not isinstance(exponent, int):
            return NotImplemented
        if exponent < 0:
            if self.is_zero:
                raise DivisionByZeroFunction("Negative power of the zero function")
            return DiffRatFunc(self.denom ** -exponent / self.numer ** -exponent)
        return DiffRatFunc(self.numer ** exponent / self.denom ** exponent)

    def __eq__(self, other) -> bool:
        try:
            other = DiffRatFunc.coerce(other)
        except (DiffPolyError, sympy.SympifyError, TypeError):
            return NotImplemented
        return (self - other).is_zero

    __hash__ = None

    # -- substitution and evaluation ----------------------------------------

    def substitute(self, mapping: Mapping[Var | sympy.Symbol, Coercible]) -> DiffRatFunc:
        """Simultaneously replace variables by rational functions."""
        replacements = {}
        for key, value in mapping.items():
            symbol = key.symbol if isinstance(key, Var) else key
            replacements[symbol] = DiffRatFunc.coerce(value).to_expr()
        numer = self.numer.xreplace(replacements)
        denom = self.denom.xreplace(replacements)
        result = DiffRatFunc(numer / denom)
        return result

    def rename(self, old: str, new: str) -> DiffRatFunc:
        """Rename a dependent variable together with all its derivatives."""
        if old == new:
            return self
        mapping = {
            v.symbol: Var(new, v.order).symbol for v in self.variables() if v.name == old
        }
        return DiffRatFunc(self.numer.xreplace(mapping) / self.denom.xreplace(mapping))

    def evaluate(self, point: Mapping[Var | sympy.Symbol | str, Coercible]) -> sympy.Expr:
        """
        Exact value at a point; every free symbol must be assigned.

        Keys may be Var, sympy symbols, or the names 't' and '@param'.

        Raises:
            EvaluationError: If the denominator vanishes or a symbol is unassigned
        """
        replacements = {}
        for key, value in point.items():
            if isinstance(key, Var):
                symbol = key.symbol
            elif isinstance(key, str):
                symbol = sympy.Symbol(key)
            else:
                symbol = key
            replacements[symbol] = DiffRatFunc.coerce(value).to_expr()
        numer = sympy.expand(self.numer.xreplace(replacements))
        denom = sympy.expand(self.denom.xreplace(replacements))
        if numer.free_symbols or denom.free_symbols:
            missing = sorted(str(s) for s in numer.free_symbols | denom.free_symbols)
            raise EvaluationError(f"Unassigned symbols: {', '.join(missing)}")
        if denom == 0:
            raise EvaluationError(f"Denominator of {self} vanishes at the point")
        return sympy.radsimp(numer / denom)

    def compile(
        self,
        arguments: Sequence[Var | sympy.Symbol],
        modules: str = 'math'
    ) -> Callable:
        """
        Numeric callable of the function in the given argument order.

        Generic parameters must be substituted beforehand.
        """
        symbols = [a.symbol if isinstance(a, Var) else a for a in arguments]
        expr = self.to_expr()
        stray = expr.free_symbols - set(symbols)
        if stray:
            names = ', '.join(sorted(str(s) for s in stray))
            raise EvaluationError(f"Cannot compile {self}: unbound symbols {names}")
        # jet names such as "y'" are not Python identifiers
        plain = [sympy.Symbol(f"_arg{i}") for i in range(len(symbols))]
        expr = expr.xreplace(dict(zip(symbols, plain)))
        return sympy.lambdify(plain, expr, modules=modules)

    # -- formatting ---------------------------------------------------------

    def __str__(self) -> str:
        if self.denom == 1:
            return sympy.sstr(self.numer, order='grlex')
        return f"({sympy.sstr(self.numer, order='grlex')})/({sympy.sstr(self.denom, order='grlex')})"

    def __repr__(self) -> str:
        return f"DiffRatFunc({str(self)!r})"


def arith(a: Coercible, b: Coercible, op: str) -> DiffRatFunc:
    """Apply one of '+', '-', '*', '/' to two rational functions."""
    a, b = DiffRatFunc.coerce(a), DiffRatFunc.coerce(b)
    if op == '+':
        return a + b
    if op == '-':
        return a - b
    if op == '*':
        return a * b
    if op == '/':
        return a / b
    raise DiffPolyError(f"Unknown operator '{op}'")


def _total_derivative_expr(expr: sympy.Expr) -> sympy.Expr:
    result = sympy.diff(expr, T)
    for symbol in expr.free_symbols:
        if symbol == T or is_parameter_symbol(symbol):
            continue
        successor = Var.from_symbol(symbol).derivative().symbol
        result += sympy.diff(expr, symbol) * successor
    return result


def total_derivative(a: Coercible) -> DiffRatFunc:
    """
    d/dt of a rational function: each jet variable of order k contributes its
    order k+1 successor, dt/dt = 1, parameters are constants.
    """
    a = DiffRatFunc.coerce(a)
    numer_dot = _total_derivative_expr(a.numer)
    denom_dot = _total_derivative_expr(a.denom)
    return DiffRatFunc((numer_dot * a.denom - a.numer * denom_dot) / a.denom ** 2)


class SecondOrderEquation(Protocol):
    def rhs_in(self, name: str) -> DiffRatFunc: ...


def _rhs_for(eq: SecondOrderEquation | DiffRatFunc, var: Var) -> DiffRatFunc:
    if isinstance(eq, DiffRatFunc):
        return eq
    return eq.rhs_in(var.name)


def reduction_table(
    eq: SecondOrderEquation | DiffRatFunc,
    var: Var,
    max_order: int
) -> dict[int, DiffRatFunc]:
    """
    Replacements for orders 2..max_order of ``var`` on solutions of ``eq``,
    each expressed in var, var' and t only.
    """
    f = _rhs_for(eq, var)
    second = Var(var.name, 2)
    table: dict[int, DiffRatFunc] = {}
    if max_order < 2:
        return table
    table[2] = f
    for order in range(3, max_order + 1):
        derived = total_derivative(table[order - 1])
        table[order] = derived.substitute({second: f})
    return table


def reduce_mod_equation(
    a: Coercible,
    eq: SecondOrderEquation | DiffRatFunc,
    var: Var
) -> DiffRatFunc:
    """
    Rewrite ``a`` on the solutions of ``var'' = f`` so that only var, var' and
    t remain.

    Args:
        a: Rational function mentioning derivatives of var
        eq: Equation (anything with ``rhs_in``) or the right-hand side itself
        var: Dependent variable (order is ignored)

    Returns:
        Reduced rational function
    """
    a = DiffRatFunc.coerce(a)
    top = a.max_order(var.name)
    if top < 2:
        return a
    table = reduction_table(eq, var, top)
    logger.debug(f"Reducing order {top} occurrences of {var.name}")
    return a.substitute({Var(var.name, order): value for order, value in table.items()})
