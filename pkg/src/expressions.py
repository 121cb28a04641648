"""
Expressions module for the Painleve toolkit.
Parses the text syntax used on the command line and in JSON files:
integers, fractions, sqrt(d), generic parameters "@name", jet variables
"y", "y'", "y''" and the independent variable "t".
"""

from __future__ import annotations

import re
import logging
from tokenize import TokenError
from typing import Iterable

import sympy
from sympy.parsing.sympy_parser import auto_number, parse_expr

from .scalars import (
    GENERIC_PREFIX,
    ExactScalar,
    ScalarError,
    UnsupportedParameterField,
    generic_symbol,
)

logger = logging.getLogger(__name__)

T = sympy.Symbol('t')

_JET_PATTERN = re.compile(r"\b([A-Za-z_][A-Za-z0-9_]*)('+)")
_GENERIC_PATTERN = re.compile(re.escape(GENERIC_PREFIX) + r"([A-Za-z_][A-Za-z0-9_]*)")
_FLOAT_PATTERN = re.compile(r"(?<![\w@])(?:\d*\.\d+|\d+\.\d*|\d+[eE][+-]?\d)")
_RESERVED = {'t', 'sqrt'}


class ExpressionError(Exception):
    """Expression parsing error."""
    pass


def jet_symbol(name: str, order: int = 0) -> sympy.Symbol:
    """Symbol for the order-th derivative of the dependent variable ``name``."""
    return sympy.Symbol(name + "'" * order)


def _validate(expr: sympy.Expr, text: str) -> None:
    if expr.has(sympy.zoo, sympy.nan, sympy.oo, -sympy.oo):
        raise ExpressionError(f"Division by zero in '{text}'")
    if expr.has(sympy.I):
        raise UnsupportedParameterField(
            f"'{text}' has an imaginary part; only real surds are supported"
        )
    for node in sympy.preorder_traversal(expr):
        if isinstance(node, sympy.Float):
            raise ExpressionError(f"Floating-point literal in '{text}'")
        if isinstance(node, sympy.Pow):
            base, exponent = node.args
            if exponent.is_Integer:
                continue
            if exponent.is_Rational and exponent.q == 2 and base.is_Integer and base > 0:
                continue
            raise ExpressionError(f"Only integer powers and sqrt(integer) are allowed: '{text}'")
        elif isinstance(node, sympy.Function) or isinstance(node, sympy.Derivative):
            raise ExpressionError(f"Unsupported function {node.func} in '{text}'")


def parse_expression(text: str, variables: Iterable[str] = ()) -> sympy.Expr:
    """
    Parse an expression in the toolkit syntax.

    Args:
        text: Expression text, e.g. "-z - (@alpha + 1/2)/(z' + z^2 + t/2)"
        variables: Dependent variable names allowed (with any number of primes)

    Returns:
        sympy expression over jet symbols, t and generic symbols

    Raises:
        ExpressionError: On syntax errors, unknown names, floats, bad powers
        UnsupportedParameterField: On imaginary values
    """
    if not isinstance(text, str):
        raise ExpressionError(f"Expected expression text, got {type(text).__name__}")
    if _FLOAT_PATTERN.search(text):
        raise ExpressionError(f"Floating-point literal in '{text}'")

    allowed = set(variables)
    clash = allowed & _RESERVED
    if clash:
        raise ExpressionError(f"Reserved names cannot be variables: {sorted(clash)}")

    local_dict: dict[str, sympy.Basic] = {'t': T, 'sqrt': sympy.sqrt}
    for name in allowed:
        local_dict[name] = jet_symbol(name)

    def replace_jet(match: re.Match) -> str:
        name, primes = match.group(1), match.group(2)
        if name not in allowed:
            raise ExpressionError(f"Unknown variable '{name}' in '{text}'")
        placeholder = f"__jet_{name}_{len(primes)}"
        local_dict[placeholder] = jet_symbol(name, len(primes))
        return placeholder

    def replace_generic(match: re.Match) -> str:
        placeholder = f"__gen_{match.group(1)}"
        local_dict[placeholder] = generic_symbol(match.group(1))
        return placeholder

    source = _GENERIC_PATTERN.sub(replace_generic, text)
    source = _JET_PATTERN.sub(replace_jet, source)
    source = source.replace('^', '**')

    global_dict = {
        'Integer': sympy.Integer,
        'Rational': sympy.Rational,
        'Float': sympy.Float,
        'Symbol': sympy.Symbol,
        '__builtins__': {},
    }
    try:
        expr = parse_expr(
            source,
            local_dict=local_dict,
            global_dict=global_dict,
            transformations=(auto_number,),
            evaluate=True
        )
    except NameError as e:
        raise ExpressionError(f"Unknown name in '{text}': {e}")
    except (SyntaxError, TypeError, TokenError) as e:
        raise ExpressionError(f"Cannot parse '{text}': {e}")

    expr = sympy.sympify(expr)
    _validate(expr, text)
    return expr


def parse_scalar(text) -> ExactScalar:
    """
    Parse an exact scalar: "3", "-1/2", "1 + sqrt(2)", "@alpha + 1/2".

    Integers and Fractions pass through; floats are rejected.

    Raises:
        ExpressionError: On syntax errors or non-scalar content
        UnsupportedParameterField: On imaginary values
    """
    if isinstance(text, ExactScalar):
        return text
    if isinstance(text, bool) or isinstance(text, float):
        raise ExpressionError(f"{text!r} is not an exact scalar")
    if isinstance(text, int):
        return ExactScalar.rational(text)
    expr = parse_expression(str(text))
    try:
        return ExactScalar.from_sympy(expr)
    except UnsupportedParameterField:
        raise
    except ScalarError as e:
        raise ExpressionError(f"'{text}' is not an exact scalar: {e}")


def format_expression(expr: sympy.Expr) -> str:
    """Canonical text of an expression (sympy's string printer)."""
    return sympy.sstr(expr, order='grlex')
