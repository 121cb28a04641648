"""
Equations module for the Painleve toolkit.
Templates of the Painleve families in their reduced forms (2-parameter P_III,
P_V with delta = -1/2, Hamiltonian system for P_VI) and the v-decompositions of
the P_IV / P_V parameters.
"""

from __future__ import annotations

import json
import re
import logging
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Mapping

import sympy

from .diffpoly import DiffRatFunc, Var
from .expressions import T, jet_symbol, parse_scalar
from .scalars import (
    GENERIC_PREFIX,
    ONE,
    ExactScalar,
    UnsupportedParameterField,
    generic_symbol,
    sqrt_rational,
)

logger = logging.getLogger(__name__)

__all__ = [
    'ArityMismatch',
    'ConstraintViolation',
    'EquationError',
    'Family',
    'PainleveEquation',
    'ParamDecomposition',
    'UnsupportedFamily',
    'UnsupportedParameterField',
    'build',
    'decompositions',
    'equation_from_spec',
    'equation_to_spec',
    'load_equation_spec',
]


class EquationError(Exception):
    """Equation construction error."""
    pass


class ArityMismatch(EquationError):
    """Raised when parameters do not match the family."""
    pass


class ConstraintViolation(EquationError):
    """Raised when the P_VI parameter constraint fails."""
    pass


class UnsupportedFamily(EquationError):
    """Raised for families or forms that are not supported by an operation."""
    pass


class Family(str, Enum):
    I = 'I'
    II = 'II'
    III2p = 'III2p'
    IV = 'IV'
    V3p = 'V3p'
    VI = 'VI'

    @classmethod
    def parse(cls, name: str | Family) -> Family:
        """
        Resolve a family name.

        Raises:
            UnsupportedFamily: For unknown names and the 4-parameter P_III / P_V forms
        """
        if isinstance(name, Family):
            return name
        text = str(name).strip()
        if text in ('VI-hamiltonian', 'VI_hamiltonian'):
            return cls.VI
        if text == 'III':
            raise UnsupportedFamily(
                "The 4-parameter P_III is not supported; use the 2-parameter form 'III2p'"
            )
        if text == 'V':
            raise UnsupportedFamily(
                "The 4-parameter P_V is not supported; use the delta = -1/2 form 'V3p'"
            )
        try:
            return cls(text)
        except ValueError:
            valid = ', '.join(f.value for f in cls)
            raise UnsupportedFamily(f"Unknown family '{text}' (expected one of {valid})")


PARAMETER_NAMES: dict[Family, tuple[str, ...]] = {
    Family.I: (),
    Family.II: ('alpha',),
    Family.III2p: ('v1', 'v2'),
    Family.IV: ('alpha', 'beta'),
    Family.V3p: ('alpha', 'beta', 'gamma'),
    Family.VI: ('alpha0', 'alpha1', 'alpha2', 'alpha3', 'alpha4'),
}

SINGULAR_TIMES: dict[Family, tuple[int, ...]] = {
    Family.I: (),
    Family.II: (),
    Family.III2p: (0,),
    Family.IV: (),
    Family.V3p: (0,),
    Family.VI: (0, 1),
}

DEPENDENT = 'y'
CONJUGATE = 'x'


def _template(family: Family, p: Mapping[str, sympy.Expr]) -> tuple[sympy.Expr, ...]:
    """Right-hand sides as sympy expressions in y, y' (or y, x) and t."""
    y = jet_symbol(DEPENDENT)
    dy = jet_symbol(DEPENDENT, 1)
    t = T
    half = sympy.Rational(1, 2)

    if family is Family.I:
        return (6 * y**2 + t,)
    if family is Family.II:
        return (2 * y**3 + t * y + p['alpha'],)
    if family is Family.III2p:
        return (
            dy**2 / y - dy / t + 4 / t * (p['v1'] + 1 - p['v2'] * y**2) + 4 * y**3 - 4 / y,
        )
    if family is Family.IV:
        return (
            dy**2 / (2 * y) + sympy.Rational(3, 2) * y**3 + 4 * t * y**2
            + 2 * (t**2 - p['alpha']) * y + p['beta'] / y,
        )
    if family is Family.V3p:
        return (
            (1 / (2 * y) + 1 / (y - 1)) * dy**2 - dy / t
            + (y - 1)**2 / t**2 * (p['alpha'] * y + p['beta'] / y)
            + p['gamma'] * y / t - half * y * (y + 1) / (y - 1),
        )
    # Hamiltonian system for P_VI in (y, x)
    x = jet_symbol(CONJUGATE)
    a0, a1, a2, a3, a4 = (p[name] for name in PARAMETER_NAMES[Family.VI])
    scale = 1 / (t * (t - 1))
    fy = scale * (
        2 * x * y * (y - 1) * (y - t)
        - (a4 * (y - 1) * (y - t) + a3 * y * (y - t) + (a0 - 1) * y * (y - 1))
    )
    fx = scale * (
        -x**2 * (3 * y**2 - 2 * (1 + t) * y + t)
        + x * (2 * (a0 + a3 + a4 - 1) * y - a4 * (1 + t) - a3 * t - a0 + 1)
        - a2 * (a1 + a2)
    )
    return (fy, fx)


def _instantiate(family: Family, params: tuple[tuple[str, ExactScalar], ...]) -> tuple[DiffRatFunc, ...]:
    values = {name: value.to_sympy() for name, value in params}
    return tuple(DiffRatFunc(expr) for expr in _template(family, values))


@dataclass(frozen=True, eq=False)
class PainleveEquation:
    """
    A member of a Painleve family with exact parameters.

    For the scalar families ``rhs`` holds f in y'' = f(y, y', t); for VI it holds
    the pair (y', x') of the Hamiltonian system in y, x and t.
    """

    family: Family
    params: tuple[tuple[str, ExactScalar], ...]
    rhs: tuple[DiffRatFunc, ...] = field(repr=False)

    def __post_init__(self):
        names = tuple(name for name, _ in self.params)
        if names != PARAMETER_NAMES[self.family]:
            raise ArityMismatch(
                f"{self.family.value} expects parameters {PARAMETER_NAMES[self.family]}, got {names}"
            )
        if self.family is Family.VI:
            _check_vi_constraint(dict(self.params))
        expected = _instantiate(self.family, self.params)
        if len(expected) != len(self.rhs) or any(a != b for a, b in zip(expected, self.rhs)):
            raise EquationError(f"Right-hand side does not match the {self.family.value} template")

    def __eq__(self, other) -> bool:
        if not isinstance(other, PainleveEquation):
            return NotImplemented
        return self.family is other.family and self.params == other.params

    def __hash__(self) -> int:
        return hash((self.family, self.params))

    @property
    def is_system(self) -> bool:
        return self.family is Family.VI

    @property
    def param_dict(self) -> dict[str, ExactScalar]:
        return dict(self.params)

    def param(self, name: str) -> ExactScalar:
        return self.param_dict[name]

    @property
    def singular_times(self) -> tuple[int, ...]:
        return SINGULAR_TIMES[self.family]

    @property
    def f(self) -> DiffRatFunc:
        """Right-hand side of y'' = f(y, y', t)."""
        if self.is_system:
            raise UnsupportedFamily("VI is a first-order system; it has no scalar right-hand side")
        return self.rhs[0]

    def rhs_in(self, name: str) -> DiffRatFunc:
        """Right-hand side with the dependent variable renamed to ``name``."""
        return self.f.rename(DEPENDENT, name)

    def state_variables(self) -> tuple[Var, Var]:
        """The two state components integrated numerically."""
        if self.is_system:
            return (Var(DEPENDENT), Var(CONJUGATE))
        return (Var(DEPENDENT), Var(DEPENDENT, 1))

    def generic_parameters(self) -> frozenset[str]:
        names: set[str] = set()
        for _, value in self.params:
            names |= value.generic_symbols()
        return frozenset(names)

    def numeric_params(self) -> dict[str, float]:
        """
        Parameters as floats.

        Raises:
            GenericValueError: If any parameter carries a generic symbol
        """
        return {name: value.to_float() for name, value in self.params}

    def __str__(self) -> str:
        if not self.params:
            return self.family.value
        inner = ', '.join(f"{name}={value}" for name, value in self.params)
        return f"{self.family.value}({inner})"


def _check_vi_constraint(values: Mapping[str, ExactScalar]) -> None:
    total = (
        values['alpha0'] + values['alpha1'] + 2 * values['alpha2']
        + values['alpha3'] + values['alpha4']
    )
    if total != ONE:
        raise ConstraintViolation(
            f"alpha0 + alpha1 + 2*alpha2 + alpha3 + alpha4 = {total}, expected 1"
        )


def normalize_params(family: Family | str, params: Mapping[str, Any] | tuple | list) -> tuple[tuple[str, ExactScalar], ...]:
    """
    Convert user parameters to the canonical ordered tuple.

    Accepts a mapping by name or a positional sequence. For VI, alpha2 may be
    omitted and is then derived from the sum constraint.

    Raises:
        ArityMismatch: On missing, extra or unknown parameters
        ConstraintViolation: If the VI sum constraint fails
    """
    family = Family.parse(family)
    names = PARAMETER_NAMES[family]

    if isinstance(params, Mapping):
        given = {key: parse_scalar(value) for key, value in params.items()}
    else:
        values = list(params)
        if family is Family.VI and len(values) == 4:
            values = values[:2] + [None] + values[2:]
        if len(values) != len(names):
            raise ArityMismatch(f"{family.value} takes {len(names)} parameters, got {len(values)}")
        given = {name: parse_scalar(value) for name, value in zip(names, values) if value is not None}

    unknown = set(given) - set(names)
    if unknown:
        raise ArityMismatch(f"Unknown parameters for {family.value}: {sorted(unknown)}")

    if family is Family.VI and 'alpha2' not in given:
        rest = [name for name in names if name != 'alpha2']
        missing = [name for name in rest if name not in given]
        if missing:
            raise ArityMismatch(f"Missing parameters for VI: {missing}")
        given['alpha2'] = (ONE - sum((given[n] for n in rest), ExactScalar())) / 2
        logger.debug(f"Derived alpha2 = {given['alpha2']} from the VI constraint")

    missing = [name for name in names if name not in given]
    if missing:
        raise ArityMismatch(f"Missing parameters for {family.value}: {missing}")

    ordered = tuple((name, given[name]) for name in names)
    if family is Family.VI:
        _check_vi_constraint(dict(ordered))
    return ordered


def build(family: Family | str, params: Mapping[str, Any] | tuple | list = ()) -> PainleveEquation:
    """
    Instantiate a family template.

    Args:
        family: Family tag or name
        params: Parameters by name or position (exact scalars or their text)

    Returns:
        PainleveEquation

    Raises:
        UnsupportedFamily: For unknown or unsupported family names
        ArityMismatch: If the parameters do not match the family
        ConstraintViolation: If the VI sum constraint fails
    """
    family = Family.parse(family)
    ordered = normalize_params(family, params)
    return PainleveEquation(family, ordered, _instantiate(family, ordered))


def equation_from_spec(spec: Mapping[str, Any]) -> PainleveEquation:
    """Build an equation from {"family": ..., "params": {...}}."""
    if not isinstance(spec, Mapping) or 'family' not in spec:
        raise EquationError("Equation spec must be an object with a 'family' field")
    params = spec.get('params', {})
    if not isinstance(params, (Mapping, list)):
        raise EquationError("Equation spec 'params' must be an object or a list")
    return build(spec['family'], params)


def equation_to_spec(eq: PainleveEquation) -> dict[str, Any]:
    return {
        'family': eq.family.value,
        'params': {name: str(value) for name, value in eq.params},
    }


def load_equation_spec(path: str | Path) -> PainleveEquation:
    """
    Load an equation spec from a JSON file.

    Raises:
        EquationError: If the file cannot be read or parsed
    """
    path = Path(path)
    try:
        with open(path, 'r') as f:
            spec = json.load(f)
    except FileNotFoundError:
        raise EquationError(f"Equation spec not found: {path}")
    except json.JSONDecodeError as e:
        raise EquationError(f"Invalid JSON in {path}: {e}")
    return equation_from_spec(spec)


# -- parameter decompositions ---------------------------------------------------


@dataclass(frozen=True)
class ParamDecomposition:
    """
    Values v_i summing to zero that realize (alpha, beta[, gamma]).

    When a radicand carries generic symbols its square root is represented by
    a root marker (a generic named ``sqrt(<radicand>)``) and ``symbolic`` is set.
    """

    family: Family
    v: tuple[ExactScalar, ...]
    sign_choice: tuple[int, ...]
    symbolic: bool = False
    roots: tuple[tuple[str, ExactScalar], ...] = ()

    def __post_init__(self):
        if sum(self.v, ExactScalar()) != ExactScalar():
            raise EquationError(f"Decomposition {self.v} does not sum to zero")

    def difference(self, i: int, j: int) -> ExactScalar:
        """v_i - v_j with 1-based indices."""
        return self.v[i - 1] - self.v[j - 1]

    def pairwise_differences(self) -> dict[tuple[int, int], ExactScalar]:
        n = len(self.v)
        return {
            (i, j): self.difference(i, j)
            for i in range(1, n + 1) for j in range(i + 1, n + 1)
        }

    def reconstruct(self) -> tuple[ExactScalar, ...]:
        """Parameters recomputed from v by the forward formulas."""
        v = [value.to_sympy() for value in self.v]
        if self.family is Family.IV:
            v1, v2, v3 = v
            exprs = [3 * v3 + 1, -2 * (v2 - v1)**2]
        else:
            v1, v2, v3, v4 = v
            exprs = [
                sympy.Rational(1, 2) * (v3 - v4)**2,
                -sympy.Rational(1, 2) * (v2 - v1)**2,
                2 * v1 + 2 * v2 - 1,
            ]
        squares = {
            generic_symbol(marker)**2: radicand.to_sympy() for marker, radicand in self.roots
        }
        result = []
        for expr in exprs:
            expr = sympy.expand(sympy.expand(expr).subs(squares))
            result.append(ExactScalar.from_sympy(expr))
        return tuple(result)

    def __str__(self) -> str:
        values = ', '.join(str(value) for value in self.v)
        signs = ''.join('+' if s > 0 else '-' for s in self.sign_choice)
        return f"v=({values}) [{signs}]"


def _marker_name(radicand: ExactScalar) -> str:
    """Generic name standing for sqrt(radicand), e.g. sqrt_m_1_2_b for sqrt(-1/2*@b)."""
    text = str(radicand).replace('-', ' m ').replace('+', ' p ').replace(GENERIC_PREFIX, '')
    return 'sqrt_' + re.sub(r'\W+', '_', text).strip('_')


def _root(radicand: ExactScalar, label: str) -> tuple[ExactScalar, tuple[tuple[str, ExactScalar], ...]]:
    """Principal square root of a radicand, or a root marker for generic radicands."""
    if radicand.generic_symbols():
        marker = _marker_name(radicand)
        return ExactScalar.generic(marker), ((marker, radicand),)
    if not radicand.is_rational:
        raise UnsupportedParameterField(
            f"{label} = {radicand} is not rational; nested square roots are not supported"
        )
    value = radicand.rational_value()
    if value < 0:
        raise UnsupportedParameterField(
            f"{label} = {value} is negative; imaginary parameter differences are not supported"
        )
    return sqrt_rational(value), ()


def _signs(root: ExactScalar) -> tuple[int, ...]:
    return (1,) if root.is_zero else (1, -1)


def decompositions(family: Family | str, params: Mapping[str, Any] | tuple | list) -> list[ParamDecomposition]:
    """
    Enumerate the sign-branch decompositions of P_IV or P_V parameters.

    IV: v3 = (alpha-1)/3, v2-v1 = +-sqrt(-beta/2), v1+v2 = -v3.
    V3p: v3-v4 = +-sqrt(2 alpha), v2-v1 = +-sqrt(-2 beta), v1+v2 = (gamma+1)/2,
    v3+v4 = -(gamma+1)/2. Branches with a zero root are merged.

    Raises:
        UnsupportedFamily: For families other than IV and V3p
        UnsupportedParameterField: For negative or irrational radicands
    """
    family = Family.parse(family)
    values = dict(normalize_params(family, params))
    found: list[ParamDecomposition] = []

    if family is Family.IV:
        alpha, beta = values['alpha'], values['beta']
        root, roots = _root(-beta / 2, '-beta/2')
        v3 = (alpha - 1) / 3
        for sign in _signs(root):
            v1 = (-v3 - sign * root) / 2
            v2 = (-v3 + sign * root) / 2
            found.append(ParamDecomposition(family, (v1, v2, v3), (sign,), bool(roots), roots))
    elif family is Family.V3p:
        alpha, beta, gamma = values['alpha'], values['beta'], values['gamma']
        p, p_roots = _root(2 * alpha, '2*alpha')
        q, q_roots = _root(-2 * beta, '-2*beta')
        half_sum = (gamma + 1) / 2
        roots = p_roots + q_roots
        for sign_p in _signs(p):
            for sign_q in _signs(q):
                v1 = (half_sum - sign_q * q) / 2
                v2 = (half_sum + sign_q * q) / 2
                v3 = (-half_sum + sign_p * p) / 2
                v4 = (-half_sum - sign_p * p) / 2
                found.append(ParamDecomposition(
                    family, (v1, v2, v3, v4), (sign_p, sign_q), bool(roots), roots
                ))
    else:
        raise UnsupportedFamily(f"Parameter decompositions exist only for IV and V3p, not {family.value}")

    logger.debug(f"{family.value} {values}: {len(found)} decomposition branch(es)")
    return found
