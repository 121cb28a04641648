"""
Classify module for the Painleve toolkit.
Decides strong minimality, algebraic-solution counts and irreducibility with
respect to classical functions for exact parameter tuples, with explicit
"unknown" where the known results do not settle the question.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Any, Mapping, Sequence

import sympy

from .equations import (
    Family,
    PainleveEquation,
    ParamDecomposition,
    decompositions,
    normalize_params,
)
from .expressions import parse_scalar
from .scalars import (
    ExactScalar,
    is_in_lattice,
    is_integer,
    mutually_generic,
)

logger = logging.getLogger(__name__)

HALF_INTEGER_OFFSET = Fraction(1, 2)


class Verdict(str, Enum):
    YES = 'yes'
    NO = 'no'
    UNKNOWN = 'unknown'


class SolutionCount(str, Enum):
    ZERO = '0'
    ONE = '1'
    TWO = '2'
    FOUR = '4'
    FINITE = 'finite'
    INFINITE = 'infinite'
    UNKNOWN = 'unknown'

    @property
    def has_solutions(self) -> bool | None:
        if self is SolutionCount.ZERO:
            return False
        if self is SolutionCount.UNKNOWN:
            return None
        return True


class Structure(str, Enum):
    STRICTLY_DISINTEGRATED = 'strictly-disintegrated'
    OMEGA_CATEGORICAL = 'omega-categorical'
    UNKNOWN = 'unknown'


# report fields a witness can support
STRONGLY_MINIMAL = 'strongly_minimal'
ALGEBRAIC_SOLUTIONS = 'algebraic_solutions'
GEOMETRIC_STRUCTURE = 'geometric_structure'
EXCEPTIONAL_SET = 'exceptional_set'


@dataclass(frozen=True)
class Witness:
    """Justification of one verdict: the rule applied and the concrete data."""

    rule: str
    field: str
    detail: str

    def __str__(self) -> str:
        return f"[{self.rule}] {self.detail}"


@dataclass(frozen=True)
class ClassificationReport:
    """Classification of one parameter tuple of one family."""

    family: Family
    params: tuple[tuple[str, ExactScalar], ...]
    strongly_minimal: Verdict
    algebraic_solutions: SolutionCount
    geometric_structure: Structure = Structure.UNKNOWN
    geometrically_trivial: Verdict = Verdict.UNKNOWN
    witnesses: tuple[Witness, ...] = ()
    decompositions_used: tuple[ParamDecomposition, ...] = ()
    quantifier_readings: tuple[tuple[str, Verdict], ...] = ()
    ambiguous: bool = False
    exceptional_set: bool | None = None

    def __post_init__(self):
        supported = {w.field for w in self.witnesses}
        if self.strongly_minimal is not Verdict.UNKNOWN and STRONGLY_MINIMAL not in supported:
            raise ValueError(f"strongly_minimal = {self.strongly_minimal.value} has no witness")
        if self.algebraic_solutions is not SolutionCount.UNKNOWN and ALGEBRAIC_SOLUTIONS not in supported:
            raise ValueError(f"algebraic_solutions = {self.algebraic_solutions.value} has no witness")

    @property
    def irreducible_classical(self) -> Verdict:
        """Strongly minimal with no algebraic solution."""
        has_solutions = self.algebraic_solutions.has_solutions
        if self.strongly_minimal is Verdict.NO or has_solutions is True:
            return Verdict.NO
        if self.strongly_minimal is Verdict.YES and has_solutions is False:
            return Verdict.YES
        return Verdict.UNKNOWN

    def witnesses_for(self, name: str) -> list[Witness]:
        return [w for w in self.witnesses if w.field == name]

    def param_text(self) -> dict[str, str]:
        return {name: str(value) for name, value in self.params}


# -- exact integer solving --------------------------------------------------------


def integer_roots(expr: sympy.Expr, unknown: sympy.Symbol) -> frozenset[int]:
    """
    All integers k with expr(k) = 0.

    ``expr`` is a polynomial in ``unknown`` whose coefficients are built from
    rationals, square roots of integers and generic symbols. Distinct surds and
    generic monomials are linearly independent over Q, so the identity splits
    into one rational polynomial per component; the answer is the intersection
    of their integer roots.

    Raises:
        ValueError: If expr vanishes identically
    """
    expr = sympy.expand(expr)
    if expr == 0:
        raise ValueError("Identically zero condition has every integer as a root")
    radicals = {
        p: sympy.Symbol(f"_sqrt{p.base}")
        for p in expr.atoms(sympy.Pow)
        if p.exp == sympy.Rational(1, 2) and p.base.is_Integer
    }
    expr = sympy.expand(expr.xreplace(radicals))
    others = sorted(expr.free_symbols - {unknown}, key=lambda s: s.name)
    poly = sympy.Poly(expr, unknown, *others, domain='QQ')

    components: dict[tuple[int, ...], dict[tuple[int], Any]] = {}
    for monom, coeff in poly.terms():
        components.setdefault(monom[1:], {})[(monom[0],)] = coeff

    candidates: set[int] | None = None
    for coeffs in components.values():
        univariate = sympy.Poly.from_dict(coeffs, unknown, domain='QQ')
        roots = {int(r) for r in univariate.ground_roots() if r.is_Integer}
        candidates = roots if candidates is None else candidates & roots
        if not candidates:
            break
    return frozenset(candidates or ())


def _sym(value: ExactScalar) -> sympy.Expr:
    return value.to_sympy()


# -- per-family classifiers -------------------------------------------------------


def classify_I() -> ClassificationReport:
    """P_I: strongly minimal, no algebraic solution, strictly disintegrated."""
    witnesses = (
        Witness('I.strong-minimality', STRONGLY_MINIMAL,
                "P_I is strongly minimal for its only parameter-free member"),
        Witness('I.algebraic-solutions', ALGEBRAIC_SOLUTIONS,
                "P_I has no solution algebraic over C(t)"),
        Witness('I.structure', GEOMETRIC_STRUCTURE,
                "P_I is strictly disintegrated over C(t)"),
    )
    return ClassificationReport(
        family=Family.I,
        params=(),
        strongly_minimal=Verdict.YES,
        algebraic_solutions=SolutionCount.ZERO,
        geometric_structure=Structure.STRICTLY_DISINTEGRATED,
        geometrically_trivial=Verdict.YES,
        witnesses=witnesses,
    )


def _weyl_word_from_riccati(alpha: ExactScalar) -> tuple[str, str]:
    """Riccati parameter +-1/2 and the T-word carrying it to alpha (alpha in 1/2 + Z)."""
    value = alpha.rational_value()
    if value > 0:
        return '1/2', 'T+' * int(value - HALF_INTEGER_OFFSET)
    return '-1/2', 'T-' * int(-value - HALF_INTEGER_OFFSET)


def classify_II(alpha: ExactScalar | str) -> ClassificationReport:
    """
    P_II(alpha): strongly minimal iff alpha is not in 1/2 + Z; one algebraic
    solution iff alpha is an integer.
    """
    alpha = parse_scalar(alpha)
    witnesses: list[Witness] = []

    if is_in_lattice(alpha, HALF_INTEGER_OFFSET, 1):
        start, word = _weyl_word_from_riccati(alpha)
        riccati = "y' = -y^2 - t/2" if start == '-1/2' else "y' = y^2 + t/2"
        path = word if word else 'the empty word'
        strongly_minimal = Verdict.NO
        witnesses.append(Witness(
            'II.strong-minimality', STRONGLY_MINIMAL,
            f"alpha = {alpha} lies in 1/2 + Z; the Riccati subvariety {riccati} of "
            f"P_II({start}) is carried to P_II({alpha}) by {path}"
        ))
    else:
        strongly_minimal = Verdict.YES
        witnesses.append(Witness(
            'II.strong-minimality', STRONGLY_MINIMAL,
            f"alpha = {alpha} is not in 1/2 + Z"
        ))

    if is_integer(alpha):
        count = SolutionCount.ONE
        witnesses.append(Witness(
            'II.algebraic-solutions', ALGEBRAIC_SOLUTIONS,
            f"alpha = {alpha} is an integer; the algebraic solution is unique"
        ))
    else:
        count = SolutionCount.ZERO
        witnesses.append(Witness(
            'II.algebraic-solutions', ALGEBRAIC_SOLUTIONS,
            f"alpha = {alpha} is not an integer"
        ))

    structure = Structure.UNKNOWN
    trivial = Verdict.UNKNOWN
    if strongly_minimal is Verdict.YES:
        trivial = Verdict.YES
        witnesses.append(Witness(
            'II.geometric-triviality', GEOMETRIC_STRUCTURE,
            "P_II is geometrically trivial outside 1/2 + Z"
        ))
    if mutually_generic(alpha):
        structure = Structure.STRICTLY_DISINTEGRATED
        witnesses.append(Witness(
            'II.structure', GEOMETRIC_STRUCTURE,
            f"alpha = {alpha} is generic; P_II is strictly disintegrated over C(t)"
        ))

    return ClassificationReport(
        family=Family.II,
        params=(('alpha', alpha),),
        strongly_minimal=strongly_minimal,
        algebraic_solutions=count,
        geometric_structure=structure,
        geometrically_trivial=trivial,
        witnesses=tuple(witnesses),
    )


def classify_III(v1: ExactScalar | str, v2: ExactScalar | str) -> ClassificationReport:
    """
    2-parameter P_III(v1, v2): strongly minimal iff v1 + v2 and v1 - v2 are not
    in 2Z; algebraic solutions from v2 - v1 - 1 in 2Z and v2 + v1 + 1 in 2Z
    (two if exactly one holds, four if both do).
    """
    v1, v2 = parse_scalar(v1), parse_scalar(v2)
    witnesses: list[Witness] = []

    even_sum = is_in_lattice(v1 + v2, 0, 2)
    even_diff = is_in_lattice(v1 - v2, 0, 2)
    if even_sum or even_diff:
        strongly_minimal = Verdict.NO
        which = f"v1 + v2 = {v1 + v2}" if even_sum else f"v1 - v2 = {v1 - v2}"
        witnesses.append(Witness('III.strong-minimality', STRONGLY_MINIMAL, f"{which} lies in 2Z"))
    else:
        strongly_minimal = Verdict.YES
        witnesses.append(Witness(
            'III.strong-minimality', STRONGLY_MINIMAL,
            f"v1 + v2 = {v1 + v2} and v1 - v2 = {v1 - v2} are not in 2Z"
        ))

    first = is_in_lattice(v2 - v1 - 1, 0, 2)
    second = is_in_lattice(v2 + v1 + 1, 0, 2)
    count = {0: SolutionCount.ZERO, 1: SolutionCount.TWO, 2: SolutionCount.FOUR}[first + second]
    witnesses.append(Witness(
        'III.algebraic-solutions', ALGEBRAIC_SOLUTIONS,
        f"v2 - v1 - 1 = {v2 - v1 - 1} {'in' if first else 'not in'} 2Z, "
        f"v2 + v1 + 1 = {v2 + v1 + 1} {'in' if second else 'not in'} 2Z"
    ))

    structure = Structure.UNKNOWN
    trivial = Verdict.UNKNOWN
    if mutually_generic(v1, v2):
        structure = Structure.OMEGA_CATEGORICAL
        trivial = Verdict.YES
        witnesses.append(Witness(
            'III.structure', GEOMETRIC_STRUCTURE,
            "v1, v2 mutually generic: geometrically trivial and omega-categorical"
        ))
        witnesses.append(Witness(
            'III.fiber-bound', GEOMETRIC_STRUCTURE,
            "for any solution y at most 2 solutions (y included) are algebraic over C(t)<y>"
        ))

    return ClassificationReport(
        family=Family.III2p,
        params=(('v1', v1), ('v2', v2)),
        strongly_minimal=strongly_minimal,
        algebraic_solutions=count,
        geometric_structure=structure,
        geometrically_trivial=trivial,
        witnesses=tuple(witnesses),
    )


def _readings(flags: Sequence[bool]) -> tuple[Verdict, Verdict]:
    """
    Strong-minimality verdicts under the two branch quantifiers, given for each
    decomposition whether it exhibits the integral-difference obstruction.
    """
    exists = Verdict.NO if any(flags) else Verdict.YES
    forall = Verdict.NO if flags and all(flags) else Verdict.YES
    return exists, forall


def _format_differences(branch: ParamDecomposition, pairs: Sequence[tuple[int, int]]) -> str:
    return ', '.join(f"v{i}-v{j} = {branch.difference(i, j)}" for i, j in pairs)


def classify_IV(alpha: ExactScalar | str, beta: ExactScalar | str) -> ClassificationReport:
    """
    P_IV(alpha, beta) with alpha = 3 v3 + 1, beta = -2 (v2 - v1)^2.

    Not strongly minimal when a decomposition has v1 - v2, v2 - v3 and v3 - v1
    all integral. An algebraic solution (unique) exists when alpha = n1 and
    beta = -2(1 + 2 n2 - n1)^2 or beta = -2/9 (6 n2 - 3 n1 + 1)^2.

    Raises:
        UnsupportedParameterField: If -beta/2 is a negative rational or a surd
    """
    alpha, beta = parse_scalar(alpha), parse_scalar(beta)
    params = (('alpha', alpha), ('beta', beta))
    branches = decompositions(Family.IV, dict(params))
    witnesses: list[Witness] = []
    pairs = ((1, 2), (2, 3), (3, 1))

    flags = [all(is_integer(b.difference(i, j)) for i, j in pairs) for b in branches]
    exists, forall = _readings(flags)
    if exists is Verdict.NO:
        branch = branches[flags.index(True)]
        witnesses.append(Witness(
            'IV.strong-minimality', STRONGLY_MINIMAL,
            f"decomposition {branch} has integral differences {_format_differences(branch, pairs)}"
        ))
    else:
        witnesses.append(Witness(
            'IV.strong-minimality', STRONGLY_MINIMAL,
            "every decomposition has a non-integral difference: "
            + '; '.join(f"{b}: {_format_differences(b, pairs)}" for b in branches)
        ))

    n1, n2 = sympy.symbols('n1 n2')
    a, b = _sym(alpha), _sym(beta)
    found = None
    for k1 in sorted(integer_roots(a - n1, n1)):
        first = integer_roots(b + 2 * (1 + 2 * n2 - k1)**2, n2)
        if first:
            found = f"alpha = n1 = {k1}, beta = -2(1 + 2 n2 - n1)^2 with n2 = {min(first)}"
            break
        second = integer_roots(b + sympy.Rational(2, 9) * (6 * n2 - 3 * k1 + 1)**2, n2)
        if second:
            found = f"alpha = n1 = {k1}, beta = -2/9 (6 n2 - 3 n1 + 1)^2 with n2 = {min(second)}"
            break
    if found:
        count = SolutionCount.ONE
        witnesses.append(Witness('IV.algebraic-solutions', ALGEBRAIC_SOLUTIONS,
                                 f"{found}; the algebraic solution is unique"))
    else:
        count = SolutionCount.ZERO
        witnesses.append(Witness('IV.algebraic-solutions', ALGEBRAIC_SOLUTIONS,
                                 "no integers n1, n2 realize either algebraic-solution family"))

    structure, trivial = Structure.UNKNOWN, Verdict.UNKNOWN
    if mutually_generic(alpha, beta):
        structure, trivial = Structure.STRICTLY_DISINTEGRATED, Verdict.YES
        witnesses.append(Witness(
            'IV.structure', GEOMETRIC_STRUCTURE,
            "alpha, beta mutually generic: geometrically trivial and strictly disintegrated"
        ))

    return ClassificationReport(
        family=Family.IV,
        params=params,
        strongly_minimal=exists,
        algebraic_solutions=count,
        geometric_structure=structure,
        geometrically_trivial=trivial,
        witnesses=tuple(witnesses),
        decompositions_used=tuple(branches),
        quantifier_readings=(('exists', exists), ('forall', forall)),
        ambiguous=exists is not forall,
    )


def _positive(roots: frozenset[int]) -> list[int]:
    return sorted(k for k in roots if k > 0)


def _match_v_cases(alpha: ExactScalar, beta: ExactScalar, gamma: ExactScalar) -> dict[str, str]:
    """Algebraic-solution cases of P_V(alpha, beta, gamma, -1/2) that apply, with their integers."""
    m, n = sympy.symbols('m n')
    a, b, g = _sym(alpha), _sym(beta), _sym(gamma)
    matched: dict[str, str] = {}

    # alpha = (m + gamma)^2 / 2, beta = -n^2 / 2, n > 0, m + n odd, alpha != 0 when |m| < n
    for mm in sorted(integer_roots(2 * a - (m + g)**2, m)):
        hit = next((
            nn for nn in _positive(integer_roots(2 * b + n**2, n))
            if (mm + nn) % 2 == 1 and (abs(mm) >= nn or not alpha.is_zero)
        ), None)
        if hit is not None:
            matched['i'] = f"m = {mm}, n = {hit}"
            break

    # alpha = n^2 / 2, beta = -(m + gamma)^2 / 2, n > 0, m + n odd, beta != 0 when |m| < n
    for mm in sorted(integer_roots(2 * b + (m + g)**2, m)):
        hit = next((
            nn for nn in _positive(integer_roots(2 * a - n**2, n))
            if (mm + nn) % 2 == 1 and (abs(mm) >= nn or not beta.is_zero)
        ), None)
        if hit is not None:
            matched['ii'] = f"m = {mm}, n = {hit}"
            break

    # alpha = a^2 / 2, beta = -(a + n)^2 / 2, gamma = m, m + n even; eliminating a
    # gives (2 beta + 2 alpha + n^2)^2 = 8 alpha n^2
    for mm in sorted(integer_roots(g - m, m)):
        hit = next((
            nn for nn in sorted(integer_roots((2 * b + 2 * a + n**2)**2 - 8 * a * n**2, n))
            if (mm + nn) % 2 == 0
        ), None)
        if hit is not None:
            matched['iii'] = f"m = {mm}, n = {hit}"
            break

    # alpha = (2m + 1)^2 / 8, beta = -(2n + 1)^2 / 8, gamma not an integer
    if not is_integer(gamma):
        ms = integer_roots(8 * a - (2 * m + 1)**2, m)
        ns = integer_roots(8 * b + (2 * n + 1)**2, n)
        if ms and ns:
            matched['iv'] = f"m = {min(ms)}, n = {min(ns)}"

    return matched


def classify_V(
    alpha: ExactScalar | str,
    beta: ExactScalar | str,
    gamma: ExactScalar | str
) -> ClassificationReport:
    """
    P_V(alpha, beta, gamma, -1/2).

    Strongly minimal iff no decomposition has an integral difference v_i - v_j.
    Algebraic solutions follow the four parameter families; the count is 1 in
    the half-odd family and 2 (or 1 when alpha*beta = 0) in the first two
    families when gamma is an integer, "finite" for other matches.

    Raises:
        UnsupportedParameterField: If 2 alpha or -2 beta is a negative rational or a surd
    """
    alpha, beta, gamma = parse_scalar(alpha), parse_scalar(beta), parse_scalar(gamma)
    params = (('alpha', alpha), ('beta', beta), ('gamma', gamma))
    branches = decompositions(Family.V3p, dict(params))
    witnesses: list[Witness] = []
    pairs = ((1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4))

    integral = [
        [(i, j) for i, j in pairs if is_integer(branch.difference(i, j))]
        for branch in branches
    ]
    exists, forall = _readings([bool(found) for found in integral])
    if exists is Verdict.NO:
        index = next(k for k, found in enumerate(integral) if found)
        witnesses.append(Witness(
            'V.strong-minimality', STRONGLY_MINIMAL,
            f"decomposition {branches[index]} has integral "
            f"{_format_differences(branches[index], integral[index])}"
        ))
    else:
        witnesses.append(Witness(
            'V.strong-minimality', STRONGLY_MINIMAL,
            f"no pairwise difference is integral in any of {len(branches)} decomposition(s)"
        ))

    matched = _match_v_cases(alpha, beta, gamma)
    gamma_integral = is_integer(gamma)
    if 'iv' in matched:
        count = SolutionCount.ONE
        witnesses.append(Witness(
            'V.algebraic-solutions', ALGEBRAIC_SOLUTIONS,
            f"half-odd family ({matched['iv']}, gamma = {gamma} not in Z): the solution is unique"
        ))
    elif gamma_integral and ('i' in matched or 'ii' in matched):
        case = 'i' if 'i' in matched else 'ii'
        product_zero = alpha.is_zero or beta.is_zero
        count = SolutionCount.ONE if product_zero else SolutionCount.TWO
        witnesses.append(Witness(
            'V.algebraic-solutions', ALGEBRAIC_SOLUTIONS,
            f"case {case} ({matched[case]}) with gamma = {gamma} in Z and alpha*beta "
            f"{'= 0: exactly one' if product_zero else '!= 0: exactly two'} algebraic solution(s)"
        ))
    elif matched:
        count = SolutionCount.FINITE
        cases = ', '.join(f"{case} ({detail})" for case, detail in matched.items())
        witnesses.append(Witness(
            'V.algebraic-solutions', ALGEBRAIC_SOLUTIONS,
            f"algebraic solutions exist by case {cases}; their number is not pinned down"
        ))
    else:
        count = SolutionCount.ZERO
        witnesses.append(Witness(
            'V.algebraic-solutions', ALGEBRAIC_SOLUTIONS,
            "no integers m, n realize any algebraic-solution family"
        ))

    structure, trivial = Structure.UNKNOWN, Verdict.UNKNOWN
    if mutually_generic(alpha, beta, gamma):
        structure, trivial = Structure.STRICTLY_DISINTEGRATED, Verdict.YES
        witnesses.append(Witness(
            'V.structure', GEOMETRIC_STRUCTURE,
            "alpha, beta, gamma mutually generic: geometrically trivial and strictly disintegrated"
        ))

    return ClassificationReport(
        family=Family.V3p,
        params=params,
        strongly_minimal=exists,
        algebraic_solutions=count,
        geometric_structure=structure,
        geometrically_trivial=trivial,
        witnesses=tuple(witnesses),
        decompositions_used=tuple(branches),
        quantifier_readings=(('exists', exists), ('forall', forall)),
        ambiguous=exists is not forall,
    )


def in_exceptional_set(a0: ExactScalar, a1: ExactScalar, a3: ExactScalar, a4: ExactScalar) -> str | None:
    """
    Membership in the P_VI exceptional hyperplanes: some alpha_i in Z
    (i = 0, 1, 3, 4) or alpha0 +- alpha1 +- alpha3 +- alpha4 - 1 in 2Z.

    Returns:
        Description of the first hyperplane hit, or None
    """
    for name, value in (('alpha0', a0), ('alpha1', a1), ('alpha3', a3), ('alpha4', a4)):
        if is_integer(value):
            return f"{name} = {value} in Z"
    for s1 in (1, -1):
        for s3 in (1, -1):
            for s4 in (1, -1):
                combination = a0 + s1 * a1 + s3 * a3 + s4 * a4 - 1
                if is_in_lattice(combination, 0, 2):
                    signs = ''.join('+' if s > 0 else '-' for s in (s1, s3, s4))
                    return f"alpha0 {signs[0]} alpha1 {signs[1]} alpha3 {signs[2]} alpha4 - 1 = {combination} in 2Z"
    return None


def classify_VI(alphas: Sequence[ExactScalar | str] | Mapping[str, Any]) -> ClassificationReport:
    """
    P_VI through its Hamiltonian system.

    Args:
        alphas: (alpha0, alpha1, alpha2, alpha3, alpha4), or the four values
            without alpha2, or a mapping by name

    Raises:
        ConstraintViolation: If alpha0 + alpha1 + 2 alpha2 + alpha3 + alpha4 != 1
    """
    params = normalize_params(Family.VI, alphas)
    values = dict(params)
    a0, a1, a3, a4 = values['alpha0'], values['alpha1'], values['alpha3'], values['alpha4']
    witnesses: list[Witness] = []

    strongly_minimal = Verdict.UNKNOWN
    count = SolutionCount.UNKNOWN
    structure, trivial = Structure.UNKNOWN, Verdict.UNKNOWN

    if mutually_generic(a1, a3, a4) and is_in_lattice(a0, 0, 2):
        strongly_minimal = Verdict.NO
        witnesses.append(Witness(
            'VI.strong-minimality', STRONGLY_MINIMAL,
            f"alpha1, alpha3, alpha4 mutually generic and alpha0 = {a0} in 2Z"
        ))
    elif mutually_generic(a0, a1, a3, a4):
        strongly_minimal = Verdict.YES
        count = SolutionCount.ZERO
        structure, trivial = Structure.OMEGA_CATEGORICAL, Verdict.YES
        witnesses.append(Witness(
            'VI.strong-minimality', STRONGLY_MINIMAL,
            "alpha0, alpha1, alpha3, alpha4 mutually generic: generic P_VI is strongly minimal"
        ))
        witnesses.append(Witness(
            'VI.algebraic-solutions', ALGEBRAIC_SOLUTIONS,
            "generic parameters lie off every exceptional hyperplane: no algebraic solution"
        ))
        witnesses.append(Witness(
            'VI.structure', GEOMETRIC_STRUCTURE,
            "alpha0, alpha1, alpha3, alpha4 mutually generic: geometrically trivial and omega-categorical"
        ))

    quartet = (a0, a1, a3, a4)
    if all(is_in_lattice(value, HALF_INTEGER_OFFSET, 1) for value in quartet):
        count = SolutionCount.INFINITE
        witnesses.append(Witness(
            'VI.half-integer-lattice', ALGEBRAIC_SOLUTIONS,
            "alpha0, alpha1, alpha3, alpha4 all in 1/2 + Z: infinitely many algebraic solutions"
        ))
    elif all(value.is_zero for value in quartet):
        count = SolutionCount.INFINITE
        witnesses.append(Witness(
            'VI.manin-kernel', ALGEBRAIC_SOLUTIONS,
            "alpha0 = alpha1 = alpha3 = alpha4 = 0: solutions correspond to torsion points "
            "of y^2 = x(x-1)(x-t), infinitely many of them algebraic"
        ))

    hyperplane = in_exceptional_set(a0, a1, a3, a4)
    witnesses.append(Witness(
        'VI.exceptional-set', EXCEPTIONAL_SET,
        hyperplane if hyperplane else "off every exceptional hyperplane"
    ))

    return ClassificationReport(
        family=Family.VI,
        params=params,
        strongly_minimal=strongly_minimal,
        algebraic_solutions=count,
        geometric_structure=structure,
        geometrically_trivial=trivial,
        witnesses=tuple(witnesses),
        exceptional_set=hyperplane is not None,
    )


def classify(family: Family | str, params: Mapping[str, Any] | Sequence[Any] = ()) -> ClassificationReport:
    """
    Dispatch to the family classifier.

    Args:
        family: Family tag or name
        params: Parameters by name or position

    Returns:
        ClassificationReport
    """
    family = Family.parse(family)
    values = dict(normalize_params(family, params))
    if family is Family.I:
        report = classify_I()
    elif family is Family.II:
        report = classify_II(values['alpha'])
    elif family is Family.III2p:
        report = classify_III(values['v1'], values['v2'])
    elif family is Family.IV:
        report = classify_IV(values['alpha'], values['beta'])
    elif family is Family.V3p:
        report = classify_V(values['alpha'], values['beta'], values['gamma'])
    else:
        report = classify_VI(values)
    logger.debug(
        f"{family.value} {report.param_text()}: strongly_minimal={report.strongly_minimal.value} "
        f"algebraic_solutions={report.algebraic_solutions.value}"
    )
    return report


def classify_equation(eq: PainleveEquation) -> ClassificationReport:
    return classify(eq.family, dict(eq.params))
