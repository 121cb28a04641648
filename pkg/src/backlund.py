"""
Backlund module for the Painleve toolkit.
Graph-type Backlund transformations w = R(z, z', t) between Painleve equations,
their exact verification by reduction modulo the source equation, the affine
Weyl group action of P_II on its parameter, and Riccati-subvariety checks.
"""

from __future__ import annotations

import hashlib
import json
import logging
import random
import re
import threading
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, replace
from enum import Enum
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

import sympy

from . import numeric
from .diffpoly import DiffRatFunc, Var, reduce_mod_equation, total_derivative
from .equations import (
    Family,
    PainleveEquation,
    UnsupportedFamily,
    build,
    equation_from_spec,
    equation_to_spec,
)
from .expressions import T, jet_symbol, parse_scalar
from .scalars import HALF, ExactScalar, is_integer

logger = logging.getLogger(__name__)


class BacklundError(Exception):
    """Backlund transformation error."""
    pass


class InvalidTransform(BacklundError):
    """Raised when a transformation definition is malformed."""
    pass


class UnknownTransform(BacklundError):
    """Raised when a transformation name is not registered or not built in."""
    pass


DEGENERATE = 'degenerate'


@dataclass(frozen=True)
class ProofToken:
    """Record that a transformation's symbolic residual reduced to zero."""

    statement: str
    digest: str

    @classmethod
    def for_statement(cls, statement: str) -> ProofToken:
        return cls(statement, hashlib.sha256(statement.encode('utf-8')).hexdigest())


@dataclass(frozen=True, eq=False)
class BacklundTransform:
    """
    Rational map w = map(z, z', t) sending solutions of ``source`` (in the
    variable ``source_var``) to solutions of ``target``.
    """

    name: str
    source: PainleveEquation
    target: PainleveEquation
    map: DiffRatFunc
    source_var: str = 'z'
    flags: tuple[str, ...] = ()
    proof: ProofToken | None = None

    def __post_init__(self):
        allowed = {Var(self.source_var, 0), Var(self.source_var, 1)}
        extra = self.map.variables() - allowed
        if extra:
            names = ', '.join(sorted(str(v) for v in extra))
            raise InvalidTransform(
                f"Map of {self.name} may only use {self.source_var}, {self.source_var}' and t; found {names}"
            )

    @property
    def verified(self) -> bool:
        return self.proof is not None

    def mapped_derivative(self) -> DiffRatFunc:
        """w' on solutions of the source: total derivative of the map with z'' eliminated."""
        if self.source.is_system:
            raise UnsupportedFamily("Transformations of the VI system are not supported")
        return reduce_mod_equation(total_derivative(self.map), self.source, Var(self.source_var))

    def singular_loci(self) -> tuple[str, ...]:
        """Non-constant factors of the map denominator."""
        _, factors = sympy.factor_list(self.map.denom)
        return tuple(
            sympy.sstr(factor, order='grlex')
            for factor, _ in factors if factor.free_symbols
        )

    def statement(self) -> str:
        return f"{self.name}: {self.source} -> {self.target} via w = {self.map}"

    def __str__(self) -> str:
        return self.statement()


class VerificationStatus(str, Enum):
    VERIFIED = 'verified'
    REFUTED = 'refuted'


@dataclass(frozen=True, eq=False)
class VerificationResult:
    transform: BacklundTransform
    status: VerificationStatus
    residual: DiffRatFunc
    singular_loci: tuple[str, ...] = ()

    @property
    def residual_text(self) -> str:
        return str(self.residual)

    @property
    def verified(self) -> bool:
        return self.status is VerificationStatus.VERIFIED


def _require_scalar(*equations: PainleveEquation) -> None:
    for eq in equations:
        if eq.is_system:
            raise UnsupportedFamily(
                "The VI Hamiltonian system is first order; only second-order scalar families are supported"
            )


def verify_symbolic(transform: BacklundTransform) -> VerificationResult:
    """
    Check a transformation exactly.

    Computes w, w' and w'' from the map, eliminates z'' and z''' with the
    source equation and tests w'' - f_target(w, w', t) = 0 as a rational
    function in z, z', t and the parameters.

    Returns:
        VerificationResult, verified or refuted with the reduced residual

    Raises:
        UnsupportedFamily: If source or target is the VI system
    """
    _require_scalar(transform.source, transform.target)
    var = Var(transform.source_var)

    w = transform.map
    w1 = reduce_mod_equation(total_derivative(w), transform.source, var)
    w2 = reduce_mod_equation(total_derivative(w1), transform.source, var)
    f_target = transform.target.f.substitute({Var('y'): w, Var('y', 1): w1})
    residual = w2 - f_target

    status = VerificationStatus.VERIFIED if residual.is_zero else VerificationStatus.REFUTED
    loci = transform.singular_loci()
    if status is VerificationStatus.VERIFIED:
        logger.info(f"Verified {transform.name}: {transform.source} -> {transform.target}")
    else:
        logger.info(f"Refuted {transform.name}: residual {residual}")
    return VerificationResult(transform, status, residual, loci)


def certify(transform: BacklundTransform, result: VerificationResult | None = None) -> BacklundTransform:
    """
    Attach a proof token, verifying first unless a result is supplied.

    Raises:
        InvalidTransform: If verification refutes the transformation
    """
    if result is None:
        result = verify_symbolic(transform)
    if not result.verified:
        raise InvalidTransform(f"{transform.name} is refuted with residual {result.residual_text}")
    return replace(transform, proof=ProofToken.for_statement(transform.statement() + "; residual 0"))


# -- P_II transformations and the affine Weyl group ------------------------------------


class WeylLetter(str, Enum):
    S = 'S'
    T_PLUS = 'T+'
    T_MINUS = 'T-'

    def act(self, alpha: ExactScalar) -> ExactScalar:
        """Parameter action: S: a -> -a, T+: a -> a + 1, T-: a -> a - 1."""
        if self is WeylLetter.S:
            return -alpha
        if self is WeylLetter.T_PLUS:
            return alpha + 1
        return alpha - 1

    def inverse(self) -> WeylLetter:
        if self is WeylLetter.T_PLUS:
            return WeylLetter.T_MINUS
        if self is WeylLetter.T_MINUS:
            return WeylLetter.T_PLUS
        return self


_LETTER_PATTERN = re.compile(r"T\+|T-|T−|T₊|T₋|S")
_LETTER_ALIASES = {'T−': 'T-', 'T₊': 'T+', 'T₋': 'T-'}


@dataclass(frozen=True)
class WeylWord:
    """Finite sequence of S, T+, T- applied left to right."""

    letters: tuple[WeylLetter, ...] = ()

    @classmethod
    def parse(cls, text: str | Sequence[str]) -> WeylWord:
        """
        Parse "S T+ T+", "ST+T-", "[S, T+]" or a list of letter names.

        Raises:
            BacklundError: On unknown letters
        """
        if not isinstance(text, str):
            try:
                return cls(tuple(WeylLetter(_LETTER_ALIASES.get(item, item)) for item in text))
            except ValueError as e:
                raise BacklundError(f"Invalid Weyl word {list(text)}: {e}")
        tokens = _LETTER_PATTERN.findall(text)
        leftover = _LETTER_PATTERN.sub('', text)
        if re.sub(r"[\s,\[\]]", '', leftover):
            raise BacklundError(f"Invalid Weyl word '{text}'")
        return cls(tuple(WeylLetter(_LETTER_ALIASES.get(tok, tok)) for tok in tokens))

    @classmethod
    def power(cls, letter: WeylLetter, count: int) -> WeylWord:
        return cls((letter,) * count)

    def inverse(self) -> WeylWord:
        return WeylWord(tuple(letter.inverse() for letter in reversed(self.letters)))

    def __add__(self, other: WeylWord) -> WeylWord:
        return WeylWord(self.letters + other.letters)

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __str__(self) -> str:
        return ''.join(letter.value for letter in self.letters)


def weyl_apply(word: WeylWord | str, alpha: ExactScalar | str) -> ExactScalar:
    """Apply the parameter actions of a word, left to right."""
    if not isinstance(word, WeylWord):
        word = WeylWord.parse(word)
    value = parse_scalar(alpha)
    for letter in word:
        value = letter.act(value)
    return value


@dataclass(frozen=True)
class OrbitResult:
    member: bool
    word: WeylWord | None = None


def weyl_orbit_member(alpha: ExactScalar | str, beta: ExactScalar | str) -> OrbitResult:
    """
    Decide whether beta lies in {alpha + k, -alpha + k : k in Z}.

    The witnessing word is T+^k / T-^k, or S followed by T+^k / T-^k.
    """
    alpha, beta = parse_scalar(alpha), parse_scalar(beta)
    for prefix, start in ((WeylWord(), alpha), (WeylWord((WeylLetter.S,)), -alpha)):
        shift = beta - start
        if is_integer(shift):
            k = int(shift.rational_value())
            letter = WeylLetter.T_PLUS if k >= 0 else WeylLetter.T_MINUS
            return OrbitResult(True, prefix + WeylWord.power(letter, abs(k)))
    return OrbitResult(False)


def builtin_pII(kind: WeylLetter | str, alpha: ExactScalar | str) -> BacklundTransform:
    """
    The P_II transformations with source P_II(alpha):
    S(z) = -z onto P_II(-alpha), T+(z) = -z - (alpha + 1/2)/(z' + z^2 + t/2)
    onto P_II(alpha + 1), T-(z) = -z + (alpha - 1/2)/(z' - z^2 - t/2) onto
    P_II(alpha - 1). At alpha = -1/2 (T+) and alpha = 1/2 (T-) the map
    degenerates to -z and is flagged.
    """
    try:
        letter = kind if isinstance(kind, WeylLetter) else WeylLetter(_LETTER_ALIASES.get(kind, kind))
    except ValueError:
        raise UnknownTransform(f"Unknown P_II transformation '{kind}' (expected S, T+ or T-)")
    alpha = parse_scalar(alpha)
    z, dz = jet_symbol('z'), jet_symbol('z', 1)
    a = alpha.to_sympy()
    half = sympy.Rational(1, 2)

    if letter is WeylLetter.S:
        expr = -z
        numerator = None
    elif letter is WeylLetter.T_PLUS:
        numerator = alpha + HALF
        expr = -z - (a + half) / (dz + z**2 + T / 2)
    else:
        numerator = alpha - HALF
        expr = -z + (a - half) / (dz - z**2 - T / 2)

    flags: tuple[str, ...] = ()
    if numerator is not None and numerator.is_zero:
        flags = (DEGENERATE,)
        logger.warning(f"{letter.value} at alpha = {alpha} degenerates to w = -z")

    return BacklundTransform(
        name=letter.value,
        source=build(Family.II, {'alpha': alpha}),
        target=build(Family.II, {'alpha': letter.act(alpha)}),
        map=DiffRatFunc(expr),
        flags=flags,
    )


def identity_transform(eq: PainleveEquation, source_var: str = 'z') -> BacklundTransform:
    return BacklundTransform('id', eq, eq, DiffRatFunc.var(source_var), source_var)


def compose(first: BacklundTransform, second: BacklundTransform) -> BacklundTransform:
    """
    Apply ``first`` then ``second``: substitute first's w and w' for second's
    source variable and its derivative.

    Raises:
        BacklundError: If first.target differs from second.source
    """
    if first.target != second.source:
        raise BacklundError(
            f"Cannot compose: {first.name} ends at {first.target}, {second.name} starts at {second.source}"
        )
    inner = first.map
    inner_derivative = first.mapped_derivative()
    outer = second.map.substitute({
        Var(second.source_var): inner,
        Var(second.source_var, 1): inner_derivative,
    })
    flags = tuple(dict.fromkeys(first.flags + second.flags))
    return BacklundTransform(
        name=f"{first.name} {second.name}".strip(),
        source=first.source,
        target=second.target,
        map=outer,
        source_var=first.source_var,
        flags=flags,
    )


def word_transform(word: WeylWord | str, alpha: ExactScalar | str) -> BacklundTransform:
    """Composite map of a Weyl word starting at P_II(alpha); the empty word is the identity."""
    if not isinstance(word, WeylWord):
        word = WeylWord.parse(word)
    alpha = parse_scalar(alpha)
    if not len(word):
        return identity_transform(build(Family.II, {'alpha': alpha}))
    result = None
    current = alpha
    for letter in word:
        step = builtin_pII(letter, current)
        result = step if result is None else compose(result, step)
        current = letter.act(current)
    return replace(result, name=str(word))


# -- Riccati subvarieties ----------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class RiccatiCandidate:
    """First-order equation y' = g(y, t) proposed as a subvariety of ``target``."""

    g: DiffRatFunc
    target: PainleveEquation
    var: str = 'y'

    def __post_init__(self):
        extra = self.g.variables() - {Var(self.var)}
        if extra:
            names = ', '.join(sorted(str(v) for v in extra))
            raise InvalidTransform(f"Riccati right-hand side may only use {self.var} and t; found {names}")


class RiccatiStatus(str, Enum):
    SUBVARIETY = 'subvariety'
    NOT_SUBVARIETY = 'not-subvariety'


@dataclass(frozen=True, eq=False)
class RiccatiResult:
    candidate: RiccatiCandidate
    status: RiccatiStatus
    residual: DiffRatFunc

    @property
    def is_subvariety(self) -> bool:
        return self.status is RiccatiStatus.SUBVARIETY


def riccati_check(candidate: RiccatiCandidate) -> RiccatiResult:
    """
    Test whether every solution of y' = g(y, t) solves the target equation:
    y'' = dg/dt + dg/dy * g must equal f_target(y, g, t).

    Raises:
        UnsupportedFamily: If the target is the VI system
    """
    _require_scalar(candidate.target)
    y, dy = Var(candidate.var), Var(candidate.var, 1)
    g = candidate.g
    second = total_derivative(g).substitute({dy: g})
    f = candidate.target.rhs_in(candidate.var).substitute({dy: g})
    residual = second - f
    status = RiccatiStatus.SUBVARIETY if residual.is_zero else RiccatiStatus.NOT_SUBVARIETY
    logger.info(f"Riccati y' = {g} against {candidate.target}: {status.value}")
    return RiccatiResult(candidate, status, residual)


def riccati_pII(sign: int) -> RiccatiCandidate:
    """y' = -y^2 - t/2 for P_II(-1/2) (sign -1), y' = y^2 + t/2 for P_II(1/2) (sign +1)."""
    if sign not in (1, -1):
        raise BacklundError(f"sign must be +1 or -1, got {sign}")
    y = jet_symbol('y')
    g = DiffRatFunc(sign * (y**2 + T / 2))
    return RiccatiCandidate(g, build(Family.II, {'alpha': ExactScalar.rational(sign) * HALF}))


# -- registry and definition files -------------------------------------------------------


class TransformRegistry:
    """Append-only, lock-protected collection of named transformations."""

    def __init__(self, transforms: Iterable[BacklundTransform] = ()):
        self._lock = threading.Lock()
        self._transforms: dict[str, BacklundTransform] = {}
        for transform in transforms:
            self.register(transform)

    @classmethod
    def with_builtins(cls, alpha: ExactScalar | str) -> TransformRegistry:
        return cls(builtin_pII(letter, alpha) for letter in WeylLetter)

    def register(self, transform: BacklundTransform) -> None:
        with self._lock:
            if transform.name in self._transforms:
                raise BacklundError(f"Transformation '{transform.name}' is already registered")
            self._transforms[transform.name] = transform
        logger.debug(f"Registered {transform.name}")

    def get(self, name: str) -> BacklundTransform:
        with self._lock:
            try:
                return self._transforms[name]
            except KeyError:
                raise UnknownTransform(f"No transformation named '{name}'")

    def names(self) -> list[str]:
        with self._lock:
            return list(self._transforms)

    def __len__(self) -> int:
        with self._lock:
            return len(self._transforms)

    def verify_all(self, max_workers: int = 4) -> dict[str, VerificationResult]:
        """Verify every registered transformation in parallel; results keyed by name."""
        with self._lock:
            transforms = list(self._transforms.values())
        results: dict[str, VerificationResult] = {}
        with ThreadPoolExecutor(max_workers=max_workers) as executor:
            futures = {executor.submit(verify_symbolic, t): t.name for t in transforms}
            for future in as_completed(futures):
                results[futures[future]] = future.result()
        return {t.name: results[t.name] for t in transforms}


def transform_from_spec(spec: Mapping[str, Any]) -> BacklundTransform:
    """
    Build a transformation from a definition object.

    Either {"name", "source", "target", "map"[, "source_var"]} with equation
    specs and a map expression, or {"builtin": "S"|"T+"|"T-", "alpha": ...}.

    Raises:
        InvalidTransform: On missing fields
    """
    if not isinstance(spec, Mapping):
        raise InvalidTransform("Transformation definition must be an object")
    if 'builtin' in spec:
        if 'alpha' not in spec:
            raise InvalidTransform("Builtin transformation needs 'alpha'")
        return builtin_pII(spec['builtin'], spec['alpha'])
    missing = [key for key in ('name', 'source', 'target', 'map') if key not in spec]
    if missing:
        raise InvalidTransform(f"Transformation definition is missing {missing}")
    source_var = spec.get('source_var', 'z')
    return BacklundTransform(
        name=str(spec['name']),
        source=equation_from_spec(spec['source']),
        target=equation_from_spec(spec['target']),
        map=DiffRatFunc.parse(str(spec['map']), (source_var,)),
        source_var=source_var,
    )


def transform_to_spec(transform: BacklundTransform) -> dict[str, Any]:
    return {
        'name': transform.name,
        'source': equation_to_spec(transform.source),
        'target': equation_to_spec(transform.target),
        'map': str(transform.map),
        'source_var': transform.source_var,
    }


def load_transform_file(path: str | Path) -> BacklundTransform:
    """
    Load a transformation definition from JSON.

    Raises:
        InvalidTransform: If the file is missing or not valid JSON
    """
    path = Path(path)
    try:
        with open(path, 'r') as f:
            spec = json.load(f)
    except FileNotFoundError:
        raise InvalidTransform(f"Transformation file not found: {path}")
    except json.JSONDecodeError as e:
        raise InvalidTransform(f"Invalid JSON in {path}: {e}")
    return transform_from_spec(spec)


# -- numeric cross-check -----------------------------------------------------------------


def random_grid(
    count: int,
    seed: int = 0,
    t_range: tuple[float, float] = (0.2, 0.8),
    value_range: tuple[float, float] = (-0.5, 0.5)
) -> list[tuple[float, float, float]]:
    """Reproducible initial conditions (t0, z0, z0') for the numeric cross-check."""
    rng = random.Random(seed)
    return [
        (rng.uniform(*t_range), rng.uniform(*value_range), rng.uniform(*value_range))
        for _ in range(count)
    ]


@dataclass(frozen=True)
class PointCheck:
    t0: float
    z0: float
    dz0: float
    residual: float | None
    error: str | None = None
    dropped: int = 0


@dataclass(frozen=True)
class ConsistencyReport:
    transform: str
    tolerance: float
    points: tuple[PointCheck, ...] = ()

    @property
    def max_residual(self) -> float | None:
        values = [p.residual for p in self.points if p.residual is not None]
        return max(values) if values else None

    @property
    def passed(self) -> bool:
        if any(p.error for p in self.points):
            return False
        worst = self.max_residual
        return worst is None or worst <= self.tolerance


def verify_numeric_consistency(
    transform: BacklundTransform,
    grid: Sequence[Sequence[float]],
    span: float = 0.2,
    spacing: float = 1e-3,
    tolerance: float = 1e-4,
    tolerances=None,
    denominator_floor: float = 1e-8
) -> ConsistencyReport:
    """
    Integrate the source from each (t0, z0, z0'), map the samples through the
    transformation and measure the finite-difference residual against the target.
    """
    _require_scalar(transform.source, transform.target)
    points: list[PointCheck] = []
    for t0, z0, dz0 in grid:
        t0, z0, dz0 = float(t0), float(z0), float(dz0)
        try:
            traj = numeric.integrate(
                transform.source, (t0, z0, dz0), t0 + span,
                tolerances=tolerances,
                t_eval=numeric.uniform_grid(t0, t0 + span, spacing),
            )
            mapped = numeric.map_trajectory(transform, traj, denominator_floor)
            residual = numeric.residual_fd(transform.target, mapped)
            points.append(PointCheck(t0, z0, dz0, residual, dropped=len(mapped.dropped)))
        except numeric.NumericError as e:
            logger.warning(f"{transform.name} at ({t0}, {z0}, {dz0}): {e}")
            points.append(PointCheck(t0, z0, dz0, None, str(e)))
    report = ConsistencyReport(transform.name, tolerance, tuple(points))
    logger.info(
        f"Numeric check of {transform.name}: {len(points)} point(s), max residual {report.max_residual}"
    )
    return report
