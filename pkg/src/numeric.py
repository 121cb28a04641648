"""
Numeric module for the Painleve toolkit.
Adaptive Dormand-Prince 5(4) integration of the Painleve equations as first-order
systems, movable-pole detection, finite-difference residual checks and pointwise
mapping of trajectories through Backlund transformations.
"""

from __future__ import annotations

import logging
import math
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import TYPE_CHECKING, Any, Callable, Mapping, Sequence

import numpy as np

from .diffpoly import DiffRatFunc, Var
from .equations import PainleveEquation
from .expressions import T

if TYPE_CHECKING:
    from .backlund import BacklundTransform

logger = logging.getLogger(__name__)


class NumericError(Exception):
    """Numeric integration error."""
    pass


class SingularInitialPoint(NumericError):
    """Raised when t0 is a fixed singularity of the equation."""
    pass


class GenericParameter(NumericError):
    """Raised when a generic parameter would need a numeric value."""
    pass


class StepFailure(NumericError):
    """Raised when the step controller fails away from a detected blow-up."""

    def __init__(self, message: str, trajectory: Trajectory | None = None):
        super().__init__(message)
        self.trajectory = trajectory


class InsufficientSamples(NumericError):
    """Raised when a residual check has too few samples."""
    pass


class NonUniformGrid(NumericError):
    """Raised when finite differences are requested on a non-uniform grid."""
    pass


class DenominatorBlowup(NumericError):
    """Raised when a mapped trajectory loses more than half of its samples."""
    pass


class Status(str, Enum):
    COMPLETED = 'completed'
    POLE_DETECTED = 'pole-detected'
    STEP_FAILURE = 'step-failure'


# Dormand-Prince 5(4), first-same-as-last
C = np.array([0, 1/5, 3/10, 4/5, 8/9, 1, 1])
A = np.array([
    [0, 0, 0, 0, 0, 0],
    [1/5, 0, 0, 0, 0, 0],
    [3/40, 9/40, 0, 0, 0, 0],
    [44/45, -56/15, 32/9, 0, 0, 0],
    [19372/6561, -25360/2187, 64448/6561, -212/729, 0, 0],
    [9017/3168, -355/33, 46732/5247, 49/176, -5103/18656, 0],
    [35/384, 0, 500/1113, 125/192, -2187/6784, 11/84],
])
B = np.array([35/384, 0, 500/1113, 125/192, -2187/6784, 11/84, 0])
B_HAT = np.array([5179/57600, 0, 7571/16695, 393/640, -92097/339200, 187/2100, 1/40])
E = B - B_HAT
ORDER = 5

# PI controller constants
BETA = 0.04
EXPO1 = 1 / ORDER - 0.75 * BETA
SAFETY = 0.9
MIN_FACTOR = 0.2
MAX_FACTOR = 10.0

POLE_ORDERS = (1, 2)


@dataclass(frozen=True)
class Tolerances:
    """Integration tolerances and limits."""

    rtol: float = 1e-10
    atol: float = 1e-12
    blowup_threshold: float = 1e8
    min_step: float = 1e-12
    max_steps: int = 200000

    def __post_init__(self):
        if not (0 < self.rtol < 1):
            raise NumericError(f"rtol must lie in (0, 1), got {self.rtol}")
        if self.atol <= 0 or self.blowup_threshold <= 0 or self.min_step <= 0:
            raise NumericError("atol, blowup_threshold and min_step must be positive")
        if self.max_steps <= 0:
            raise NumericError(f"max_steps must be positive, got {self.max_steps}")

    @classmethod
    def from_config(cls, config: Mapping[str, Any] | None = None, **overrides) -> Tolerances:
        """Build from the ``numeric`` config section, with keyword overrides."""
        section = dict((config or {}).get('numeric', {}))
        values = {
            name: section[name] for name in
            ('rtol', 'atol', 'blowup_threshold', 'min_step', 'max_steps') if name in section
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)

    def to_dict(self) -> dict[str, float]:
        return {
            'rtol': self.rtol,
            'atol': self.atol,
            'blowup_threshold': self.blowup_threshold,
            'min_step': self.min_step,
            'max_steps': self.max_steps,
        }


@dataclass(frozen=True, eq=False)
class Trajectory:
    """
    Samples (t, state) of an integration.

    ``states`` has one row per sample: (y, y') for scalar families, (y, x) for VI.
    """

    t: np.ndarray
    states: np.ndarray
    status: Status = Status.COMPLETED
    tolerances: Tolerances = field(default_factory=Tolerances)
    t_pole: float | None = None
    pole_order: int | None = None
    pole_fit_residual: float | None = None
    labels: tuple[str, str] = ('y', 'dy')
    steps: int = 0
    rejected: int = 0
    dropped: tuple[float, ...] = ()

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float)
        states = np.asarray(self.states, dtype=float)
        states = states.reshape(len(t), -1) if states.size else states.reshape(0, 2)
        object.__setattr__(self, 't', t)
        object.__setattr__(self, 'states', states)
        if len(t) > 1:
            dt = np.diff(t)
            if not (np.all(dt > 0) or np.all(dt < 0)):
                raise NumericError("Trajectory times must be strictly monotone")

    def __len__(self) -> int:
        return len(self.t)

    @property
    def y(self) -> np.ndarray:
        return self.states[:, 0]

    @property
    def endpoint(self) -> tuple[float, np.ndarray]:
        return float(self.t[-1]), self.states[-1]

    def manifest(self) -> dict[str, Any]:
        """Run summary: tolerances, status and pole estimate."""
        return {
            'status': self.status.value,
            'samples': len(self),
            'steps': self.steps,
            'rejected_steps': self.rejected,
            't_start': float(self.t[0]) if len(self) else None,
            't_end': float(self.t[-1]) if len(self) else None,
            't_pole': self.t_pole,
            'pole_order': self.pole_order,
            'pole_fit_residual': self.pole_fit_residual,
            'pole_ansatz': 'empirical c/(t - t_pole)^k fit, k in {1, 2}' if self.t_pole is not None else None,
            'dropped_samples': len(self.dropped),
            'tolerances': self.tolerances.to_dict(),
        }


def _require_numeric(eq: PainleveEquation) -> None:
    generics = eq.generic_parameters()
    if generics:
        names = ', '.join(f"@{name}" for name in sorted(generics))
        raise GenericParameter(f"{eq} has generic parameters ({names}); numeric values are required")


def vector_field(eq: PainleveEquation) -> Callable[[float, np.ndarray], np.ndarray]:
    """
    First-order system of an equation: (y, y')' = (y', f) or the VI system.

    Raises:
        GenericParameter: If the equation has generic parameters
    """
    _require_numeric(eq)
    if eq.is_system:
        fy = eq.rhs[0].compile([Var('y'), Var('x'), T])
        fx = eq.rhs[1].compile([Var('y'), Var('x'), T])

        def system(t: float, u: np.ndarray) -> np.ndarray:
            y, x, t = float(u[0]), float(u[1]), float(t)
            return np.array([fy(y, x, t), fx(y, x, t)])
        return system

    f = eq.f.compile([Var('y'), Var('y', 1), T])

    def scalar(t: float, u: np.ndarray) -> np.ndarray:
        y, dy = float(u[0]), float(u[1])
        return np.array([dy, f(y, dy, float(t))])
    return scalar


def _rms(values: np.ndarray) -> float:
    return float(np.sqrt(np.mean(values**2)))


def _initial_step(fun, t0, y0, f0, direction, tol: Tolerances) -> float:
    """Starting step from the size of the state and its derivatives."""
    scale = tol.atol + tol.rtol * np.abs(y0)
    d0, d1 = _rms(y0 / scale), _rms(f0 / scale)
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    try:
        f1 = fun(t0 + direction * h0, y0 + direction * h0 * f0)
        d2 = _rms((f1 - f0) / scale) / h0
    except (ZeroDivisionError, OverflowError, ValueError):
        return h0
    if not math.isfinite(d2):
        return h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** (1 / ORDER)
    return min(100 * h0, h1)


def _step(fun, t: float, y: np.ndarray, k1: np.ndarray, h: float):
    """One Dormand-Prince step; returns (y_new, error vector, last stage)."""
    K = np.empty((7, len(y)))
    K[0] = k1
    for s in range(1, 7):
        dy = h * (A[s, :s] @ K[:s])
        K[s] = fun(t + C[s] * h, y + dy)
    y_new = y + h * (B @ K)
    return y_new, h * (E @ K), K[6]


def fit_pole(history: Sequence[tuple[float, float]]) -> tuple[float, int, float]:
    """
    Estimate a pole location from the last samples of |y| before blow-up.

    For each k in {1, 2} the ansatz |y| = c |t - t_pole|^-k makes |y|^(-1/k)
    linear in t; the line through the last two points gives t_pole and the
    third-to-last point measures the fit. The better fit wins.

    Returns:
        (t_pole, k, relative fit residual)
    """
    (t0, a0), (t1, a1), (t2, a2) = history[-3:]
    best = (t2, POLE_ORDERS[0], math.inf)
    for k in POLE_ORDERS:
        g0, g1, g2 = (max(a, 1e-300) ** (-1 / k) for a in (a0, a1, a2))
        if g1 == g2:
            continue
        slope = (g2 - g1) / (t2 - t1)
        t_pole = t2 - g2 / slope
        predicted = g2 + slope * (t0 - t2)
        residual = abs(predicted - g0) / abs(g0)
        if residual < best[2]:
            best = (t_pole, k, residual)
    return best


def integrate(
    eq: PainleveEquation,
    init: Sequence[float],
    t_end: float,
    rtol: float | None = None,
    atol: float | None = None,
    *,
    tolerances: Tolerances | None = None,
    t_eval: Sequence[float] | np.ndarray | None = None,
    first_step: float | None = None
) -> Trajectory:
    """
    Integrate an equation with an adaptive embedded 5(4) pair and PI step control.

    Args:
        eq: Equation to integrate
        init: (t0, y0, y0') or (t0, y0, x0) for VI
        t_end: Final time, may lie before t0
        rtol: Relative tolerance (overrides ``tolerances``)
        atol: Absolute tolerance (overrides ``tolerances``)
        tolerances: Full tolerance set
        t_eval: Output grid; steps are clipped to land on every point
        first_step: Initial step size

    Returns:
        Trajectory, completed or pole-detected

    Raises:
        SingularInitialPoint: If t0 is a fixed singularity
        GenericParameter: If the equation has generic parameters
        StepFailure: If the step size underflows or max_steps is exceeded
    """
    tol = tolerances or Tolerances()
    if rtol is not None or atol is not None:
        tol = Tolerances(
            rtol=rtol if rtol is not None else tol.rtol,
            atol=atol if atol is not None else tol.atol,
            blowup_threshold=tol.blowup_threshold,
            min_step=tol.min_step,
            max_steps=tol.max_steps,
        )

    t0, u1, u2 = (float(value) for value in init)
    t_end = float(t_end)
    for singular in eq.singular_times:
        if t0 == singular:
            raise SingularInitialPoint(f"t0 = {t0} is a fixed singularity of {eq.family.value}")

    fun = vector_field(eq)
    labels = ('y', 'x') if eq.is_system else ('y', 'dy')
    y = np.array([u1, u2])

    direction = 1.0 if t_end >= t0 else -1.0
    if t_eval is not None:
        grid = [float(value) for value in t_eval]
        if any(direction * (b - a) <= 0 for a, b in zip(grid, grid[1:])):
            raise NumericError("t_eval must be strictly monotone in the direction of integration")
        if grid and (direction * (grid[0] - t0) < 0 or direction * (grid[-1] - t_end) > 0):
            raise NumericError(f"t_eval must lie between t0 = {t0} and t_end = {t_end}")
        pending = deque(grid)
    else:
        pending = None

    ts: list[float] = []
    states: list[np.ndarray] = []

    def record(t_value: float, state: np.ndarray) -> None:
        ts.append(t_value)
        states.append(state.copy())

    if pending is None or (pending and pending[0] == t0):
        record(t0, y)
        if pending:
            pending.popleft()

    def partial(status: Status, **extra) -> Trajectory:
        return Trajectory(
            np.array(ts), np.array(states).reshape(len(ts), 2), status, tol,
            labels=labels, steps=steps, rejected=rejected, **extra
        )

    steps = rejected = 0
    t = t0
    if t_end == t0:
        return partial(Status.COMPLETED)

    try:
        k1 = fun(t, y)
    except (ZeroDivisionError, OverflowError) as e:
        raise SingularInitialPoint(f"Right-hand side of {eq} is singular at the initial point: {e}")

    h = abs(first_step) if first_step else _initial_step(fun, t, y, k1, direction, tol)
    facold = 1e-4
    last_rejected = False
    history: deque[tuple[float, float]] = deque([(t, abs(y[0]))], maxlen=3)

    while direction * (t_end - t) > 0:
        if steps + rejected >= tol.max_steps:
            raise StepFailure(
                f"Maximum number of steps ({tol.max_steps}) exceeded at t = {t}",
                partial(Status.STEP_FAILURE)
            )
        if h < tol.min_step:
            raise StepFailure(
                f"Step size {h:.3e} below minimum {tol.min_step:.1e} at t = {t}",
                partial(Status.STEP_FAILURE)
            )

        target = t_end
        if pending:
            target = pending[0]
        clipped = h >= abs(target - t)
        step = abs(target - t) if clipped else h

        try:
            y_new, err, k_last = _step(fun, t, y, k1, direction * step)
            scale = tol.atol + tol.rtol * np.maximum(np.abs(y), np.abs(y_new))
            err_norm = _rms(err / scale)
        except (ZeroDivisionError, OverflowError):
            err_norm = math.inf
        if not math.isfinite(err_norm) or not np.all(np.isfinite(y_new)):
            rejected += 1
            last_rejected = True
            h = step * MIN_FACTOR
            continue

        fac11 = err_norm ** EXPO1
        if err_norm <= 1.0:
            fac = fac11 / facold ** BETA
            fac = max(1 / MAX_FACTOR, min(1 / MIN_FACTOR, fac / SAFETY))
            h_new = step / fac
            if last_rejected:
                h_new = min(h_new, step)
            facold = max(err_norm, 1e-4)
            last_rejected = False
            steps += 1

            t = target if clipped else t + direction * step
            y = y_new
            k1 = k_last
            history.append((t, abs(y[0])))

            landed = pending is not None and clipped and pending and t == pending[0]
            if pending is None or landed:
                record(t, y)
                if landed:
                    pending.popleft()

            if np.max(np.abs(y)) > tol.blowup_threshold:
                if not ts or ts[-1] != t:
                    record(t, y)
                t_pole, order, residual = fit_pole(list(history)) if len(history) == 3 else (t, None, None)
                logger.warning(
                    f"{eq}: blow-up past {tol.blowup_threshold:.1e} at t = {t:.10g}, "
                    f"pole estimate {t_pole:.10g}"
                )
                return partial(
                    Status.POLE_DETECTED,
                    t_pole=float(t_pole), pole_order=order, pole_fit_residual=residual
                )
            h = max(h_new, h) if clipped else h_new
        else:
            rejected += 1
            last_rejected = True
            h = step / min(1 / MIN_FACTOR, fac11 / SAFETY)

    logger.info(f"Integrated {eq} from {t0} to {t_end}: {steps} steps, {rejected} rejected")
    return partial(Status.COMPLETED)


def uniform_grid(t0: float, t_end: float, spacing: float) -> np.ndarray:
    """Equally spaced points from t0 towards t_end (inclusive when commensurate)."""
    if spacing <= 0:
        raise NumericError(f"Grid spacing must be positive, got {spacing}")
    count = int(math.floor(abs(t_end - t0) / spacing + 1e-9))
    direction = 1.0 if t_end >= t0 else -1.0
    return np.linspace(t0, t0 + direction * count * spacing, count + 1)


def _fd_runs(traj: Trajectory) -> tuple[list[tuple[np.ndarray, np.ndarray]], float]:
    """
    Split the samples into runs of consecutive, evenly spaced points.

    The base spacing is the smallest step. Gaps left by dropped samples must be
    whole multiples of it; runs shorter than the 3-point stencil are skipped.
    """
    t, states = traj.t, traj.states
    if traj.status is Status.POLE_DETECTED and len(t) > 1:
        t, states = t[:-1], states[:-1]
    if len(t) < 5:
        raise InsufficientSamples(f"Finite differences need at least 5 samples, got {len(t)}")
    dt = np.diff(t)
    h = float(dt[np.argmin(np.abs(dt))])
    multiples = dt / h
    steps = np.rint(multiples)
    if np.any(steps < 1) or not np.allclose(multiples, steps, rtol=0.0, atol=1e-6):
        raise NonUniformGrid("Samples are not equally spaced; resample on a uniform grid first")

    breaks = np.flatnonzero(steps != 1) + 1
    runs = [
        (t[idx], states[idx])
        for idx in np.split(np.arange(len(t)), breaks)
        if len(idx) >= 3
    ]
    if not runs:
        raise InsufficientSamples("No run of 3 evenly spaced samples survives the gaps")
    if len(breaks):
        logger.debug(f"Residual taken over {len(runs)} run(s) around {len(breaks)} gap(s)")
    return runs, h


def _run_residual(eq: PainleveEquation, fun, t: np.ndarray, states: np.ndarray, h: float) -> float:
    worst = 0.0
    if eq.is_system:
        derivative = (states[2:] - states[:-2]) / (2 * h)
        for i in range(1, len(t) - 1):
            expected = fun(t[i], states[i])
            relative = np.abs(derivative[i - 1] - expected) / (1 + np.abs(expected))
            worst = max(worst, float(np.max(relative)))
        return worst

    y = states[:, 0]
    second = (y[2:] - 2 * y[1:-1] + y[:-2]) / h**2
    first = (y[2:] - y[:-2]) / (2 * h)
    for i in range(1, len(t) - 1):
        f_value = fun(t[i], np.array([y[i], first[i - 1]]))[1]
        worst = max(worst, abs(second[i - 1] - f_value) / (1 + abs(f_value)))
    return worst


def residual_fd(eq: PainleveEquation, traj: Trajectory) -> float:
    """
    Maximum relative residual of a sampled trajectory against an equation.

    Scalar families: central differences give y' and y'' at interior points and
    the residual is |y''_fd - f(y, y'_fd, t)| / (1 + |f|). VI: the first-order
    residuals of both components. Samples missing from an otherwise uniform grid
    (dropped by ``map_trajectory``) split it into runs that are checked separately.

    Raises:
        InsufficientSamples: With fewer than 5 samples or no run of 3
        NonUniformGrid: If the samples do not sit on one uniform grid
    """
    runs, h = _fd_runs(traj)
    fun = vector_field(eq)
    return max(_run_residual(eq, fun, t, states, h) for t, states in runs)


def map_trajectory(
    transform: BacklundTransform,
    traj: Trajectory,
    denominator_floor: float = 1e-8
) -> Trajectory:
    """
    Push a source trajectory through a transformation sample by sample.

    w comes from the map and w' from its total derivative with z'' eliminated.
    Samples where the map denominator is below ``denominator_floor`` are dropped.

    Raises:
        GenericParameter: If the map still has generic parameters
        DenominatorBlowup: If more than half of the samples are dropped
    """
    if transform.map.parameters():
        raise GenericParameter(f"Map of {transform.name} has generic parameters")
    z = transform.source_var
    args = [Var(z), Var(z, 1), T]
    w = transform.map.compile(args)
    dw = transform.mapped_derivative().compile(args)
    denominator = DiffRatFunc(transform.map.denom).compile(args)

    kept_t: list[float] = []
    kept: list[tuple[float, float]] = []
    dropped: list[float] = []
    for t_value, (z0, dz0) in zip(traj.t, traj.states):
        t_value, z0, dz0 = float(t_value), float(z0), float(dz0)
        try:
            near_pole = abs(denominator(z0, dz0, t_value)) < denominator_floor
            if not near_pole:
                sample = (w(z0, dz0, t_value), dw(z0, dz0, t_value))
        except (ZeroDivisionError, OverflowError):
            near_pole = True
        if near_pole:
            dropped.append(t_value)
            continue
        kept_t.append(t_value)
        kept.append(sample)

    if len(dropped) * 2 > len(traj):
        raise DenominatorBlowup(
            f"{transform.name}: {len(dropped)} of {len(traj)} samples hit the map denominator"
        )
    if dropped:
        logger.warning(f"{transform.name}: dropped {len(dropped)} sample(s) near the map denominator")

    return Trajectory(
        np.array(kept_t),
        np.array(kept).reshape(len(kept), 2),
        traj.status,
        traj.tolerances,
        t_pole=traj.t_pole,
        pole_order=traj.pole_order,
        pole_fit_residual=traj.pole_fit_residual,
        steps=traj.steps,
        rejected=traj.rejected,
        dropped=tuple(dropped),
    )
