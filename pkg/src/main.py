#!/usr/bin/env python3
"""
Painleve Toolkit - Main Entry Point

Batch command-line surface for classification, transformation verification,
orbit queries, Riccati checks, integration and parameter sweeps.
"""

from __future__ import annotations

import sys
import os
import io
import json
import argparse
import logging
from datetime import datetime

# Add src to path for imports
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from src.backlund import (
    BacklundError,
    RiccatiCandidate,
    builtin_pII,
    certify,
    load_transform_file,
    random_grid,
    riccati_check,
    verify_numeric_consistency,
    verify_symbolic,
    weyl_orbit_member,
)
from src.classify import classify, classify_equation
from src.config import ConfigError, load_config
from src.diffpoly import DiffPolyError, DiffRatFunc
from src.equations import EquationError, Family, build, load_equation_spec
from src.expressions import ExpressionError, parse_scalar
from src.numeric import NumericError, StepFailure, Tolerances, integrate, uniform_grid
from src.reporting import (
    ClassificationRecord,
    OrbitRecord,
    ReportingError,
    RiccatiRecord,
    SweepRecord,
    SweepSummaryRecord,
    TrajectoryManifest,
    VerificationRecord,
    create_manifest,
    json_schemas,
    summary_path,
    to_json,
    write_manifest,
    write_sweep_csv,
    write_text,
    write_trajectory_csv,
)
from src.scalars import ScalarError
from src.sweep import SweepError, expand_grid, parse_range, run_sweep

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INPUT_ERROR = 2

PARAMETER_FLAGS = ('alpha', 'beta', 'gamma', 'v1', 'v2', 'alpha0', 'alpha1', 'alpha2', 'alpha3', 'alpha4')
VALUE_FLAGS = {f'--{name}' for name in PARAMETER_FLAGS} | {
    '--g', '--y0', '--dy0', '--x0', '--t0', '--t-end',
}

INPUT_ERRORS = (
    ConfigError, ScalarError, ExpressionError, EquationError, DiffPolyError,
    BacklundError, SweepError, ReportingError, NumericError,
)
SHORT_OPTIONS = {'-h', '-o', '-c', '-l'}

logger = logging.getLogger(__name__)


def setup_logging(level: str = 'INFO') -> None:
    """
    Configure logging for the application.

    Reports go to stdout, so log records are written to stderr.

    Args:
        level: Logging level (DEBUG, INFO, WARNING, ERROR)
    """
    log_format = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
    logging.basicConfig(
        level=getattr(logging, level.upper()),
        format=log_format,
        handlers=[
            logging.StreamHandler(sys.stderr)
        ],
        force=True
    )


def join_negative_values(argv: list[str]) -> list[str]:
    """
    Rewrite ``--alpha -1/2`` as ``--alpha=-1/2`` so argparse does not read the
    value as an option.
    """
    result: list[str] = []
    i = 0
    while i < len(argv):
        token = argv[i]
        if (
            token in VALUE_FLAGS and i + 1 < len(argv)
            and argv[i + 1].startswith('-') and not argv[i + 1].startswith('--')
            and argv[i + 1] not in SHORT_OPTIONS
        ):
            result.append(f"{token}={argv[i + 1]}")
            i += 2
            continue
        result.append(token)
        i += 1
    return result


def _parameter_parser() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    group = parent.add_argument_group('equation parameters (exact scalars, e.g. 1/2, sqrt(2), @a)')
    for name in PARAMETER_FLAGS:
        group.add_argument(f'--{name}', type=str, default=None)
    return parent


def _add_global_arguments(parser: argparse.ArgumentParser, suppress: bool) -> None:
    """Flags accepted before or after the subcommand; subcommand copies never override."""
    def default(value):
        return argparse.SUPPRESS if suppress else value

    parser.add_argument('--json', action='store_true', default=default(False),
                        help='Emit JSON reports instead of text/CSV')
    parser.add_argument('--output', '-o', type=str, default=default(None),
                        help='Write the report to a file and a <output>.manifest.json next to it')
    parser.add_argument('--seed', type=int, default=default(0), help='Seed for randomized grids (default: 0)')
    parser.add_argument('--config', '-c', type=str, default=default(None),
                        help='Path to configuration file (default: uses PAINLEVE_CONFIG env var)')
    parser.add_argument('--log-level', '-l', type=str, default=default(None),
                        choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'],
                        help='Logging level (default: from configuration, else INFO)')


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with one subcommand per operation."""
    parser = argparse.ArgumentParser(
        description='Painleve Toolkit - exact classification, Backlund transformations and integration',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Classify P_II at a half-integer parameter
  python -m src.main classify II --alpha 1/2

  # Verify a builtin transformation at a generic parameter
  python -m src.main verify --builtin T+ --alpha @a

  # Sweep P_II over k/2, k = -8..8, as CSV
  python -m src.main sweep II --range alpha=-8..8/2 --output sweep.csv

  # Integrate P_I and write the trajectory
  python -m src.main integrate I --t0 0 --y0 0 --dy0 0 --t-end 0.1

  # Riccati check and orbit query
  python -m src.main riccati --g "-y^2 - t/2" --target II --alpha -1/2
  python -m src.main orbit --alpha @a --beta "@a+3"
        """
    )

    _add_global_arguments(parser, suppress=False)
    common = argparse.ArgumentParser(add_help=False)
    _add_global_arguments(common, suppress=True)
    params = _parameter_parser()
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('classify', parents=[common, params], help='Classify one parameter tuple')
    p.add_argument('family', nargs='?', default=None, help='I, II, III2p, IV, V3p or VI')
    p.add_argument('--spec', type=str, default=None, help='JSON equation spec file')

    p = sub.add_parser('verify', parents=[common], help='Verify a Backlund transformation')
    p.add_argument('transform_file', nargs='?', default=None, help='JSON transformation file')
    p.add_argument('--builtin', type=str, default=None, choices=['S', 'T+', 'T-'],
                   help='Builtin P_II transformation')
    p.add_argument('--alpha', type=str, default=None, help='P_II parameter of the builtin source')
    p.add_argument('--numeric', action='store_true', help='Also run the finite-difference cross-check')
    p.add_argument('--grid', type=str, default=None, help='JSON list of [t0, z0, dz0] points')
    p.add_argument('--points', type=int, default=5, help='Random grid size when --grid is absent')

    p = sub.add_parser('sweep', parents=[common], help='Classify every tuple of a parameter grid')
    p.add_argument('family', help='I, II, III2p, IV, V3p or VI')
    p.add_argument('--range', dest='ranges', action='append', default=[], metavar='NAME=RANGE',
                   help='a..b, a..b/d or a comma list of exact scalars; repeat per parameter')
    p.add_argument('--concurrency', type=int, default=None, help='Worker threads (default: config)')

    p = sub.add_parser('integrate', parents=[common, params], help='Integrate an equation numerically')
    p.add_argument('family', help='I, II, III2p, IV, V3p or VI')
    p.add_argument('--t0', type=float, required=True)
    p.add_argument('--y0', type=float, required=True)
    p.add_argument('--dy0', type=float, default=None, help="y'(t0) (second-order families)")
    p.add_argument('--x0', type=float, default=None, help='x(t0) (VI system)')
    p.add_argument('--t-end', dest='t_end', type=float, required=True)
    p.add_argument('--rtol', type=float, default=None)
    p.add_argument('--atol', type=float, default=None)
    p.add_argument('--spacing', type=float, default=None, help='Sample on a uniform grid of this spacing')

    p = sub.add_parser('orbit', parents=[common], help='P_II parameter orbit membership')
    p.add_argument('--alpha', type=str, required=True)
    p.add_argument('--beta', type=str, required=True)

    p = sub.add_parser('riccati', parents=[common, params], help='Check a Riccati subvariety')
    p.add_argument('--g', type=str, required=True, help="Right-hand side of y' = g(y, t)")
    p.add_argument('--target', type=str, required=True, help='Target family')

    sub.add_parser('schema', parents=[common], help='Print the JSON schema of every report')
    return parser


def parse_args(argv: list[str] | None = None) -> argparse.Namespace:
    """Parse command line arguments."""
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    return parser.parse_args(join_negative_values(argv))


def _params(args: argparse.Namespace) -> dict[str, str]:
    return {
        name: getattr(args, name) for name in PARAMETER_FLAGS
        if getattr(args, name, None) is not None
    }


def format_text(record) -> str:
    """Human-readable ``field: value`` rendering of a report record."""
    lines = []
    for key, value in record.model_dump(mode='json').items():
        if value is None or value == [] or value == {}:
            continue
        if isinstance(value, list):
            lines.append(f"{key}:")
            lines.extend(f"  - {item}" for item in value)
        elif isinstance(value, dict):
            lines.append(f"{key}: " + ', '.join(f"{k}={v}" for k, v in value.items()))
        else:
            lines.append(f"{key}: {value}")
    return '\n'.join(lines) + '\n'


class Run:
    """Output routing and manifest bookkeeping of one invocation."""

    def __init__(self, args: argparse.Namespace, config: dict):
        self.args = args
        self.config = config
        self.start_time = datetime.now()
        self.inputs = {
            key: value for key, value in vars(args).items()
            if key not in ('json', 'output', 'config', 'log_level') and value not in (None, [], False)
        }

    def render(self, record) -> str:
        return to_json(record) if self.args.json else format_text(record)

    def emit(self, text: str, sidecars: dict[str, str] | None = None) -> None:
        """Write the report, plus any sidecar files keyed by path, when --output is given."""
        if self.args.output:
            write_text(self.args.output, text)
            written = [self.args.output]
            for path, content in (sidecars or {}).items():
                written.append(write_text(path, content))
            manifest = create_manifest(self.args.command, self.inputs, written, self.start_time)
            write_manifest(manifest, self.args.output)
        else:
            sys.stdout.write(text)


def cmd_classify(run: Run) -> int:
    args = run.args
    if args.spec:
        report = classify_equation(load_equation_spec(args.spec))
    elif args.family:
        report = classify(args.family, _params(args))
    else:
        raise EquationError("classify needs a family or --spec")
    run.emit(run.render(ClassificationRecord.from_report(report)))
    return EXIT_OK


def _load_grid(path: str) -> list[tuple[float, float, float]]:
    try:
        with open(path, 'r', encoding='utf-8') as f:
            points = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise BacklundError(f"Cannot read grid file {path}: {e}")
    if not isinstance(points, list) or not all(isinstance(p, list) and len(p) == 3 for p in points):
        raise BacklundError(f"Grid file {path} must hold a list of [t0, z0, dz0] triples")
    return [tuple(float(v) for v in p) for p in points]


def cmd_verify(run: Run) -> int:
    args = run.args
    if args.builtin:
        if args.alpha is None:
            raise BacklundError("--builtin needs --alpha")
        transform = builtin_pII(args.builtin, args.alpha)
    elif args.transform_file:
        transform = load_transform_file(args.transform_file)
    else:
        raise BacklundError("verify needs a transformation file or --builtin")

    result = verify_symbolic(transform)
    digest = certify(transform, result).proof.digest if result.verified else None

    consistency = None
    if args.numeric:
        section = run.config['numeric']
        grid = _load_grid(args.grid) if args.grid else random_grid(args.points, args.seed)
        consistency = verify_numeric_consistency(
            transform, grid,
            span=section['span'],
            spacing=section['fd_spacing'],
            tolerance=section['residual_tolerance'],
            tolerances=Tolerances.from_config(run.config),
            denominator_floor=section['denominator_floor'],
        )

    run.emit(run.render(VerificationRecord.from_result(result, digest, consistency)))
    if not result.verified or (consistency is not None and not consistency.passed):
        return EXIT_FAILED
    return EXIT_OK


def cmd_sweep(run: Run) -> int:
    args = run.args
    ranges = {}
    for item in args.ranges:
        name, sep, spec = item.partition('=')
        if not sep:
            raise SweepError(f"Range '{item}' must look like NAME=RANGE")
        ranges[name.strip()] = parse_range(spec)
    concurrency = args.concurrency or run.config['sweep']['concurrency']
    result = run_sweep(args.family, expand_grid(args.family, ranges), concurrency)

    if args.json:
        run.emit(to_json(SweepRecord.from_result(result)))
        return EXIT_OK

    buffer = io.StringIO()
    write_sweep_csv(result, buffer)
    sidecars = {}
    if args.output:
        sidecars[summary_path(args.output)] = to_json(SweepSummaryRecord.from_result(result))
    run.emit(buffer.getvalue(), sidecars)
    return EXIT_OK


def cmd_integrate(run: Run) -> int:
    args = run.args
    eq = build(args.family, _params(args))
    second = args.x0 if eq.is_system else args.dy0
    if second is None:
        raise EquationError('--x0 is required for VI' if eq.is_system else '--dy0 is required')
    init = (args.t0, args.y0, second)
    tolerances = Tolerances.from_config(run.config, rtol=args.rtol, atol=args.atol)
    t_eval = uniform_grid(args.t0, args.t_end, args.spacing) if args.spacing else None

    status = EXIT_OK
    try:
        traj = integrate(eq, init, args.t_end, tolerances=tolerances, t_eval=t_eval)
    except StepFailure as e:
        logger.error(f"Integration failed: {e}")
        if e.trajectory is None:
            return EXIT_FAILED
        traj = e.trajectory
        status = EXIT_FAILED

    manifest = TrajectoryManifest.from_trajectory(eq, init, traj)
    if args.json:
        text = to_json(manifest)
    else:
        buffer = io.StringIO()
        write_trajectory_csv(traj, buffer)
        text = buffer.getvalue()
        logger.info(f"{eq}: {manifest.status}, {manifest.samples} samples")
    run.inputs['trajectory'] = manifest.model_dump(mode='json')
    run.emit(text)
    return status


def cmd_orbit(run: Run) -> int:
    alpha, beta = parse_scalar(run.args.alpha), parse_scalar(run.args.beta)
    result = weyl_orbit_member(alpha, beta)
    run.emit(run.render(OrbitRecord.from_result(alpha, beta, result)))
    return EXIT_OK


def cmd_riccati(run: Run) -> int:
    args = run.args
    target = build(Family.parse(args.target), _params(args))
    candidate = RiccatiCandidate(DiffRatFunc.parse(args.g, ('y',)), target)
    result = riccati_check(candidate)
    run.emit(run.render(RiccatiRecord.from_result(result)))
    return EXIT_OK if result.is_subvariety else EXIT_FAILED


def cmd_schema(run: Run) -> int:
    run.emit(json.dumps(json_schemas(), indent=2, sort_keys=True) + '\n')
    return EXIT_OK


COMMANDS = {
    'classify': cmd_classify,
    'verify': cmd_verify,
    'sweep': cmd_sweep,
    'integrate': cmd_integrate,
    'orbit': cmd_orbit,
    'riccati': cmd_riccati,
    'schema': cmd_schema,
}


def main(argv: list[str] | None = None) -> int:
    """
    Main entry point.

    Returns:
        Exit code (0 success, 1 refuted/failed check, 2 input error)
    """
    args = parse_args(argv)

    setup_logging(args.log_level or 'INFO')

    try:
        config = load_config(args.config)
    except ConfigError as e:
        logger.error(f"Configuration error: {e}")
        return EXIT_INPUT_ERROR

    if args.log_level is None:
        logging.getLogger().setLevel(config['logging']['level'])

    run = Run(args, config)
    try:
        return COMMANDS[args.command](run)
    except INPUT_ERRORS as e:
        logger.error(f"{args.command}: {e}")
        return EXIT_INPUT_ERROR


if __name__ == '__main__':
    sys.exit(main())
