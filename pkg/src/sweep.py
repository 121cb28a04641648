"""
Sweep module for the Painleve toolkit.
Classifies every tuple of a parameter grid in parallel and collects the
reports in input order.
"""

from __future__ import annotations

import itertools
import logging
import re
from collections import Counter
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass
from typing import Mapping, Sequence

from .classify import ClassificationReport, classify
from .equations import PARAMETER_NAMES, ArityMismatch, Family
from .expressions import parse_scalar
from .scalars import ExactScalar

logger = logging.getLogger(__name__)

_RANGE_PATTERN = re.compile(r"^\s*(-?\d+)\s*\.\.\s*(-?\d+)\s*(?:/\s*(\d+))?\s*$")


class SweepError(Exception):
    """Parameter sweep error."""
    pass


def parse_range(text: str) -> list[ExactScalar]:
    """
    Parse a parameter range.

    "a..b" is the integers a..b inclusive, "a..b/d" is k/d for k in a..b and
    anything else is a comma-separated list of exact scalars. The empty string
    is the empty range.

    Raises:
        SweepError: On a reversed range or a zero denominator
        ExpressionError: On malformed list entries
    """
    text = text.strip().strip('[]')
    if not text.strip():
        return []
    match = _RANGE_PATTERN.match(text)
    if match:
        start, stop = int(match.group(1)), int(match.group(2))
        denominator = int(match.group(3) or 1)
        if denominator == 0:
            raise SweepError(f"Zero denominator in range '{text}'")
        if stop < start:
            raise SweepError(f"Range '{text}' runs backwards")
        return [ExactScalar.rational(k) / denominator for k in range(start, stop + 1)]
    return [parse_scalar(item) for item in text.split(',') if item.strip()]


def sweep_parameter_names(family: Family | str) -> tuple[str, ...]:
    """Names that take ranges; VI derives alpha2 from the others."""
    family = Family.parse(family)
    names = PARAMETER_NAMES[family]
    if family is Family.VI:
        return tuple(name for name in names if name != 'alpha2')
    return names


def expand_grid(
    family: Family | str,
    ranges: Mapping[str, Sequence[ExactScalar | str]]
) -> list[dict[str, ExactScalar]]:
    """
    Cartesian product of the parameter ranges, first parameter varying slowest.

    Raises:
        ArityMismatch: If a range is missing or names an unknown parameter
    """
    family = Family.parse(family)
    names = sweep_parameter_names(family)
    unknown = set(ranges) - set(names)
    if unknown:
        raise ArityMismatch(f"Unknown parameters for {family.value}: {sorted(unknown)}")
    missing = [name for name in names if name not in ranges]
    if missing:
        raise ArityMismatch(f"Missing ranges for {family.value}: {missing}")
    values = [[parse_scalar(v) for v in ranges[name]] for name in names]
    return [dict(zip(names, combo)) for combo in itertools.product(*values)]


@dataclass(frozen=True)
class SweepRow:
    index: int
    report: ClassificationReport


@dataclass(frozen=True)
class SweepResult:
    family: Family
    rows: tuple[SweepRow, ...]

    @property
    def reports(self) -> list[ClassificationReport]:
        return [row.report for row in self.rows]

    def summary(self) -> dict[str, dict[str, int]]:
        """Counts per verdict value of each report field."""
        fields = {
            'strongly_minimal': lambda r: r.strongly_minimal.value,
            'algebraic_solutions': lambda r: r.algebraic_solutions.value,
            'irreducible': lambda r: r.irreducible_classical.value,
            'geometric_structure': lambda r: r.geometric_structure.value,
        }
        return {
            name: dict(sorted(Counter(getter(r) for r in self.reports).items()))
            for name, getter in fields.items()
        }


def run_sweep(
    family: Family | str,
    grid: Sequence[Mapping[str, ExactScalar | str]],
    concurrency: int = 4
) -> SweepResult:
    """
    Classify every parameter tuple of ``grid``.

    Rows are evaluated in parallel and returned in input order. Input errors
    from any row propagate.

    Args:
        family: Family tag or name
        grid: Parameter tuples by name
        concurrency: Worker threads

    Returns:
        SweepResult
    """
    family = Family.parse(family)
    if concurrency < 1:
        raise SweepError(f"concurrency must be positive, got {concurrency}")
    logger.info(f"Sweeping {family.value} over {len(grid)} parameter tuple(s) with {concurrency} worker(s)")

    rows: list[SweepRow] = []
    if grid:
        with ThreadPoolExecutor(max_workers=concurrency) as executor:
            futures = {
                executor.submit(classify, family, dict(params)): index
                for index, params in enumerate(grid)
            }
            for future in as_completed(futures):
                rows.append(SweepRow(futures[future], future.result()))
    rows.sort(key=lambda row: row.index)

    result = SweepResult(family, tuple(rows))
    logger.info(f"Sweep of {family.value} finished: {len(rows)} row(s), {result.summary()['strongly_minimal']}")
    return result
