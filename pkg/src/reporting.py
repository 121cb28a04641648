"""
Reporting module for the Painleve toolkit.
Report records (pydantic), JSON/CSV writers and run manifests with SHA256 digests.
"""

from __future__ import annotations

import csv
import hashlib
import json
import logging
import os
from datetime import datetime
from typing import IO, Any, Optional

from pydantic import BaseModel, Field

from . import __version__
from .backlund import ConsistencyReport, OrbitResult, RiccatiResult, VerificationResult
from .classify import ClassificationReport
from .equations import PARAMETER_NAMES, Family
from .numeric import Trajectory
from .sweep import SweepResult

logger = logging.getLogger(__name__)

SWEEP_RESULT_COLUMNS = (
    'strongly_minimal', 'algebraic_solutions', 'irreducible',
    'geometric_structure', 'exceptional_set',
)


class ReportingError(Exception):
    """Reporting operation error."""
    pass


# Pydantic Models
class ClassificationRecord(BaseModel):
    """Classification of one parameter tuple."""
    family: str
    params: dict[str, str]
    strongly_minimal: str
    algebraic_solutions: str
    irreducible: str
    geometric_structure: str
    geometrically_trivial: str
    exceptional_set: Optional[bool] = None
    ambiguous: bool = False
    quantifier_readings: dict[str, str] = Field(default_factory=dict)
    witnesses: list[str] = Field(default_factory=list)
    decompositions: list[str] = Field(default_factory=list)

    @classmethod
    def from_report(cls, report: ClassificationReport) -> ClassificationRecord:
        return cls(
            family=report.family.value,
            params=report.param_text(),
            strongly_minimal=report.strongly_minimal.value,
            algebraic_solutions=report.algebraic_solutions.value,
            irreducible=report.irreducible_classical.value,
            geometric_structure=report.geometric_structure.value,
            geometrically_trivial=report.geometrically_trivial.value,
            exceptional_set=report.exceptional_set,
            ambiguous=report.ambiguous,
            quantifier_readings={name: verdict.value for name, verdict in report.quantifier_readings},
            witnesses=[str(w) for w in report.witnesses],
            decompositions=[str(d) for d in report.decompositions_used],
        )


class NumericCheckRecord(BaseModel):
    """Finite-difference cross-check of a transformation."""
    points: int
    failed_points: int
    max_residual: Optional[float] = None
    tolerance: float
    passed: bool
    dropped_samples: int = 0
    errors: list[str] = Field(default_factory=list)

    @classmethod
    def from_report(cls, report: ConsistencyReport) -> NumericCheckRecord:
        errors = [
            f"({p.t0}, {p.z0}, {p.dz0}): {p.error}" for p in report.points if p.error
        ]
        return cls(
            points=len(report.points),
            failed_points=len(errors),
            max_residual=report.max_residual,
            tolerance=report.tolerance,
            passed=report.passed,
            dropped_samples=sum(p.dropped for p in report.points),
            errors=errors,
        )


class VerificationRecord(BaseModel):
    """Outcome of a symbolic transformation check."""
    name: str
    source: str
    target: str
    map: str
    status: str
    residual: Optional[str] = None
    singular_loci: list[str] = Field(default_factory=list)
    flags: list[str] = Field(default_factory=list)
    proof_digest: Optional[str] = None
    numeric: Optional[NumericCheckRecord] = None

    @classmethod
    def from_result(
        cls,
        result: VerificationResult,
        proof_digest: Optional[str] = None,
        numeric: Optional[ConsistencyReport] = None
    ) -> VerificationRecord:
        transform = result.transform
        return cls(
            name=transform.name,
            source=str(transform.source),
            target=str(transform.target),
            map=str(transform.map),
            status=result.status.value,
            residual=None if result.verified else result.residual_text,
            singular_loci=list(result.singular_loci),
            flags=list(transform.flags),
            proof_digest=proof_digest,
            numeric=NumericCheckRecord.from_report(numeric) if numeric is not None else None,
        )


class RiccatiRecord(BaseModel):
    """Outcome of a Riccati-subvariety check."""
    g: str
    target: str
    status: str
    residual: Optional[str] = None

    @classmethod
    def from_result(cls, result: RiccatiResult) -> RiccatiRecord:
        return cls(
            g=str(result.candidate.g),
            target=str(result.candidate.target),
            status=result.status.value,
            residual=None if result.is_subvariety else str(result.residual),
        )


class OrbitRecord(BaseModel):
    """P_II parameter orbit query."""
    alpha: str
    beta: str
    member: str
    word: Optional[str] = None

    @classmethod
    def from_result(cls, alpha: Any, beta: Any, result: OrbitResult) -> OrbitRecord:
        return cls(
            alpha=str(alpha),
            beta=str(beta),
            member='yes' if result.member else 'no',
            word=str(result.word) if result.word is not None else None,
        )


class TrajectoryManifest(BaseModel):
    """Integration summary written next to a trajectory."""
    equation: str
    initial: list[float]
    status: str
    samples: int
    steps: int
    rejected_steps: int
    t_start: Optional[float] = None
    t_end: Optional[float] = None
    t_pole: Optional[float] = None
    pole_order: Optional[int] = None
    pole_fit_residual: Optional[float] = None
    pole_ansatz: Optional[str] = None
    dropped_samples: int = 0
    tolerances: dict[str, Any]

    @classmethod
    def from_trajectory(cls, equation: Any, initial: tuple[float, ...], traj: Trajectory) -> TrajectoryManifest:
        return cls(equation=str(equation), initial=list(initial), **traj.manifest())


class SweepRecord(BaseModel):
    """Rows and per-verdict counts of a sweep."""
    family: str
    rows: list[ClassificationRecord]
    summary: dict[str, dict[str, int]]

    @classmethod
    def from_result(cls, result: SweepResult) -> SweepRecord:
        return cls(
            family=result.family.value,
            rows=[ClassificationRecord.from_report(r) for r in result.reports],
            summary=result.summary(),
        )


class SweepSummaryRecord(BaseModel):
    """Per-verdict counts of a sweep, written next to its CSV table."""
    family: str
    rows: int
    summary: dict[str, dict[str, int]]

    @classmethod
    def from_result(cls, result: SweepResult) -> SweepSummaryRecord:
        return cls(family=result.family.value, rows=len(result.rows), summary=result.summary())


class OutputFile(BaseModel):
    """One artifact written by a run."""
    path: str
    size_bytes: int
    sha256: str


class RunManifest(BaseModel):
    """Inputs and outputs of one command invocation."""
    command: str
    inputs: dict[str, Any] = Field(default_factory=dict)
    tool_version: str = __version__
    started_at: str
    finished_at: str
    outputs: list[OutputFile] = Field(default_factory=list)


RECORD_MODELS: dict[str, type[BaseModel]] = {
    'ClassificationRecord': ClassificationRecord,
    'VerificationRecord': VerificationRecord,
    'RiccatiRecord': RiccatiRecord,
    'OrbitRecord': OrbitRecord,
    'SweepRecord': SweepRecord,
    'SweepSummaryRecord': SweepSummaryRecord,
    'TrajectoryManifest': TrajectoryManifest,
    'RunManifest': RunManifest,
    'OutputFile': OutputFile,
}


def json_schemas() -> dict[str, dict]:
    """Published JSON schema of every record type."""
    return {name: model.model_json_schema() for name, model in RECORD_MODELS.items()}


def to_json(record: BaseModel) -> str:
    return json.dumps(record.model_dump(mode='json'), ensure_ascii=False, indent=2) + '\n'


# -- files -------------------------------------------------------------------------------


def calculate_sha256(filepath: str) -> str:
    """
    Calculate SHA256 hash of a file.

    Args:
        filepath: Path to file

    Returns:
        Hex digest string
    """
    sha256_hash = hashlib.sha256()

    with open(filepath, 'rb') as f:
        for chunk in iter(lambda: f.read(8192), b''):
            sha256_hash.update(chunk)

    return sha256_hash.hexdigest()


def describe_output(path: str) -> OutputFile:
    """Size and digest of a written artifact."""
    return OutputFile(path=path, size_bytes=os.path.getsize(path), sha256=calculate_sha256(path))


def write_text(path: str, text: str) -> str:
    """
    Write a report to ``path``.

    Raises:
        ReportingError: If the file cannot be written
    """
    try:
        directory = os.path.dirname(path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        with open(path, 'w', encoding='utf-8', newline='') as f:
            f.write(text)
    except OSError as e:
        raise ReportingError(f"Failed to write {path}: {e}")
    logger.info(f"Wrote {path}")
    return path


def create_manifest(
    command: str,
    inputs: dict[str, Any],
    outputs: list[str],
    start_time: datetime,
    end_time: Optional[datetime] = None
) -> RunManifest:
    """
    Build the manifest of a run.

    Args:
        command: Subcommand name
        inputs: Command inputs (parameters, file paths, seed)
        outputs: Paths of the artifacts written
        start_time: Processing start time
        end_time: Processing end time (default: now)

    Returns:
        RunManifest
    """
    end_time = end_time or datetime.now()
    return RunManifest(
        command=command,
        inputs=inputs,
        started_at=start_time.isoformat(),
        finished_at=end_time.isoformat(),
        outputs=[describe_output(path) for path in outputs],
    )


def manifest_path(output_path: str) -> str:
    return f"{output_path}.manifest.json"


def summary_path(output_path: str) -> str:
    return f"{output_path}.summary.json"


def write_manifest(manifest: RunManifest, output_path: str) -> str:
    """Write ``<output>.manifest.json`` next to the primary output."""
    return write_text(manifest_path(output_path), to_json(manifest))


# -- CSV ---------------------------------------------------------------------------------


def sweep_fieldnames(family: Family | str) -> list[str]:
    family = Family.parse(family)
    return ['family', *PARAMETER_NAMES[family], *SWEEP_RESULT_COLUMNS]


def _csv_flag(value: Optional[bool]) -> str:
    if value is None:
        return ''
    return 'yes' if value else 'no'


def write_sweep_csv(result: SweepResult, stream: IO[str]) -> int:
    """
    Write one row per report, in input order, header first.

    Returns:
        Number of data rows written
    """
    writer = csv.DictWriter(stream, fieldnames=sweep_fieldnames(result.family), lineterminator='\n')
    writer.writeheader()
    for report in result.reports:
        row = {'family': report.family.value, **report.param_text()}
        row.update({
            'strongly_minimal': report.strongly_minimal.value,
            'algebraic_solutions': report.algebraic_solutions.value,
            'irreducible': report.irreducible_classical.value,
            'geometric_structure': report.geometric_structure.value,
            'exceptional_set': _csv_flag(report.exceptional_set),
        })
        writer.writerow(row)
    return len(result.rows)


def write_trajectory_csv(traj: Trajectory, stream: IO[str]) -> int:
    """Columns t, y, dy (or t, y, x for the VI system), floats in repr precision."""
    writer = csv.writer(stream, lineterminator='\n')
    writer.writerow(['t', *traj.labels])
    for t_value, state in zip(traj.t, traj.states):
        writer.writerow([repr(float(t_value)), *(repr(float(v)) for v in state)])
    return len(traj)
