"""
Tests for reporting module.
"""

import csv
import hashlib
import io
import json
from datetime import datetime

import pytest

from src.backlund import (
    BacklundTransform,
    ConsistencyReport,
    PointCheck,
    builtin_pII,
    verify_numeric_consistency,
    verify_symbolic,
    weyl_orbit_member,
)
from src.classify import classify
from src.diffpoly import DiffRatFunc
from src.equations import build
from src.numeric import integrate, uniform_grid
from src.reporting import (
    ClassificationRecord,
    NumericCheckRecord,
    OrbitRecord,
    ReportingError,
    SweepRecord,
    TrajectoryManifest,
    VerificationRecord,
    create_manifest,
    json_schemas,
    manifest_path,
    sweep_fieldnames,
    to_json,
    write_manifest,
    write_sweep_csv,
    write_text,
    write_trajectory_csv,
)
from src.sweep import run_sweep


class TestClassificationRecord:
    """Tests for classification records."""

    def test_from_report(self):
        """Test the fields of a P_II record."""
        record = ClassificationRecord.from_report(classify('II', ['1/2']))
        assert record.family == 'II'
        assert record.params == {'alpha': '1/2'}
        assert record.strongly_minimal == 'no'
        assert record.algebraic_solutions == '0'
        assert record.irreducible == 'no'
        assert record.quantifier_readings == {}
        assert record.witnesses

    def test_readings_and_decompositions(self):
        """Test the P_IV quantifier readings."""
        record = ClassificationRecord.from_report(classify('IV', ['1', '-2']))
        assert record.quantifier_readings == {'exists': 'yes', 'forall': 'yes'}
        assert len(record.decompositions) == 2
        assert record.ambiguous is False

    def test_json(self):
        """Test JSON rendering."""
        text = to_json(ClassificationRecord.from_report(classify('VI', ['1/2', '1/2', '1/2', '1/2'])))
        assert text.endswith('\n')
        data = json.loads(text)
        assert data['algebraic_solutions'] == 'infinite'
        assert data['exceptional_set'] is True
        assert data['params']['alpha2'] == '-1/2'


class TestVerificationRecord:
    """Tests for verification records."""

    def test_verified(self):
        """Test that verified records carry no residual."""
        result = verify_symbolic(builtin_pII('T+', '@a'))
        record = VerificationRecord.from_result(result, proof_digest='ab' * 32)
        assert record.status == 'verified'
        assert record.residual is None
        assert record.target == 'II(alpha=1 + @a)'
        assert len(record.singular_loci) == 1

    def test_refuted(self):
        """Test the residual of a refuted map."""
        a = build('II', ['@a'])
        transform = BacklundTransform('bogus', a, build('II', ['@a + 1']), DiffRatFunc.parse('z', ('z',)))
        record = VerificationRecord.from_result(verify_symbolic(transform))
        assert record.status == 'refuted'
        assert record.residual == '-1'
        assert record.proof_digest is None

    def test_numeric(self):
        """Test the nested numeric check."""
        transform = builtin_pII('S', '0')
        report = verify_numeric_consistency(transform, [(0.0, 0.2, 1.5)])
        record = VerificationRecord.from_result(verify_symbolic(transform), numeric=report)
        assert record.numeric.points == 1
        assert record.numeric.passed

    def test_numeric_errors(self):
        """Test that failed points are listed."""
        report = verify_numeric_consistency(builtin_pII('S', '@a'), [(0.0, 0.2, 1.5)])
        record = NumericCheckRecord.from_report(report)
        assert record.failed_points == 1
        assert not record.passed
        assert record.max_residual is None

    def test_dropped_samples(self):
        """Test that samples dropped near the map denominator are counted."""
        report = ConsistencyReport('T+', 1e-4, (
            PointCheck(0.0, 0.2, 1.5, 1e-7, dropped=1),
            PointCheck(0.3, -0.2, 1.0, 2e-7),
        ))
        record = NumericCheckRecord.from_report(report)
        assert record.dropped_samples == 1
        assert record.passed


class TestOrbitRecord:
    """Tests for orbit records."""

    def test_member(self):
        """Test a member with its word."""
        record = OrbitRecord.from_result('@a', '@a + 2', weyl_orbit_member('@a', '@a + 2'))
        assert record.member == 'yes'
        assert record.word == 'T+T+'

    def test_non_member(self):
        """Test a non-member."""
        record = OrbitRecord.from_result('1/3', '1/2', weyl_orbit_member('1/3', '1/2'))
        assert record.member == 'no'
        assert record.word is None


class TestSchemas:
    """Tests for published schemas."""

    def test_every_record_has_a_schema(self):
        """Test schema generation."""
        schemas = json_schemas()
        for name in ('ClassificationRecord', 'VerificationRecord', 'SweepRecord', 'RunManifest'):
            assert 'properties' in schemas[name]
        assert 'strongly_minimal' in schemas['ClassificationRecord']['properties']


class TestSweepCsv:
    """Tests for sweep tables."""

    def test_fieldnames(self):
        """Test the header of each family."""
        assert sweep_fieldnames('II')[:2] == ['family', 'alpha']
        assert 'alpha2' in sweep_fieldnames('VI')
        assert sweep_fieldnames('I')[1] == 'strongly_minimal'

    def test_vi_rows(self):
        """Test exceptional-set flags in a VI sweep."""
        grid = [
            {'alpha0': '1/2', 'alpha1': '1/2', 'alpha3': '1/2', 'alpha4': '1/2'},
            {'alpha0': '1/3', 'alpha1': '1/3', 'alpha3': '1/5', 'alpha4': '1/5'},
        ]
        stream = io.StringIO()
        assert write_sweep_csv(run_sweep('VI', grid, concurrency=2), stream) == 2
        rows = list(csv.DictReader(io.StringIO(stream.getvalue())))
        assert [row['exceptional_set'] for row in rows] == ['yes', 'no']
        assert rows[0]['alpha2'] == '-1/2'

    def test_sweep_record(self):
        """Test the JSON form of a sweep."""
        result = run_sweep('II', [{'alpha': '0'}, {'alpha': '1/2'}])
        record = SweepRecord.from_result(result)
        assert [row.params['alpha'] for row in record.rows] == ['0', '1/2']
        assert record.summary['strongly_minimal'] == {'no': 1, 'yes': 1}


class TestTrajectoryOutput:
    """Tests for trajectory tables and manifests."""

    def test_csv(self):
        """Test trajectory columns."""
        traj = integrate(build('I'), (0.0, 0.0, 0.0), 0.1, t_eval=uniform_grid(0.0, 0.1, 0.05))
        stream = io.StringIO()
        assert write_trajectory_csv(traj, stream) == 3
        lines = stream.getvalue().splitlines()
        assert lines[0] == 't,y,dy'
        assert lines[1] == '0.0,0.0,0.0'

    def test_manifest(self):
        """Test the trajectory summary."""
        traj = integrate(build('I'), (0.0, 0.0, 0.0), 0.1)
        manifest = TrajectoryManifest.from_trajectory(build('I'), (0.0, 0.0, 0.0), traj)
        assert manifest.equation == 'I'
        assert manifest.status == 'completed'
        assert manifest.tolerances['rtol'] == 1e-10


class TestFiles:
    """Tests for report files and run manifests."""

    def test_write_and_manifest(self, tmp_path):
        """Test digests of written outputs."""
        output = str(tmp_path / 'reports' / 'classify.txt')
        write_text(output, 'strongly_minimal: yes\n')
        manifest = create_manifest('classify', {'family': 'I'}, [output], datetime(2024, 1, 1))
        expected = hashlib.sha256(b'strongly_minimal: yes\n').hexdigest()
        assert manifest.outputs[0].sha256 == expected
        assert manifest.outputs[0].size_bytes == 22
        assert manifest.started_at == '2024-01-01T00:00:00'

        path = write_manifest(manifest, output)
        assert path == manifest_path(output) == output + '.manifest.json'
        data = json.loads((tmp_path / 'reports' / 'classify.txt.manifest.json').read_text())
        assert data['command'] == 'classify'
        assert data['inputs'] == {'family': 'I'}

    def test_write_failure(self, tmp_path):
        """Test that unwritable paths raise ReportingError."""
        blocker = tmp_path / 'blocker'
        blocker.write_text('')
        with pytest.raises(ReportingError):
            write_text(str(blocker / 'out.txt'), 'x')
