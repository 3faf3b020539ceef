import io
import json
import math

import numpy as np
import pytest
from openpyxl import load_workbook

from urgp import solver
from urgp.errors import ProblemParseError
from urgp.models import Criterion, SweepRow
from urgp.utils import exporter

NAMES = ('x1', 'x2', 't_0')


@pytest.fixture
def sweep_rows():
    return [
        SweepRow(alpha=0.1, x=np.array([1.0 / 3.0, 2.5, 1e-9]), objective=219.8934512, status='optimal'),
        SweepRow(alpha=0.2, x=None, objective=None, status='error', error='failed'),
    ]


class TestSweepTables:

    def test_csv_layout(self, sweep_rows):
        buffer = io.StringIO()
        exporter.write_sweep_csv(sweep_rows, NAMES, buffer)
        lines = buffer.getvalue().split('\r\n')
        assert lines[0] == 'alpha,x1,x2,t_0,objective'
        assert lines[2] == '0.2,,,,'
        assert lines[-1] == ''

    def test_csv_round_trip_keeps_full_precision(self, sweep_rows):
        buffer = io.StringIO()
        exporter.write_sweep_csv(sweep_rows, NAMES, buffer)
        buffer.seek(0)
        records = exporter.read_sweep_csv(buffer)
        assert records[0]['x1'] == 1.0 / 3.0
        assert records[0]['t_0'] == 1e-9
        assert records[0]['objective'] == 219.8934512
        assert math.isnan(records[1]['objective'])

    def test_csv_header_required(self):
        with pytest.raises(ProblemParseError):
            exporter.read_sweep_csv(io.StringIO('x1,x2\r\n1,2\r\n'))

    def test_xlsx(self, sweep_rows, tmp_path):
        path = tmp_path / 'sweep.xlsx'
        exporter.write_sweep_xlsx(sweep_rows, NAMES, path)
        sheet = load_workbook(path).active
        rows = list(sheet.iter_rows(values_only=True))
        assert rows[0] == ('alpha', 'x1', 'x2', 't_0', 'objective')
        assert rows[1][1] == pytest.approx(1.0 / 3.0)
        assert rows[2][4] is None

    def test_number_formats(self):
        assert exporter.human_number(193.71512345) == '193.715'
        assert exporter.machine_number(0.1) == '0.1'
        assert exporter.machine_number(float('nan')) == ''
        assert exporter.human_number(None) == '-'


class TestSolutionDocument:

    @pytest.fixture(scope='class')
    def result(self, problem14):
        return solver.solve_uncertain(problem14, Criterion.optimistic(0.5), 0.05)

    def test_round_trip(self, result, tmp_path):
        path = tmp_path / 'solution.json'
        exporter.write_solution_json(result, path)
        document = exporter.read_solution_json(path)
        assert document['format'] == 1
        assert document['criterion'] == 'optimistic'
        assert document['alpha'] == 0.5
        assert list(document['variables']) == ['x1', 'x2', 'x3']
        assert list(document['auxiliaries']) == ['t_0', 't_1']
        assert document['objective'] == result.primal.objective
        assert document['variables']['x2'] == result.x[1]
        assert len(document['dual']['delta']) == 10

    def test_rejects_other_documents(self, tmp_path):
        path = tmp_path / 'other.json'
        path.write_text(json.dumps({'variables': {}}), encoding='utf-8')
        with pytest.raises(ProblemParseError):
            exporter.read_solution_json(path)
