"""Machine-readable writers and readers for solutions and sweep tables."""

import csv
import json
import logging
import math
import os
from typing import Any, Dict, List, Sequence

from openpyxl import Workbook

from urgp.errors import ProblemParseError
from urgp.models.results import PipelineResult, SweepRow

logger = logging.getLogger(__name__)

SOLUTION_FORMAT = 1


def machine_number(value) -> str:
    """Full-precision, locale-independent rendering; empty for missing values."""
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return ''
    return repr(float(value))


def human_number(value) -> str:
    """Six significant digits."""
    if value is None:
        return '-'
    return f"{float(value):.6g}"


def sweep_header(var_names: Sequence[str]) -> List[str]:
    return ['alpha', *var_names, 'objective']


def sweep_records(rows: Sequence[SweepRow], var_names: Sequence[str]) -> List[List[str]]:
    records = []
    for row in rows:
        values = list(row.x) if row.x is not None else [None] * len(var_names)
        records.append([machine_number(v) for v in [row.alpha, *values, row.objective]])
    return records


def write_sweep_csv(rows: Sequence[SweepRow], var_names: Sequence[str], handle) -> None:
    """RFC-4180 CSV with a mandatory header row: alpha, variables (auxiliaries last), objective."""
    writer = csv.writer(handle, lineterminator='\r\n')
    writer.writerow(sweep_header(var_names))
    writer.writerows(sweep_records(rows, var_names))


def read_sweep_csv(handle) -> List[Dict[str, float]]:
    """Inverse of write_sweep_csv; empty cells read back as nan."""
    reader = csv.DictReader(handle)
    if not reader.fieldnames or reader.fieldnames[0] != 'alpha' or reader.fieldnames[-1] != 'objective':
        raise ProblemParseError("Sweep CSV header must start with 'alpha' and end with 'objective'", line=1)
    return [
        {key: float(value) if value != '' else math.nan for key, value in record.items()}
        for record in reader
    ]


def write_sweep_xlsx(rows: Sequence[SweepRow], var_names: Sequence[str], path) -> None:
    workbook = Workbook()
    sheet = workbook.active
    sheet.title = 'sweep'
    sheet.append(sweep_header(var_names))
    for row in rows:
        values = list(row.x) if row.x is not None else [None] * len(var_names)
        sheet.append([row.alpha, *[float(v) if v is not None else None for v in values],
                      row.objective])
    workbook.save(os.fspath(path))
    logger.info(f"[OK] Sweep table written to {path}")


def solution_document(result: PipelineResult) -> Dict[str, Any]:
    lifted = result.lifted
    names = lifted.gp.var_names
    n = lifted.original_var_count
    document = {
        'format': SOLUTION_FORMAT,
        'criterion': result.criterion.kind.value,
        'alpha': result.criterion.alpha,
        'epsilon': result.epsilon,
        'quantile': result.deterministic.quantile,
        'status': result.primal.status.value,
        'objective': result.primal.objective,
        'kkt_residual': result.primal.kkt_residual,
        'iterations': result.primal.iterations,
        'variables': {name: float(v) for name, v in zip(names[:n], result.primal.x[:n])},
        'auxiliaries': {name: float(v) for name, v in zip(names[n:], result.primal.x[n:])},
    }
    if result.dual is not None:
        document['dual'] = {
            'delta': [float(d) for d in result.dual.delta],
            'dual_objective': result.dual.dual_objective,
            'residual_normality': result.dual.residual_normality,
            'residual_orthogonality': result.dual.residual_orthogonality,
            'converged': result.dual.converged
        }
        document['gap'] = result.gap
    return document


def write_solution_json(result: PipelineResult, path) -> None:
    with open(os.fspath(path), 'w', encoding='utf-8') as handle:
        json.dump(solution_document(result), handle, indent=2, allow_nan=True)
    logger.info(f"[OK] Solution written to {path}")


def read_solution_json(path) -> Dict[str, Any]:
    try:
        with open(os.fspath(path), 'r', encoding='utf-8') as handle:
            document = json.load(handle)
    except OSError as e:
        raise ProblemParseError(f"Cannot read solution file {path}: {e.strerror}") from e
    except json.JSONDecodeError as e:
        raise ProblemParseError(f"Malformed solution JSON: {e.msg}", line=e.lineno) from e

    if not isinstance(document, dict) or document.get('format') != SOLUTION_FORMAT:
        raise ProblemParseError("Solution document must carry \"format\": 1", field='format')
    if not isinstance(document.get('variables'), dict):
        raise ProblemParseError("Solution document has no variables mapping", field='variables')
    return document
