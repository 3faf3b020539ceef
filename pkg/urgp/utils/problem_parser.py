import json
import logging
import os
from io import BytesIO
from typing import Any, Dict, List

from openpyxl import load_workbook

from urgp.errors import ProblemParseError
from urgp.models.program import UncertainTerm, URGPProblem
from urgp.models.uncertain import LinearNormalURV, NormalRV
from urgp.utils.validators import validate_required_fields, validate_term

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1
SHEET_COLUMNS = ['group', 'A_mu', 'A_sigma', 'B_mu', 'B_sigma']


class ProblemParser:
    """
    Read uncertain random GP problems from the canonical JSON document or
    from a spreadsheet with one term per row.
    """

    def __init__(self):
        self.supported_formats = ['.json', '.xlsx']

    def parse_problem(self, path) -> URGPProblem:
        path = os.fspath(path)
        try:
            with open(path, 'rb') as handle:
                content = handle.read()
        except OSError as e:
            raise ProblemParseError(f"Cannot read problem file {path}: {e.strerror}") from e
        return self.parse_document(content, path)

    def parse_document(self, content: bytes, filename: str) -> URGPProblem:
        file_ext = os.path.splitext(filename.lower())[1]

        # Extensionless files are read as JSON
        if file_ext in ('', '.json'):
            document = self._load_json(content)
        elif file_ext == '.xlsx':
            document = self._load_workbook(content)
        else:
            raise ProblemParseError(
                f"Unsupported problem format: {file_ext}. Supported: {', '.join(self.supported_formats)}"
            )

        problem = self._build_problem(document)
        logger.info(
            f"[OK] Parsed {filename}: {len(problem.objective_terms)} objective terms, "
            f"{len(problem.constraint_groups)} constraints, {problem.var_count} variables"
        )
        return problem

    def _load_json(self, content: bytes) -> Dict[str, Any]:
        try:
            document = json.loads(content.decode('utf-8'))
        except UnicodeDecodeError as e:
            raise ProblemParseError(f"Problem file is not UTF-8 text: {e}") from e
        except json.JSONDecodeError as e:
            raise ProblemParseError(f"Malformed JSON: {e.msg}", line=e.lineno) from e

        if not isinstance(document, dict):
            raise ProblemParseError("Problem document must be a JSON object")

        version = document.get('format')
        if version is None:
            logger.warning(f"[WARN] Problem document has no 'format' field, assuming {FORMAT_VERSION}")
        elif version != FORMAT_VERSION:
            raise ProblemParseError(f"Unsupported format version {version!r}", field='format')
        return document

    def _load_workbook(self, content: bytes) -> Dict[str, Any]:
        """Convert a term-per-row sheet into the canonical document layout."""
        try:
            workbook = load_workbook(BytesIO(content), read_only=True, data_only=True)
        except Exception as e:
            raise ProblemParseError(f"Cannot open workbook: {e}") from e

        sheet = workbook[workbook.sheetnames[0]]
        rows = sheet.iter_rows(values_only=True)
        header = [str(cell).strip() if cell is not None else '' for cell in next(rows, ())]
        if header[:len(SHEET_COLUMNS)] != SHEET_COLUMNS:
            raise ProblemParseError(
                f"Header must start with {', '.join(SHEET_COLUMNS)}", field=sheet.title, line=1
            )
        variables = [name for name in header[len(SHEET_COLUMNS):] if name]

        objective = []
        constraints: Dict[int, List[Dict[str, Any]]] = {}
        for line, row in enumerate(rows, start=2):
            if not row or row[0] is None:
                continue
            group = row[0]
            if not isinstance(group, (int, float)) or group < 0 or int(group) != group:
                raise ProblemParseError("Group must be a nonnegative integer", field='group', line=line)
            term = {
                'A': {'mu': row[1], 'sigma': row[2]},
                'B': {'mu': row[3], 'sigma': row[4]},
                'exponents': {
                    name: value for name, value in zip(variables, row[len(SHEET_COLUMNS):])
                    if value is not None
                }
            }
            if int(group) == 0:
                objective.append(term)
            else:
                constraints.setdefault(int(group), []).append(term)

        workbook.close()
        return {
            'format': FORMAT_VERSION,
            'variables': variables,
            'objective': objective,
            'constraints': [constraints[k] for k in sorted(constraints)]
        }

    def _build_problem(self, document: Dict[str, Any]) -> URGPProblem:
        is_valid, missing = validate_required_fields(document, ['variables', 'objective'])
        if not is_valid:
            raise ProblemParseError(f"Missing required fields: {', '.join(missing)}", field=missing[0])

        variables = document['variables']
        if not isinstance(variables, list) or not all(isinstance(v, str) and v for v in variables):
            raise ProblemParseError("Variables must be a list of names", field='variables')
        if len(set(variables)) != len(variables):
            raise ProblemParseError("Variable names must be unique", field='variables')

        objective = document['objective']
        constraints = document.get('constraints', [])
        if not isinstance(objective, list) or not objective:
            raise ProblemParseError("Objective must be a non-empty list of terms", field='objective')
        if not isinstance(constraints, list):
            raise ProblemParseError("Constraints must be a list of term lists", field='constraints')

        errors = []
        rows = [('objective', objective)]
        for k, group in enumerate(constraints):
            if not isinstance(group, list) or not group:
                errors.append(f"constraints[{k}]: expected a non-empty list of terms")
                continue
            rows.append((f"constraints[{k}]", group))
        for path, terms in rows:
            for i, term in enumerate(terms):
                _, term_errors = validate_term(term, variables, f"{path}[{i}]")
                errors.extend(term_errors)

        if errors:
            raise ProblemParseError(
                f"Invalid problem: {'; '.join(errors)}",
                field=errors[0].split(':', 1)[0],
                errors=errors
            )

        def build_terms(terms):
            return tuple(
                UncertainTerm(
                    coeff=LinearNormalURV(
                        A=NormalRV(float(term['A']['mu']), float(term['A']['sigma'])),
                        B=NormalRV(float(term['B']['mu']), float(term['B']['sigma']))
                    ),
                    exponents=[float(term.get('exponents', {}).get(name, 0.0)) for name in variables]
                )
                for term in terms
            )

        return URGPProblem(
            objective_terms=build_terms(objective),
            constraint_groups=tuple(build_terms(group) for _, group in rows[1:]),
            var_names=tuple(variables)
        )


def parse_problem(path) -> URGPProblem:
    return ProblemParser().parse_problem(path)
