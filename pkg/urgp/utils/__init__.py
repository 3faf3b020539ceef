from .validators import (
    validate_required_fields, validate_normal_params, validate_term,
    validate_alpha, validate_epsilon, validate_alpha_grid
)
from .problem_parser import ProblemParser, parse_problem

__all__ = [
    'validate_required_fields',
    'validate_normal_params',
    'validate_term',
    'validate_alpha',
    'validate_epsilon',
    'validate_alpha_grid',
    'ProblemParser',
    'parse_problem'
]
