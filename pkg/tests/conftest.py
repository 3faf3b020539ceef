from pathlib import Path

import pytest

from urgp.models import GPProblem, Posynomial
from urgp.utils.problem_parser import parse_problem

PROBLEMS_DIR = Path(__file__).resolve().parent.parent / 'problems'

# Optimistic criterion, epsilon = 0.05: alpha -> (x1, x2, x3, t_0, t_1, objective)
REFERENCE_SOLUTIONS = {
    0.1: (1.454, 0.167, 1.233, 39.882, 0.056, 219.893),
    0.2: (1.409, 0.183, 1.219, 31.919, 0.051, 213.316),
    0.3: (1.361, 0.201, 1.207, 27.584, 0.047, 206.732),
    0.4: (1.310, 0.223, 1.199, 26.036, 0.042, 200.180),
    0.5: (1.254, 0.247, 1.195, 26.533, 0.038, 193.715),
    0.6: (1.194, 0.274, 1.197, 28.480, 0.034, 187.493),
    0.7: (1.132, 0.304, 1.208, 31.494, 0.031, 181.885),
    0.8: (1.075, 0.332, 1.225, 35.514, 0.030, 177.570),
    0.9: (1.033, 0.354, 1.242, 40.852, 0.032, 175.417),
}


@pytest.fixture
def problem14_path():
    return PROBLEMS_DIR / 'problem14.json'


@pytest.fixture(scope='session')
def problem14():
    return parse_problem(PROBLEMS_DIR / 'problem14.json')


@pytest.fixture
def reciprocal_gp():
    """minimize x + 1/x: optimum x = 1, value 2."""
    return GPProblem(objective=Posynomial.from_arrays([1.0, 1.0], [[1.0], [-1.0]]))


@pytest.fixture
def budget_gp():
    """minimize 1/(x y) s.t. x + y <= 1: optimum x = y = 1/2, value 4, dual weights (1, 1, 1)."""
    return GPProblem(
        objective=Posynomial.from_arrays([1.0], [[-1.0, -1.0]]),
        constraints=(Posynomial.from_arrays([1.0, 1.0], [[1.0, 0.0], [0.0, 1.0]]),)
    )
