import logging
from functools import wraps

import click

from urgp.errors import (
    ConfigurationError, DegenerateRecoveryError, DomainError,
    NegativeDegreeOfDifficulty, ProblemParseError
)

logger = logging.getLogger(__name__)


class InputError(click.ClickException):
    exit_code = 2


class SolverFailure(click.ClickException):
    exit_code = 3


class ValidationFailure(click.ClickException):
    exit_code = 4


def reports_errors(f):
    """Map toolkit exceptions onto CLI exit codes"""
    @wraps(f)
    def decorated_function(*args, **kwargs):
        try:
            return f(*args, **kwargs)
        except (ProblemParseError, DomainError, ConfigurationError) as e:
            logger.error(f"[ERROR] {e}")
            raise InputError(str(e)) from e
        except (NegativeDegreeOfDifficulty, DegenerateRecoveryError) as e:
            logger.error(f"[ERROR] {e}")
            raise SolverFailure(str(e)) from e
    return decorated_function
