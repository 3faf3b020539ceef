"""Exception hierarchy shared by every module of the toolkit."""


class UrgpError(Exception):
    """Base class for all toolkit errors."""


class DomainError(UrgpError, ValueError):
    """An argument lies outside the domain of the operation."""


class ConfigurationError(UrgpError):
    """Invalid configuration value (environment or config class)."""


class ProblemParseError(UrgpError):
    """A problem document is malformed."""

    def __init__(self, message, field=None, line=None, errors=None):
        self.field = field
        self.line = line
        self.errors = list(errors or [])
        location = []
        if field:
            location.append(f"field '{field}'")
        if line is not None:
            location.append(f"line {line}")
        if location:
            message = f"{message} ({', '.join(location)})"
        super().__init__(message)


class NegativeDegreeOfDifficulty(UrgpError):
    """The dual program has more equations than dual variables."""

    def __init__(self, degree):
        self.degree = degree
        super().__init__(
            f"Degree of difficulty is {degree}; the dual program is inconsistent "
            f"and no approximate dual is attempted"
        )


class DegenerateRecoveryError(UrgpError):
    """The primal-dual relations do not determine every primal variable."""

    def __init__(self, rank, var_count, residual):
        self.rank = rank
        self.var_count = var_count
        self.residual = residual
        super().__init__(
            f"Primal recovery is rank deficient (rank {rank} < {var_count} variables, "
            f"residual {residual:.3e})"
        )
