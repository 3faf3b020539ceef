import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

from urgp.errors import DomainError


@dataclass(frozen=True)
class NormalRV:
    """Normal random variable N(mu, sigma)."""
    mu: float
    sigma: float

    def __post_init__(self):
        if not math.isfinite(self.mu):
            raise DomainError(f"Normal location must be finite, got {self.mu}")
        if not (math.isfinite(self.sigma) and self.sigma > 0):
            raise DomainError(f"Normal scale must be positive, got {self.sigma}")


@dataclass(frozen=True)
class LinearUncertain:
    """Linear uncertain variable L(a, b) with a ramp distribution on [a, b]."""
    a: float
    b: float

    def __post_init__(self):
        if not (math.isfinite(self.a) and math.isfinite(self.b)):
            raise DomainError(f"Linear endpoints must be finite, got ({self.a}, {self.b})")
        if not self.a < self.b:
            raise DomainError(f"Linear uncertain variable needs a < b, got ({self.a}, {self.b})")


@dataclass(frozen=True)
class LinearNormalURV:
    """
    Linear uncertain variable whose endpoints A and B are independent
    normal random variables. No ordering between A and B is imposed.
    """
    A: NormalRV
    B: NormalRV


class CriterionKind(str, Enum):
    OPTIMISTIC = 'optimistic'
    PESSIMISTIC = 'pessimistic'
    EXPECTED = 'expected'


@dataclass(frozen=True)
class Criterion:
    """Critical-value criterion used to collapse an uncertain coefficient."""
    kind: CriterionKind
    alpha: Optional[float] = None

    def __post_init__(self):
        try:
            object.__setattr__(self, 'kind', CriterionKind(self.kind))
        except ValueError:
            raise DomainError(f"Unknown criterion: {self.kind!r}") from None
        if self.kind is CriterionKind.EXPECTED:
            object.__setattr__(self, 'alpha', None)
            return
        if self.alpha is None or not (0.0 < self.alpha < 1.0):
            raise DomainError(
                f"{self.kind.value} criterion needs alpha strictly inside (0, 1), got {self.alpha}"
            )

    @classmethod
    def optimistic(cls, alpha):
        return cls(CriterionKind.OPTIMISTIC, alpha)

    @classmethod
    def pessimistic(cls, alpha):
        return cls(CriterionKind.PESSIMISTIC, alpha)

    @classmethod
    def expected(cls):
        return cls(CriterionKind.EXPECTED)

    @classmethod
    def from_name(cls, name, alpha=None):
        """Build a criterion from its lowercase name, as used in files and on the command line."""
        return cls(name.lower(), alpha)

    def label(self):
        if self.alpha is None:
            return self.kind.value
        return f"{self.kind.value}({self.alpha:g})"
