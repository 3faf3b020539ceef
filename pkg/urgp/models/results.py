import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple

import numpy as np

from urgp.errors import DomainError
from urgp.models.posynomial import DualSolution
from urgp.models.program import DeterministicProgram, LiftedGP, StochasticGP
from urgp.models.uncertain import Criterion


@dataclass(frozen=True)
class SolveConfig:
    kkt_tol: float = 1e-8
    max_iter: int = 200
    barrier_mu_init: float = 1.0
    barrier_shrink: float = 0.2
    dual_enabled: bool = True
    drop_threshold: float = 1e-8

    def __post_init__(self):
        if not self.kkt_tol > 0:
            raise DomainError(f"kkt_tol must be positive, got {self.kkt_tol}")
        if not 0 < self.barrier_shrink < 1:
            raise DomainError(f"barrier_shrink must lie in (0, 1), got {self.barrier_shrink}")
        if not self.barrier_mu_init > 0:
            raise DomainError(f"barrier_mu_init must be positive, got {self.barrier_mu_init}")
        if self.max_iter < 1:
            raise DomainError(f"max_iter must be at least 1, got {self.max_iter}")
        if self.drop_threshold < 0:
            raise DomainError(f"drop_threshold must be nonnegative, got {self.drop_threshold}")


class SolveStatus(str, Enum):
    OPTIMAL = 'optimal'
    MAX_ITER = 'max_iter'
    INFEASIBLE = 'infeasible'


@dataclass(frozen=True, eq=False)
class PrimalSolution:
    x: np.ndarray
    objective: float
    kkt_residual: float
    iterations: int
    status: SolveStatus
    # Objective value after each barrier stage
    history: Tuple[float, ...] = ()
    multipliers: Optional[np.ndarray] = None

    @property
    def is_optimal(self) -> bool:
        return self.status is SolveStatus.OPTIMAL


@dataclass(frozen=True, eq=False)
class PipelineResult:
    """Every artifact of one uncertain-GP solve, from reformulation to certificate."""
    criterion: Criterion
    epsilon: float
    stochastic: StochasticGP
    deterministic: DeterministicProgram
    lifted: LiftedGP
    primal: PrimalSolution
    dual: Optional[DualSolution] = None
    gap: Optional[float] = None

    @property
    def x(self) -> np.ndarray:
        """Original decision variables only."""
        return self.primal.x[:self.lifted.original_var_count]

    @property
    def aux(self) -> np.ndarray:
        return self.primal.x[self.lifted.original_var_count:]


@dataclass(frozen=True, eq=False)
class SweepRow:
    alpha: float
    x: Optional[np.ndarray]
    objective: Optional[float]
    status: str
    error: Optional[str] = None


class EndpointPolicy(str, Enum):
    AS_IS = 'as_is'
    RESAMPLE_UNTIL_ORDERED = 'resample_until_ordered'


@dataclass(frozen=True)
class MCConfig:
    samples: int = 10**6
    seed: int = 20240607
    endpoint_policy: EndpointPolicy = EndpointPolicy.AS_IS
    chunk_size: int = 2**16
    workers: Optional[int] = None

    def __post_init__(self):
        try:
            object.__setattr__(self, 'endpoint_policy', EndpointPolicy(self.endpoint_policy))
        except ValueError:
            raise DomainError(f"Unknown endpoint policy: {self.endpoint_policy!r}") from None
        if self.samples < 10**4:
            raise DomainError(f"Monte Carlo needs at least 10^4 samples, got {self.samples}")
        if not 0 <= self.seed < 2**64:
            raise DomainError(f"Seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.chunk_size < 1:
            raise DomainError(f"chunk_size must be positive, got {self.chunk_size}")
        if self.workers is not None and self.workers < 1:
            raise DomainError(f"workers must be at least 1, got {self.workers}")


@dataclass(frozen=True)
class MCReport:
    estimate: float
    stderr: float
    samples_used: int
    seed: int
    row: int = 0
    bound: float = 1.0

    @classmethod
    def from_count(cls, hits, samples, seed, row=0, bound=1.0):
        estimate = hits / samples
        return cls(
            estimate=estimate,
            stderr=math.sqrt(estimate * (1.0 - estimate) / samples),
            samples_used=samples,
            seed=seed,
            row=row,
            bound=bound
        )

    def satisfies(self, epsilon: float, sigmas: float = 3.0) -> bool:
        """One-sided check estimate + sigmas * stderr >= 1 - epsilon."""
        return self.estimate + sigmas * self.stderr >= 1.0 - epsilon
