import math
from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Sequence, Tuple

import numpy as np

from urgp.errors import DomainError


def _as_exponents(exponents) -> np.ndarray:
    vector = np.array(exponents, dtype=float).reshape(-1)
    if not np.all(np.isfinite(vector)):
        raise DomainError(f"Exponents must be finite, got {vector}")
    vector.setflags(write=False)
    return vector


@dataclass(frozen=True, eq=False)
class Monomial:
    """Positive coefficient times a product of powers of the decision variables."""
    coeff: float
    exponents: np.ndarray

    def __post_init__(self):
        if not (math.isfinite(self.coeff) and self.coeff > 0):
            raise DomainError(f"Monomial coefficient must be positive, got {self.coeff}")
        object.__setattr__(self, 'coeff', float(self.coeff))
        object.__setattr__(self, 'exponents', _as_exponents(self.exponents))

    @property
    def var_count(self) -> int:
        return self.exponents.size

    def padded(self, var_count: int, extra: Optional[dict] = None) -> 'Monomial':
        """Copy with the exponent vector extended by zeros to var_count, plus optional {index: exponent}."""
        exponents = np.zeros(var_count)
        exponents[:self.var_count] = self.exponents
        for index, value in (extra or {}).items():
            exponents[index] = value
        return Monomial(self.coeff, exponents)

    def __eq__(self, other):
        if not isinstance(other, Monomial):
            return NotImplemented
        return self.coeff == other.coeff and np.array_equal(self.exponents, other.exponents)

    def __repr__(self):
        return f"Monomial({self.coeff!r}, {self.exponents.tolist()!r})"


@dataclass(frozen=True)
class Posynomial:
    """Ordered, non-empty sum of monomials over the same variables."""
    terms: Tuple[Monomial, ...]

    def __post_init__(self):
        terms = tuple(self.terms)
        if not terms:
            raise DomainError("A posynomial needs at least one term")
        sizes = {term.var_count for term in terms}
        if len(sizes) != 1:
            raise DomainError(f"Posynomial terms disagree on variable count: {sorted(sizes)}")
        object.__setattr__(self, 'terms', terms)

    @classmethod
    def from_arrays(cls, coeffs: Sequence[float], exponent_matrix) -> 'Posynomial':
        matrix = np.atleast_2d(np.asarray(exponent_matrix, dtype=float))
        return cls(tuple(Monomial(c, row) for c, row in zip(coeffs, matrix)))

    @property
    def var_count(self) -> int:
        return self.terms[0].var_count

    def __len__(self):
        return len(self.terms)

    @cached_property
    def coeffs(self) -> np.ndarray:
        return np.array([term.coeff for term in self.terms])

    @cached_property
    def log_coeffs(self) -> np.ndarray:
        return np.log(self.coeffs)

    @cached_property
    def exponent_matrix(self) -> np.ndarray:
        return np.vstack([term.exponents for term in self.terms])

    def padded(self, var_count: int, extra: Optional[dict] = None) -> 'Posynomial':
        return Posynomial(tuple(term.padded(var_count, extra) for term in self.terms))


@dataclass(frozen=True)
class GPProblem:
    """
    Posynomial geometric program:

        minimize objective(x)  s.t.  constraint_k(x) <= 1,  x > 0.
    """
    objective: Posynomial
    constraints: Tuple[Posynomial, ...] = ()
    var_names: Tuple[str, ...] = ()

    def __post_init__(self):
        constraints = tuple(self.constraints)
        object.__setattr__(self, 'constraints', constraints)
        n = self.objective.var_count
        for k, constraint in enumerate(constraints, start=1):
            if constraint.var_count != n:
                raise DomainError(
                    f"Constraint {k} has {constraint.var_count} exponents per term, expected {n}"
                )
        names = tuple(self.var_names) or tuple(f"x{j + 1}" for j in range(n))
        if len(names) != n:
            raise DomainError(f"Got {len(names)} variable names for {n} variables")
        object.__setattr__(self, 'var_names', names)

    @property
    def var_count(self) -> int:
        return self.objective.var_count

    @property
    def groups(self) -> Tuple[Posynomial, ...]:
        """Objective first, then constraints in declaration order."""
        return (self.objective,) + self.constraints

    @property
    def term_count(self) -> int:
        return sum(len(group) for group in self.groups)


@dataclass(frozen=True, eq=False)
class DualProblem:
    """Dual program data; terms are ordered objective first, then constraint groups."""
    term_coeffs: np.ndarray
    exponent_matrix: np.ndarray
    group_of_term: np.ndarray

    @property
    def term_count(self) -> int:
        return self.term_coeffs.size

    @property
    def var_count(self) -> int:
        return self.exponent_matrix.shape[1]

    @property
    def group_count(self) -> int:
        return int(self.group_of_term.max()) + 1

    @property
    def degree_of_difficulty(self) -> int:
        return self.term_count - self.var_count - 1

    def equality_system(self) -> Tuple[np.ndarray, np.ndarray]:
        """Normality row followed by one orthogonality row per variable."""
        normality = (self.group_of_term == 0).astype(float)
        matrix = np.vstack([normality, self.exponent_matrix.T])
        rhs = np.zeros(matrix.shape[0])
        rhs[0] = 1.0
        return matrix, rhs

    def group_sums(self, delta: np.ndarray) -> np.ndarray:
        """lambda_k for every group k, objective group included."""
        return np.bincount(self.group_of_term, weights=delta, minlength=self.group_count)


@dataclass(frozen=True, eq=False)
class DualSolution:
    delta: np.ndarray
    dual_objective: float
    residual_normality: float
    residual_orthogonality: float
    iterations: int = 0
    converged: bool = True
    message: str = ''

    @property
    def dual_value(self) -> float:
        return math.exp(self.dual_objective)
